#pragma once

#include "ovsim/config.hpp"
#include "ovsim/fibre.hpp"
#include "ovsim/grid.hpp"

namespace ovsim {

/// Everything the stage loop evolves.
struct ModelState {
    Grid grid;
    StateVector state;
    TumourRegion region;
    MicroFibreField micro;
    OrientedFibreField fibres;
};

/// psi_gamma(x) = gamma^-2 psi(x / gamma) with psi(x) = exp(1 / (|x|^2 - 1)) inside the unit ball.
double standard_mollifier(Vec2 x, double gamma);

/// Discrete convolution with the node samples of psi_gamma, normalised to sum 1.
ScalarField mollify(const ScalarField& f, double gamma);

/// Heterogeneous ECM pattern 1/2 + 1/4 sin(xi z1 z2)^3 sin(xi z2 / z1), z = (x + 3/2) / 3, xi = 7 pi.
double ecm_pattern(Vec2 x);

/// Tumour aggregate, infected cells, split ECM, virus injection and micro-fibres at t = 0.
ModelState init_state(const RunConfig& config);

}  // namespace ovsim
