#pragma once

#include <cstddef>
#include <string>

#include "ovsim/adhesion.hpp"
#include "ovsim/fibre.hpp"
#include "ovsim/grid.hpp"

namespace ovsim {

/// Nondimensional model parameters. Defaults are the baseline set.
struct ParameterSet {
    double D_c = 0.00035;
    double D_i = 0.0054;
    double D_v = 0.0036;
    double D_m = 0.0025;
    double eta_i = 0.0285;
    double eta_v = 0.0285;
    double mu_1 = 0.5;
    double mu_2 = 0.0;
    double alpha_c = 0.15;
    double alpha_i = 0.075;
    double alpha_cF = 0.75;
    double alpha_iF = 0.75;
    double infection_rate = 0.079;
    double delta_i = 0.05;
    double delta_v = 0.025;
    double b = 20.0;
    double nu_e = 1.0;
    double nu_c = 1.0;
    double gamma_c = 1.0;
    double gamma_i = 1.5;
    double fibre_ratio = 0.2;
    double sensing_radius = 0.15;
    AdhesionStrengths adhesion;

    void validate() const;
    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

enum class InfectedFlux { local, nonlocal };

std::string to_string(InfectedFlux mode);
InfectedFlux parse_infected_flux(const std::string& text);

/// rho = nu_e (E + F) + nu_c (c + i), node by node.
ScalarField volume_fraction(const StateVector& state, const ScalarField& F, double nu_e, double nu_c);

struct Derivatives {
    ScalarField c;
    ScalarField i;
    ScalarField E;
    ScalarField v;
    /// Largest face speed of any advective transport, used for the CFL bound.
    double max_speed = 0.0;
    /// Largest pointwise reaction rate, used for the stiffness bound.
    double max_rate = 0.0;
};

/// Thrown when a configured substep breaks the explicit stability bounds.
class CflError : public Error {
public:
    using Error::Error;
};

struct MacroStepReport {
    int substeps = 0;
    double clamped_mass = 0.0;
    /// Time averages of c and i over the step, for the fibre decay factor.
    ScalarField mean_c;
    ScalarField mean_i;
};

/// Method-of-lines integrator for (c, i, E, v).
///
/// Transport is finite-volume on the node lattice: diffusive and advective
/// fluxes live on the faces between neighbouring nodes, faces that leave the
/// tumour (for c, i) or the domain (for all fields) carry no flux, and
/// advection is first-order upwind on the face-averaged velocity. Time
/// stepping is explicit midpoint.
class MacroSolver {
public:
    MacroSolver(const Grid& grid, ParameterSet params, InfectedFlux mode);

    const ParameterSet& params() const { return params_; }
    InfectedFlux mode() const { return mode_; }
    const SensingStencil& stencil() const { return stencil_; }

    /// Diffusion-limited substep: 0.2 h^2 / max(D_c, D_i, D_v).
    double diffusion_limit() const;

    Derivatives rhs(const StateVector& state, const OrientedFibreField& fibres, const TumourRegion& region) const;

    /// Advances the state by `dt_stage`. `substep` > 0 fixes the internal step
    /// and throws CflError if it is unstable; 0 picks it adaptively.
    MacroStepReport step(StateVector& state, const OrientedFibreField& fibres, const TumourRegion& region,
                         double dt_stage, double substep = 0.0) const;

    /// Total cell flux (D_c grad c - c A_c) + (D_i grad i - phi_i) at region members.
    VectorField total_cell_flux(const StateVector& state, const OrientedFibreField& fibres,
                                const TumourRegion& region) const;

private:
    Grid grid_;
    ParameterSet params_;
    InfectedFlux mode_;
    SensingStencil stencil_;
};

}  // namespace ovsim
