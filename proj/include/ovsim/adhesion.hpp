#pragma once

#include <vector>

#include "ovsim/fibre.hpp"
#include "ovsim/grid.hpp"

namespace ovsim {

/// Adhesion strengths. The four cell-cell values are maxima modulated by the
/// local non-fibre ECM; the ECM and fibre strengths are constants.
struct AdhesionStrengths {
    double cc_max = 0.1;
    double ci_max = 0.0;
    double ic_max = 0.0;
    double ii_max = 0.1;
    double ce = 0.5;
    double ie = 0.5;
    double cF = 0.2;
    double iF = 0.2;

    void validate() const;
    friend bool operator==(const AdhesionStrengths&, const AdhesionStrengths&) = default;
};

/// S_max * exp(1 - 1/(1 - (1 - E)^2)) with E clamped to [0, 1].
double adhesion_strength(double E, double s_max);

/// K(r) = 3/(2 pi R^2) (1 - r/(2R)).
double adhesion_kernel(double r, double radius);

struct StencilEntry {
    int di = 0;
    int dj = 0;
    Vec2 offset;     ///< y_k in length units
    Vec2 radial;     ///< n(y_k), (0,0) at the centre
    double weight;   ///< integral of K over the part of B(0,R) closest to y_k
};

/// Quadrature of the sensing ball B(0,R) on the macro lattice.
///
/// Every lattice offset with |y_k| <= R is a sample point. Its weight is the
/// kernel mass of the ball points for which it is the nearest sample
/// (a Voronoi partition of the ball restricted to the samples), evaluated
/// with a fine sub-cell rule and made exactly dihedrally symmetric. The
/// weights therefore sum to the kernel mass 1 up to the sub-cell resolution.
class SensingStencil {
public:
    static SensingStencil build(double radius, double spacing, int subsamples = 64);

    double radius() const { return radius_; }
    double spacing() const { return spacing_; }
    const std::vector<StencilEntry>& entries() const { return entries_; }
    /// Sum of the per-offset kernel weights.
    double kernel_sum() const;

private:
    double radius_ = 0.0;
    double spacing_ = 0.0;
    std::vector<StencilEntry> entries_;
};

/// (y + theta)/|y + theta| for y != 0; (0,0) for y = 0 or y + theta = 0.
Vec2 fibre_biased_direction(Vec2 y, Vec2 theta);

enum class Population { uninfected, infected };

/// Nonlocal adhesion flux A_c or A_i at every member of `region`; zero elsewhere.
///
/// `volume_fraction` is rho = nu_e (E + F) + nu_c (c + i). Samples outside the
/// region or off the grid contribute nothing.
VectorField eval_adhesion_flux(Population which, const StateVector& state, const OrientedFibreField& fibres,
                               const ScalarField& volume_fraction, const TumourRegion& region,
                               const SensingStencil& stencil, const AdhesionStrengths& strengths);

}  // namespace ovsim
