#pragma once

#include <memory>
#include <vector>

#include "ovsim/grid.hpp"

namespace ovsim {

struct MdeSettings {
    double epsilon = 0.125;            ///< patch side
    int nodes_per_side = 17;           ///< P, vertex-centred including the patch edges
    double source_radius = 0.0625;     ///< sup-norm radius of the cell-averaging box
    double diffusion = 0.0025;         ///< D_m
    int steps = 20;                    ///< backward-Euler steps per stage
    double kappa = 0.5;                ///< displacement = kappa * outside fraction * epsilon
    double activation_threshold = 0.2; ///< minimum outside mass fraction

    void validate() const;
};

/// One epsilon-patch of the boundary bundle, centred on a boundary node.
struct BoundaryMicroDomain {
    Node centre;
    Vec2 centre_position;
    double side = 0.0;
    int nodes_per_side = 0;
    /// Micro node membership in the tumour at the time the bundle was built.
    std::vector<std::uint8_t> inside;

    double spacing() const { return side / (nodes_per_side - 1); }
    /// Position of micro node (p, q) relative to the patch centre.
    Vec2 offset(int p, int q) const;
    std::size_t index(int p, int q) const { return static_cast<std::size_t>(q) * nodes_per_side + p; }
};

/// Boundary patches; a boundary node seeds a patch (together with its mirror
/// images about the grid centre that are boundary nodes too) when no earlier
/// patch already covers it within epsilon/2. Scan is row-major.
std::vector<BoundaryMicroDomain> cover_boundary(const TumourRegion& region, double epsilon, int nodes_per_side);

/// Source G at every micro node: average of gamma_c c + gamma_i i over the tumour
/// nodes in the sup-norm box of radius `source_radius`; 0 at outside micro nodes.
std::vector<double> mde_source(const BoundaryMicroDomain& dom, const ScalarField& c, const ScalarField& i,
                               const TumourRegion& region, double gamma_c, double gamma_i, double source_radius);

/// Trapezoid-weighted integral of a patch field, the quantity the zero-flux
/// discretisation conserves.
double patch_mass(const BoundaryMicroDomain& dom, const std::vector<double>& m);

/// Backward-Euler solver for dm/dtau = D_m Lap m + G with m(0) = 0 and zero
/// normal flux. The five-point operator uses mirror ghosts at the patch edge.
class MdeSolver {
public:
    MdeSolver(int nodes_per_side, double side, double diffusion, double duration, int steps);
    ~MdeSolver();
    MdeSolver(MdeSolver&&) noexcept;
    MdeSolver& operator=(MdeSolver&&) noexcept;

    double step_size() const { return dtau_; }
    int steps() const { return steps_; }

    /// m after one backward-Euler step from `m` under a constant source.
    std::vector<double> advance(const std::vector<double>& m, const std::vector<double>& source) const;

    /// m at the end of the stage, starting from zero.
    std::vector<double> solve(const std::vector<double>& source) const;

private:
    struct Factor;
    int p_ = 0;
    double dtau_ = 0.0;
    int steps_ = 0;
    std::unique_ptr<Factor> factor_;
};

struct BoundaryRelocation {
    Node origin;
    Vec2 direction;
    double displacement = 0.0;
    bool active = false;
};

BoundaryRelocation boundary_relocation(const BoundaryMicroDomain& dom, const std::vector<double>& m,
                                       double activation_threshold, double kappa);

/// Adds the grid nodes swept from each active relocation's origin along its
/// direction. Inward sweeps change nothing.
TumourRegion expand_tumour(const TumourRegion& region, const std::vector<BoundaryRelocation>& relocations);

}  // namespace ovsim
