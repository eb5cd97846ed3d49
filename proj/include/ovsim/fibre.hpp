#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ovsim/grid.hpp"

namespace ovsim {

/// Macro fibre phase: orientation theta_f per node and its magnitude F = |theta_f|.
struct OrientedFibreField {
    VectorField theta;
    ScalarField F;

    OrientedFibreField() = default;
    explicit OrientedFibreField(const Grid& grid) : theta(grid), F(grid) {}
};

/// Micro-fibre mass f over every micro-domain sigmaY(x) = x + [-h/2, h/2]^2.
///
/// The domains tile the macro domain with their vertices on the dual mesh, so
/// all of them together form one lattice of (N*M)^2 square micro cells of side
/// h/M. Cell (a, b) belongs to macro node (a / M, b / M) and is sampled at its
/// centre.
class MicroFibreField {
public:
    MicroFibreField() = default;
    MicroFibreField(const Grid& grid, int cells_per_side, double f_max);

    const Grid& grid() const { return grid_; }
    int cells_per_side() const { return m_; }
    int lattice_size() const { return grid_.size() * m_; }
    double cell_size() const { return grid_.spacing() / m_; }
    double f_max() const { return f_max_; }
    void set_f_max(double f_max);

    double& at(int a, int b) { return f_[index(a, b)]; }
    double at(int a, int b) const { return f_[index(a, b)]; }
    /// Micro value (p, q) of the domain anchored at macro node n, 0 <= p, q < M.
    double& local(Node n, int p, int q) { return at(n.i * m_ + p, n.j * m_ + q); }
    double local(Node n, int p, int q) const { return at(n.i * m_ + p, n.j * m_ + q); }

    /// Centre of lattice cell (a, b) in macro coordinates.
    Vec2 cell_centre(int a, int b) const;
    /// Offset z - x of local cell (p, q) from its anchor node.
    Vec2 local_offset(int p, int q) const;
    /// Lattice cell containing the point, or false if the point is off the lattice.
    bool locate(Vec2 point, int& a, int& b) const;

    double total_mass() const;
    double domain_mass(Node n) const;
    std::size_t index(int a, int b) const { return static_cast<std::size_t>(b) * lattice_size() + a; }
    std::vector<double>& data() { return f_; }
    const std::vector<double>& data() const { return f_; }

private:
    Grid grid_;
    int m_ = 0;
    double f_max_ = 0.0;
    std::vector<double> f_;
};

/// Mass-weighted mean of z - x over sigmaY(x); (0,0) for an empty domain.
Vec2 barycentral_orientation(const MicroFibreField& field, Node anchor);

struct FibreOrientation {
    Vec2 theta;
    double F = 0.0;
};

/// theta_f = (mean micro mass) * unit barycentral direction, F = |theta_f|.
FibreOrientation macro_fibre_orientation(const MicroFibreField& field, Node anchor);

/// Orientation and magnitude at every macro node.
OrientedFibreField derive_orientation(const MicroFibreField& field);

/// r = w * total_flux + (1 - w) * theta_f with w = c_total / (c_total + F).
Vec2 rearrangement_vector(Vec2 total_flux, double c_total, Vec2 theta, double F);

struct RelocationReport {
    std::size_t transfers = 0;
    std::size_t truncated = 0;
    double moved_mass = 0.0;
};

/// Moves micro-fibre mass inside the domains anchored at `anchors` under their
/// rearrangement vectors. Transfers are computed from the pre-step state and
/// applied in anchor order, row-major within a domain; receivers are capped at
/// f_max and the excess stays at the source, so total mass is conserved.
RelocationReport relocate_microfibres(MicroFibreField& field, const std::vector<Node>& anchors,
                                      const VectorField& rearrangement);

/// Scales the domain of `anchor` by exp(-(alpha_cF c + alpha_iF i) dt).
void apply_fibre_degradation(MicroFibreField& field, Node anchor, double c, double i,
                             double alpha_cF, double alpha_iF, double dt);

/// Domain-wise degradation over the whole grid.
void apply_fibre_degradation(MicroFibreField& field, const ScalarField& c, const ScalarField& i,
                             double alpha_cF, double alpha_iF, double dt);

/// Two perpendicular off-centre strips in every domain, scaled so the derived F
/// equals `target` node by node. f_max becomes `cap_factor` times the largest
/// micro value (or 1 when the pattern is empty).
MicroFibreField seed_strip_pattern(const ScalarField& target, int cells_per_side, double cap_factor = 2.0);

/// One row per macro node: x1 x2 theta1 theta2 F.
void write_vector_field(const std::string& path, const OrientedFibreField& fibres);

}  // namespace ovsim
