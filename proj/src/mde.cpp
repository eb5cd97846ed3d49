#include "ovsim/mde.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

namespace ovsim {

void MdeSettings::validate() const
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error("MDE patch side epsilon must be positive");
    if (nodes_per_side < 3) throw Error("MDE patch needs at least 3 nodes per side");
    if (!(source_radius > 0.0) || !std::isfinite(source_radius)) throw Error("MDE source radius must be positive");
    if (!(diffusion >= 0.0) || !std::isfinite(diffusion)) throw Error("D_m must be finite and >= 0");
    if (steps < 1) throw Error("MDE needs at least one micro step per stage");
    if (!(kappa > 0.0 && kappa <= 1.0)) throw Error("kappa must lie in (0, 1]");
    if (!(activation_threshold >= 0.0 && activation_threshold < 1.0)) {
        throw Error("activation threshold must lie in [0, 1)");
    }
}

namespace {

// Rounds half away from zero after snapping away last-bit noise, so mirrored
// offsets land on mirrored nodes.
int symmetric_round(double v)
{
    return static_cast<int>(std::round(std::nearbyint(v * 1e8) / 1e8));
}

Node nearest_node(Node centre, Vec2 offset, double h)
{
    return {centre.i + symmetric_round(offset.x / h), centre.j + symmetric_round(offset.y / h)};
}

// Lower-left corners of the closed grid cells containing a 1-D offset (two at a vertex).
std::array<int, 2> cell_span(double v)
{
    const double snapped = std::nearbyint(v * 1e8) / 1e8;
    return {static_cast<int>(std::ceil(snapped)) - 1, static_cast<int>(std::floor(snapped))};
}

// Omega in the continuum is the union of closed grid cells whose four corners
// are members, so boundary nodes sit on its edge.
bool inside_cells(const TumourRegion& region, Node centre, Vec2 offset, double h)
{
    const auto [a0, a1] = cell_span(offset.x / h);
    const auto [b0, b1] = cell_span(offset.y / h);
    for (int b : {b0, b1}) {
        for (int a : {a0, a1}) {
            const int i = centre.i + a, j = centre.j + b;
            if (region.contains(i, j) && region.contains(i + 1, j) && region.contains(i, j + 1) &&
                region.contains(i + 1, j + 1)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

Vec2 BoundaryMicroDomain::offset(int p, int q) const
{
    const double d = spacing();
    const double mid = 0.5 * (nodes_per_side - 1);
    return {(p - mid) * d, (q - mid) * d};
}

std::vector<BoundaryMicroDomain> cover_boundary(const TumourRegion& region, double epsilon, int nodes_per_side)
{
    if (nodes_per_side < 3) {
        throw Error("MDE patch needs at least 3 nodes per side");
    }
    const std::vector<Node> boundary = extract_boundary(region);
    const Grid& g = region.grid();
    const int n = g.size();
    const double h = g.spacing();
    const int reach = static_cast<int>(std::floor(0.5 * epsilon / h + 1e-9));

    std::vector<std::uint8_t> is_boundary(g.node_count(), 0);
    for (Node b : boundary) {
        is_boundary[g.index(b)] = 1;
    }
    std::vector<std::uint8_t> covered(g.node_count(), 0);
    std::vector<std::uint8_t> chosen(g.node_count(), 0);
    std::vector<Node> centres;

    auto choose = [&](Node c) {
        if (chosen[g.index(c)]) return;
        chosen[g.index(c)] = 1;
        centres.push_back(c);
        for (int dj = -reach; dj <= reach; ++dj) {
            for (int di = -reach; di <= reach; ++di) {
                if (g.contains(c.i + di, c.j + dj)) covered[g.index(c.i + di, c.j + dj)] = 1;
            }
        }
    };

    for (Node b : boundary) {
        if (covered[g.index(b)]) {
            continue;
        }
        const int ri = n - 1 - b.i, rj = n - 1 - b.j;
        const std::array<Node, 8> orbit = {{{b.i, b.j}, {ri, b.j}, {b.i, rj}, {ri, rj},
                                            {b.j, b.i}, {rj, b.i}, {b.j, ri}, {rj, ri}}};
        for (Node o : orbit) {
            if (is_boundary[g.index(o)]) choose(o);
        }
    }

    std::vector<BoundaryMicroDomain> bundle;
    bundle.reserve(centres.size());
    for (Node c : centres) {
        BoundaryMicroDomain dom;
        dom.centre = c;
        dom.centre_position = g.position(c);
        dom.side = epsilon;
        dom.nodes_per_side = nodes_per_side;
        dom.inside.assign(static_cast<std::size_t>(nodes_per_side) * nodes_per_side, 0);
        for (int q = 0; q < nodes_per_side; ++q) {
            for (int p = 0; p < nodes_per_side; ++p) {
                dom.inside[dom.index(p, q)] = inside_cells(region, c, dom.offset(p, q), h) ? 1 : 0;
            }
        }
        bundle.push_back(std::move(dom));
    }
    return bundle;
}

std::vector<double> mde_source(const BoundaryMicroDomain& dom, const ScalarField& c, const ScalarField& i,
                               const TumourRegion& region, double gamma_c, double gamma_i, double source_radius)
{
    if (!(source_radius > 0.0)) {
        throw Error("MDE source radius must be positive");
    }
    const Grid& g = region.grid();
    const double h = g.spacing();
    const int p_count = dom.nodes_per_side;
    std::vector<double> out(static_cast<std::size_t>(p_count) * p_count, 0.0);
    for (int q = 0; q < p_count; ++q) {
        for (int p = 0; p < p_count; ++p) {
            if (!dom.inside[dom.index(p, q)]) {
                continue;
            }
            const Vec2 z = dom.centre_position + dom.offset(p, q);
            const int i0 = static_cast<int>(std::ceil((z.x - source_radius) / h - 1e-9));
            const int i1 = static_cast<int>(std::floor((z.x + source_radius) / h + 1e-9));
            const int j0 = static_cast<int>(std::ceil((z.y - source_radius) / h - 1e-9));
            const int j1 = static_cast<int>(std::floor((z.y + source_radius) / h + 1e-9));
            double sum = 0.0;
            int covered = 0;
            for (int jj = j0; jj <= j1; ++jj) {
                for (int ii = i0; ii <= i1; ++ii) {
                    if (!region.contains(ii, jj)) continue;
                    sum += gamma_c * c(ii, jj) + gamma_i * i(ii, jj);
                    ++covered;
                }
            }
            out[dom.index(p, q)] = covered > 0 ? sum / covered : 0.0;
        }
    }
    return out;
}

double patch_mass(const BoundaryMicroDomain& dom, const std::vector<double>& m)
{
    const int n = dom.nodes_per_side;
    const double d = dom.spacing();
    double sum = 0.0;
    for (int q = 0; q < n; ++q) {
        const double wq = (q == 0 || q == n - 1) ? 0.5 : 1.0;
        for (int p = 0; p < n; ++p) {
            const double wp = (p == 0 || p == n - 1) ? 0.5 : 1.0;
            sum += wp * wq * m[dom.index(p, q)];
        }
    }
    return sum * d * d;
}

struct MdeSolver::Factor {
    Eigen::SparseMatrix<double> matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

MdeSolver::MdeSolver(int nodes_per_side, double side, double diffusion, double duration, int steps)
    : p_(nodes_per_side), dtau_(duration / steps), steps_(steps), factor_(std::make_unique<Factor>())
{
    if (nodes_per_side < 3 || steps < 1 || !(side > 0.0) || !(duration >= 0.0) || !(diffusion >= 0.0)) {
        throw Error("MDE solver: invalid patch or time discretisation");
    }
    const double dz = side / (nodes_per_side - 1);
    const double a = dtau_ * diffusion / (dz * dz);
    const int n = nodes_per_side;
    std::vector<Eigen::Triplet<double>> entries;
    auto id = [n](int p, int q) { return q * n + p; };
    for (int q = 0; q < n; ++q) {
        for (int p = 0; p < n; ++p) {
            const int row = id(p, q);
            double diag = 1.0;
            // Mirror ghosts: an edge node sees its interior neighbour twice.
            const std::array<std::pair<int, int>, 4> nbrs = {{{p - 1, q}, {p + 1, q}, {p, q - 1}, {p, q + 1}}};
            for (auto [pp, qq] : nbrs) {
                if (pp < 0) pp = 1;
                if (pp >= n) pp = n - 2;
                if (qq < 0) qq = 1;
                if (qq >= n) qq = n - 2;
                entries.emplace_back(row, id(pp, qq), -a);
                diag += a;
            }
            entries.emplace_back(row, row, diag);
        }
    }
    factor_->matrix.resize(n * n, n * n);
    factor_->matrix.setFromTriplets(entries.begin(), entries.end());
    factor_->matrix.makeCompressed();
    factor_->lu.analyzePattern(factor_->matrix);
    factor_->lu.factorize(factor_->matrix);
    if (factor_->lu.info() != Eigen::Success) {
        throw Error("MDE solver: factorisation failed: " + factor_->lu.lastErrorMessage());
    }
}

MdeSolver::~MdeSolver() = default;
MdeSolver::MdeSolver(MdeSolver&&) noexcept = default;
MdeSolver& MdeSolver::operator=(MdeSolver&&) noexcept = default;

std::vector<double> MdeSolver::advance(const std::vector<double>& m, const std::vector<double>& source) const
{
    const auto size = static_cast<std::size_t>(p_) * p_;
    if (m.size() != size || source.size() != size) {
        throw Error("MDE solver: field size does not match the patch");
    }
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(size));
    for (std::size_t k = 0; k < size; ++k) {
        rhs[static_cast<Eigen::Index>(k)] = m[k] + dtau_ * source[k];
    }
    const Eigen::VectorXd x = factor_->lu.solve(rhs);
    if (factor_->lu.info() != Eigen::Success || !x.allFinite()) {
        throw Error("MDE solver: linear solve failed");
    }
    std::vector<double> out(size);
    for (std::size_t k = 0; k < size; ++k) {
        // The operator is an M-matrix, so only round-off can go negative.
        out[k] = std::max(0.0, x[static_cast<Eigen::Index>(k)]);
    }
    return out;
}

std::vector<double> MdeSolver::solve(const std::vector<double>& source) const
{
    std::vector<double> m(source.size(), 0.0);
    for (int s = 0; s < steps_; ++s) {
        m = advance(m, source);
    }
    return m;
}

BoundaryRelocation boundary_relocation(const BoundaryMicroDomain& dom, const std::vector<double>& m,
                                       double activation_threshold, double kappa)
{
    BoundaryRelocation out;
    out.origin = dom.centre;
    const int n = dom.nodes_per_side;
    const double total = patch_mass(dom, m);
    if (!(total > 0.0)) {
        return out;
    }
    double outside = 0.0;
    Vec2 moment;
    for (int q = 0; q < n; ++q) {
        const double wq = (q == 0 || q == n - 1) ? 0.5 : 1.0;
        for (int p = 0; p < n; ++p) {
            if (dom.inside[dom.index(p, q)]) continue;
            const double wp = (p == 0 || p == n - 1) ? 0.5 : 1.0;
            const double w = wp * wq * m[dom.index(p, q)];
            outside += w;
            moment += w * dom.offset(p, q);
        }
    }
    const double d = dom.spacing();
    outside *= d * d;
    const double len = moment.norm();
    if (!(outside > 0.0) || len == 0.0) {
        return out;
    }
    const double fraction = std::min(1.0, outside / total);
    out.direction = {moment.x / len, moment.y / len};
    out.displacement = kappa * fraction * dom.side;
    out.active = fraction > activation_threshold;
    return out;
}

TumourRegion expand_tumour(const TumourRegion& region, const std::vector<BoundaryRelocation>& relocations)
{
    const Grid& g = region.grid();
    const double h = g.spacing();
    constexpr int kSamples = 32;
    std::vector<Node> added;
    for (const BoundaryRelocation& r : relocations) {
        if (!r.active || r.displacement <= 0.0) {
            continue;
        }
        for (int k = 1; k <= kSamples; ++k) {
            const double s = r.displacement * k / kSamples;
            const Node target = nearest_node(r.origin, s * r.direction, h);
            if (g.contains(target) && !region.contains(target)) {
                added.push_back(target);
            }
        }
    }
    return expand_region(region, added);
}

}  // namespace ovsim
