#include "ovsim/fibre.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>

namespace ovsim {

MicroFibreField::MicroFibreField(const Grid& grid, int cells_per_side, double f_max)
    : grid_(grid), m_(cells_per_side), f_max_(f_max)
{
    if (cells_per_side < 1) {
        throw Error("micro-fibre field: at least one micro cell per side required");
    }
    if (!(f_max > 0.0)) {
        throw Error("micro-fibre field: f_max must be positive");
    }
    const auto n = static_cast<std::size_t>(lattice_size());
    f_.assign(n * n, 0.0);
}

void MicroFibreField::set_f_max(double f_max)
{
    if (!(f_max > 0.0)) {
        throw Error("micro-fibre field: f_max must be positive");
    }
    f_max_ = f_max;
}

Vec2 MicroFibreField::cell_centre(int a, int b) const
{
    const double d = cell_size();
    const double h = grid_.spacing();
    return {-0.5 * h + (a + 0.5) * d, -0.5 * h + (b + 0.5) * d};
}

Vec2 MicroFibreField::local_offset(int p, int q) const
{
    const double d = cell_size();
    const double h = grid_.spacing();
    return {-0.5 * h + (p + 0.5) * d, -0.5 * h + (q + 0.5) * d};
}

bool MicroFibreField::locate(Vec2 point, int& a, int& b) const
{
    const double h = grid_.spacing();
    const double d = cell_size();
    const double fa = std::floor((point.x + 0.5 * h) / d);
    const double fb = std::floor((point.y + 0.5 * h) / d);
    if (fa < 0 || fb < 0 || fa >= lattice_size() || fb >= lattice_size()) {
        return false;
    }
    a = static_cast<int>(fa);
    b = static_cast<int>(fb);
    return true;
}

double MicroFibreField::total_mass() const
{
    double sum = 0.0;
    for (double v : f_) {
        sum += v;
    }
    return sum;
}

double MicroFibreField::domain_mass(Node n) const
{
    double sum = 0.0;
    for (int q = 0; q < m_; ++q) {
        for (int p = 0; p < m_; ++p) {
            sum += local(n, p, q);
        }
    }
    return sum;
}

Vec2 barycentral_orientation(const MicroFibreField& field, Node anchor)
{
    const int m = field.cells_per_side();
    double mass = 0.0;
    Vec2 moment;
    for (int q = 0; q < m; ++q) {
        for (int p = 0; p < m; ++p) {
            const double f = field.local(anchor, p, q);
            mass += f;
            moment += f * field.local_offset(p, q);
        }
    }
    if (mass <= 0.0) {
        return {};
    }
    return {moment.x / mass, moment.y / mass};
}

FibreOrientation macro_fibre_orientation(const MicroFibreField& field, Node anchor)
{
    const Vec2 bary = barycentral_orientation(field, anchor);
    const double len = bary.norm();
    // Round-off from a symmetric distribution is not a direction.
    if (len <= 1e-12 * field.cell_size()) {
        return {};
    }
    const int m = field.cells_per_side();
    // Midpoint quadrature: integral f dz / lambda(sigmaY) is the plain mean.
    const double mean = field.domain_mass(anchor) / (static_cast<double>(m) * m);
    FibreOrientation out;
    out.theta = {mean * bary.x / len, mean * bary.y / len};
    out.F = out.theta.norm();
    return out;
}

OrientedFibreField derive_orientation(const MicroFibreField& field)
{
    const Grid& g = field.grid();
    OrientedFibreField out(g);
    const auto count = static_cast<long>(g.node_count());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < count; ++k) {
        const FibreOrientation o = macro_fibre_orientation(field, g.node(static_cast<std::size_t>(k)));
        out.theta[static_cast<std::size_t>(k)] = o.theta;
        out.F[static_cast<std::size_t>(k)] = o.F;
    }
    return out;
}

Vec2 rearrangement_vector(Vec2 total_flux, double c_total, Vec2 theta, double F)
{
    const double denom = c_total + F;
    if (!(denom > 0.0)) {
        return {};
    }
    const double w = c_total / denom;
    return w * total_flux + (1.0 - w) * theta;
}

namespace {

struct Transfer {
    std::size_t from;
    std::size_t to;
    double amount;
};

}  // namespace

RelocationReport relocate_microfibres(MicroFibreField& field, const std::vector<Node>& anchors,
                                      const VectorField& rearrangement)
{
    const int m = field.cells_per_side();
    const int size = field.lattice_size();
    const double f_max = field.f_max();
    const std::vector<double> before = field.data();

    std::vector<std::vector<Transfer>> planned(anchors.size());
    std::vector<std::size_t> truncated(anchors.size(), 0);

#pragma omp parallel for schedule(dynamic, 4)
    for (long k = 0; k < static_cast<long>(anchors.size()); ++k) {
        const Node x = anchors[static_cast<std::size_t>(k)];
        const Vec2 r = rearrangement(x.i, x.j);
        if (!std::isfinite(r.x) || !std::isfinite(r.y)) {
            continue;
        }
        const Vec2 anchor = field.grid().position(x);
        // Targets are confined to the 8-neighbour ring of domains.
        const int lo_a = std::max(0, (x.i - 1) * m), hi_a = std::min(size - 1, (x.i + 2) * m - 1);
        const int lo_b = std::max(0, (x.j - 1) * m), hi_b = std::min(size - 1, (x.j + 2) * m - 1);
        auto& out = planned[static_cast<std::size_t>(k)];
        for (int q = 0; q < m; ++q) {
            for (int p = 0; p < m; ++p) {
                const int a = x.i * m + p, b = x.j * m + q;
                const std::size_t src = field.index(a, b);
                const double f = before[src];
                if (!(f > 0.0)) {
                    continue;
                }
                const Vec2 dir = field.local_offset(p, q);
                const double saturation = f / f_max;
                const double scale = f * (f_max - f) / (saturation + (r - dir).norm());
                const Vec2 target = anchor + dir + scale * (dir + r);

                const double d = field.cell_size();
                const double h = field.grid().spacing();
                double ta = std::floor((target.x + 0.5 * h) / d);
                double tb = std::floor((target.y + 0.5 * h) / d);
                const double ca = std::clamp(ta, double(lo_a), double(hi_a));
                const double cb = std::clamp(tb, double(lo_b), double(hi_b));
                if (ca != ta || cb != tb) {
                    ++truncated[static_cast<std::size_t>(k)];
                }
                const std::size_t dst = field.index(static_cast<int>(ca), static_cast<int>(cb));
                if (dst == src) {
                    continue;
                }
                const double p_move = std::max(0.0, (f_max - before[dst]) / f_max);
                const double amount = f * p_move;
                if (amount > 0.0) {
                    out.push_back({src, dst, amount});
                }
            }
        }
    }

    RelocationReport report;
    auto& f = field.data();
    for (std::size_t k = 0; k < planned.size(); ++k) {
        report.truncated += truncated[k];
        for (const Transfer& t : planned[k]) {
            const double moved = std::min({t.amount, f[t.from], f_max - f[t.to]});
            if (moved <= 0.0) {
                continue;
            }
            f[t.from] -= moved;
            f[t.to] += moved;
            report.moved_mass += moved;
            ++report.transfers;
        }
    }
    return report;
}

void apply_fibre_degradation(MicroFibreField& field, Node anchor, double c, double i,
                             double alpha_cF, double alpha_iF, double dt)
{
    const double rate = alpha_cF * c + alpha_iF * i;
    if (rate == 0.0 || dt == 0.0) {
        return;
    }
    const double factor = std::exp(-rate * dt);
    const int m = field.cells_per_side();
    for (int q = 0; q < m; ++q) {
        for (int p = 0; p < m; ++p) {
            field.local(anchor, p, q) *= factor;
        }
    }
}

void apply_fibre_degradation(MicroFibreField& field, const ScalarField& c, const ScalarField& i,
                             double alpha_cF, double alpha_iF, double dt)
{
    const Grid& g = field.grid();
    const auto count = static_cast<long>(g.node_count());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < count; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        apply_fibre_degradation(field, g.node(kk), c[kk], i[kk], alpha_cF, alpha_iF, dt);
    }
}

MicroFibreField seed_strip_pattern(const ScalarField& target, int cells_per_side, double cap_factor)
{
    const Grid& g = target.grid();
    const int m = cells_per_side;
    if (m < 3) {
        throw Error("micro-fibre pattern: at least 3 micro cells per side required");
    }
    // A vertical and a horizontal strip, both in the lower-left part of the
    // domain so the barycentre sits off the anchor.
    const int width = std::max(1, m / 5);
    const int start = std::max(0, m / 5);
    std::vector<double> pattern(static_cast<std::size_t>(m) * m, 0.0);
    double pattern_mean = 0.0;
    for (int q = 0; q < m; ++q) {
        for (int p = 0; p < m; ++p) {
            const bool strip = (p >= start && p < start + width) || (q >= start && q < start + width);
            pattern[static_cast<std::size_t>(q) * m + p] = strip ? 1.0 : 0.0;
            pattern_mean += strip ? 1.0 : 0.0;
        }
    }
    pattern_mean /= static_cast<double>(m) * m;

    MicroFibreField field(g, m, 1.0);
    double peak = 0.0;
    for (int j = 0; j < g.size(); ++j) {
        for (int i = 0; i < g.size(); ++i) {
            const double scale = std::max(0.0, target(i, j)) / pattern_mean;
            for (int q = 0; q < m; ++q) {
                for (int p = 0; p < m; ++p) {
                    const double v = scale * pattern[static_cast<std::size_t>(q) * m + p];
                    field.local({i, j}, p, q) = v;
                    peak = std::max(peak, v);
                }
            }
        }
    }
    field.set_f_max(peak > 0.0 ? cap_factor * peak : 1.0);
    return field;
}

void write_vector_field(const std::string& path, const OrientedFibreField& fibres)
{
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> out(std::fopen(path.c_str(), "w"), &std::fclose);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    const Grid& g = fibres.F.grid();
    std::fprintf(out.get(), "# x1 x2 theta1 theta2 F\n");
    for (int j = 0; j < g.size(); ++j) {
        for (int i = 0; i < g.size(); ++i) {
            const Vec2 x = g.position(i, j);
            const Vec2 t = fibres.theta(i, j);
            std::fprintf(out.get(), "%.17g %.17g %.17g %.17g %.17g\n", x.x, x.y, t.x, t.y, fibres.F(i, j));
        }
    }
    if (std::ferror(out.get())) {
        throw Error("write failed for '" + path + "'");
    }
}

}  // namespace ovsim
