#include "ovsim/adhesion.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numbers>
#include <utility>

namespace ovsim {

void AdhesionStrengths::validate() const
{
    const std::pair<const char*, double> all[] = {{"S_cc", cc_max}, {"S_ci", ci_max}, {"S_ic", ic_max},
                                                  {"S_ii", ii_max}, {"S_ce", ce},     {"S_ie", ie},
                                                  {"S_cF", cF},     {"S_iF", iF}};
    for (const auto& [name, value] : all) {
        if (!std::isfinite(value) || value < 0.0) {
            throw Error(std::string("adhesion strength ") + name + " must be finite and >= 0");
        }
    }
}

double adhesion_strength(double E, double s_max)
{
    const double e = std::clamp(E, 0.0, 1.0);
    const double d = 1.0 - (1.0 - e) * (1.0 - e);
    if (d <= 0.0) {
        return 0.0;
    }
    return s_max * std::exp(1.0 - 1.0 / d);
}

double adhesion_kernel(double r, double radius)
{
    return 3.0 / (2.0 * std::numbers::pi * radius * radius) * (1.0 - r / (2.0 * radius));
}

SensingStencil SensingStencil::build(double radius, double spacing, int subsamples)
{
    if (!std::isfinite(radius) || !std::isfinite(spacing) || spacing <= 0.0) {
        throw Error("sensing stencil: radius and spacing must be finite, spacing > 0");
    }
    if (radius < spacing * (1.0 - 1e-12)) {
        throw Error("sensing radius under-resolved");
    }
    if (subsamples < 2 || subsamples % 2 != 0) {
        throw Error("sensing stencil: subsamples must be an even number >= 2");
    }

    // Work in integer units of h / (2S): sample points sit at odd coordinates,
    // lattice nodes at multiples of 2S, so nearest-node distances compare exactly.
    const std::int64_t s = subsamples;
    const double ratio = radius / spacing;
    const double ratio2 = ratio * ratio * (1.0 + 1e-12);
    const int reach = static_cast<int>(std::ceil(ratio)) + 1;
    const double ball2 = (ratio * 2.0 * s) * (ratio * 2.0 * s);
    const double unit = spacing / (2.0 * s);
    const double sample_area = (spacing / s) * (spacing / s);

    std::vector<std::pair<int, int>> inside;
    for (int q = -reach; q <= reach; ++q) {
        for (int p = -reach; p <= reach; ++p) {
            if (double(p) * p + double(q) * q <= ratio2) {
                inside.emplace_back(p, q);
            }
        }
    }
    std::map<std::pair<int, int>, double> mass;
    for (const auto& pq : inside) {
        mass[pq] = 0.0;
    }

    for (int b = -reach; b <= reach; ++b) {
        for (int a = -reach; a <= reach; ++a) {
            for (std::int64_t kb = 0; kb < s; ++kb) {
                const std::int64_t y = b * 2 * s + (2 * kb + 1) - s;
                for (std::int64_t ka = 0; ka < s; ++ka) {
                    const std::int64_t x = a * 2 * s + (2 * ka + 1) - s;
                    const double r2 = double(x) * x + double(y) * y;
                    if (r2 > ball2) {
                        continue;
                    }
                    const double value = adhesion_kernel(std::sqrt(r2) * unit, radius) * sample_area;
                    auto it = mass.find({a, b});
                    if (it != mass.end()) {
                        it->second += value;
                        continue;
                    }
                    // The enclosing lattice cell is outside the ball: share among
                    // the nearest in-ball samples.
                    std::int64_t best = INT64_MAX;
                    std::vector<std::pair<int, int>> ties;
                    for (const auto& [p, q] : inside) {
                        const std::int64_t dx = x - p * 2 * s, dy = y - q * 2 * s;
                        const std::int64_t d2 = dx * dx + dy * dy;
                        if (d2 < best) {
                            best = d2;
                            ties.assign(1, {p, q});
                        } else if (d2 == best) {
                            ties.emplace_back(p, q);
                        }
                    }
                    for (const auto& pq : ties) {
                        mass[pq] += value / static_cast<double>(ties.size());
                    }
                }
            }
        }
    }

    SensingStencil out;
    out.radius_ = radius;
    out.spacing_ = spacing;
    for (const auto& [p, q] : inside) {
        // Copy the canonical octant value so the weights are exactly symmetric.
        const int u = std::max(std::abs(p), std::abs(q)), v = std::min(std::abs(p), std::abs(q));
        StencilEntry e;
        e.di = p;
        e.dj = q;
        e.offset = {p * spacing, q * spacing};
        const double len = e.offset.norm();
        e.radial = len > 0.0 ? Vec2{e.offset.x / len, e.offset.y / len} : Vec2{};
        e.weight = mass.at({u, v});
        out.entries_.push_back(e);
    }
    return out;
}

double SensingStencil::kernel_sum() const
{
    double sum = 0.0;
    for (const auto& e : entries_) {
        sum += e.weight;
    }
    return sum;
}

Vec2 fibre_biased_direction(Vec2 y, Vec2 theta)
{
    if (y.x == 0.0 && y.y == 0.0) {
        return {};
    }
    const Vec2 s = y + theta;
    const double len = s.norm();
    if (len == 0.0) {
        return {};
    }
    return {s.x / len, s.y / len};
}

VectorField eval_adhesion_flux(Population which, const StateVector& state, const OrientedFibreField& fibres,
                               const ScalarField& volume_fraction, const TumourRegion& region,
                               const SensingStencil& stencil, const AdhesionStrengths& strengths)
{
    const Grid& g = state.grid();
    const bool uninfected = which == Population::uninfected;
    const double s_c = uninfected ? strengths.cc_max : strengths.ic_max;
    const double s_i = uninfected ? strengths.ci_max : strengths.ii_max;
    const double s_e = uninfected ? strengths.ce : strengths.ie;
    const double s_f = uninfected ? strengths.cF : strengths.iF;

    // Per-sample integrand factors; zero outside the region (chi_Omega).
    const std::size_t count = g.node_count();
    std::vector<double> cell_ecm(count, 0.0);
    std::vector<double> fibre(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        if (!region.contains_index(k)) {
            continue;
        }
        const double room = std::max(0.0, 1.0 - volume_fraction[k]);
        if (room == 0.0) {
            continue;
        }
        const double E = state.E[k];
        const double tc = adhesion_strength(E, s_c) * state.c[k] + adhesion_strength(E, s_i) * state.i[k];
        cell_ecm[k] = room * (tc + s_e * E);
        fibre[k] = room * s_f * fibres.F[k];
    }

    VectorField out(g);
    const auto& entries = stencil.entries();
    const double prefactor = 1.0 / stencil.radius();
    const int n = g.size();
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < static_cast<long>(count); ++idx) {
        const auto k = static_cast<std::size_t>(idx);
        if (!region.contains_index(k)) {
            continue;
        }
        const Node x = g.node(k);
        Vec2 sum;
        for (const StencilEntry& e : entries) {
            const int si = x.i + e.di, sj = x.j + e.dj;
            if (si < 0 || sj < 0 || si >= n || sj >= n) {
                continue;
            }
            const std::size_t sk = g.index(si, sj);
            const double t = cell_ecm[sk];
            const double f = fibre[sk];
            if (t != 0.0) {
                sum += (e.weight * t) * e.radial;
            }
            if (f != 0.0) {
                sum += (e.weight * f) * fibre_biased_direction(e.offset, fibres.theta[sk]);
            }
        }
        out[k] = prefactor * sum;
    }
    return out;
}

}  // namespace ovsim
