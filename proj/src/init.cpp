#include "ovsim/init.hpp"

#include <algorithm>
#include <numbers>

namespace ovsim {

double standard_mollifier(Vec2 x, double gamma)
{
    const double r2 = (x.x * x.x + x.y * x.y) / (gamma * gamma);
    if (r2 >= 1.0) {
        return 0.0;
    }
    return std::exp(1.0 / (r2 - 1.0)) / (gamma * gamma);
}

ScalarField mollify(const ScalarField& f, double gamma)
{
    const Grid& g = f.grid();
    const double h = g.spacing();
    const int reach = static_cast<int>(std::ceil(gamma / h));
    struct Tap {
        int di, dj;
        double w;
    };
    std::vector<Tap> taps;
    double total = 0.0;
    for (int dj = -reach; dj <= reach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
            const double w = standard_mollifier({di * h, dj * h}, gamma);
            if (w > 0.0) {
                taps.push_back({di, dj, w});
                total += w;
            }
        }
    }
    ScalarField out(g);
    for (int j = 0; j < g.size(); ++j) {
        for (int i = 0; i < g.size(); ++i) {
            double sum = 0.0;
            for (const Tap& t : taps) {
                // Zero extension beyond the frame.
                if (g.contains(i + t.di, j + t.dj)) {
                    sum += t.w * f(i + t.di, j + t.dj);
                }
            }
            out(i, j) = sum / total;
        }
    }
    return out;
}

double ecm_pattern(Vec2 x)
{
    constexpr double xi = 7.0 * std::numbers::pi;
    const double z1 = (x.x + 1.5) / 3.0;
    const double z2 = (x.y + 1.5) / 3.0;
    const double s = std::sin(xi * z1 * z2);
    return 0.5 + 0.25 * s * s * s * std::sin(xi * z2 / z1);
}

ModelState init_state(const RunConfig& config)
{
    config.validate(true);
    const Grid grid = Grid::build(config.extent, config.spacing);
    const double h = grid.spacing();
    const double gamma = 0.25 * h;
    const Vec2 centre{0.5 * config.extent, 0.5 * config.extent};
    const double rf = config.params.fibre_ratio;

    ScalarField ball(grid);
    for (int j = 0; j < grid.size(); ++j) {
        for (int i = 0; i < grid.size(); ++i) {
            ball(i, j) = (grid.position(i, j) - centre).norm() <= 0.5 - gamma ? 1.0 : 0.0;
        }
    }
    const ScalarField cutoff = mollify(ball, gamma);

    ModelState m{grid, StateVector(grid), TumourRegion(grid), {}, {}};
    ScalarField ecm(grid);
    ScalarField phi(grid);
    ScalarField injected(grid);
    for (int j = 0; j < grid.size(); ++j) {
        for (int i = 0; i < grid.size(); ++i) {
            const Vec2 x = grid.position(i, j);
            const double r2 = (x - centre).norm() * (x - centre).norm();
            const double bump = std::exp(-r2 / (2.0 * h));
            // The Gaussian difference turns negative just inside the cutoff ball.
            const double c0 = std::max(0.0, 0.5 * (bump - std::exp(-3.0625)) * cutoff(i, j));
            m.state.c(i, j) = c0;
            if (c0 > 0.0) {
                m.region.insert({i, j});
            }
            ecm(i, j) = 0.5 * std::min(ecm_pattern(x), 1.0 - c0);
            phi(i, j) = 0.125 * (bump - std::exp(-1.6625));
            injected(i, j) = phi(i, j) > 5e-5 ? 1.0 : 0.0;
        }
    }
    if (m.region.empty()) {
        throw Error("initial tumour is empty; h is too coarse for the initial aggregate");
    }
    const ScalarField smoothed = mollify(injected, gamma);
    ScalarField fibre_target(grid);
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
        m.state.v[k] = std::max(0.0, phi[k]) * smoothed[k];
        m.state.E[k] = (1.0 - rf) * ecm[k];
        fibre_target[k] = rf * ecm[k];
    }

    m.micro = seed_strip_pattern(fibre_target, config.micro.fibre_cells, config.micro.f_max_factor);
    if (config.micro.f_max > 0.0) {
        const auto& f = m.micro.data();
        const double peak = f.empty() ? 0.0 : *std::max_element(f.begin(), f.end());
        if (config.micro.f_max < peak) {
            throw Error("micro: f_max is below the initial micro-fibre peak");
        }
        m.micro.set_f_max(config.micro.f_max);
    }
    m.fibres = derive_orientation(m.micro);
    return m;
}

}  // namespace ovsim
