#include "ovsim/macro.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <sstream>
#include <utility>

namespace ovsim {

void ParameterSet::validate() const
{
    const std::pair<const char*, double> rates[] = {
        {"D_c", D_c},         {"D_i", D_i},         {"D_v", D_v},           {"D_m", D_m},
        {"eta_i", eta_i},     {"eta_v", eta_v},     {"mu_1", mu_1},         {"mu_2", mu_2},
        {"alpha_c", alpha_c}, {"alpha_i", alpha_i}, {"alpha_cF", alpha_cF}, {"alpha_iF", alpha_iF},
        {"rho", infection_rate}, {"delta_i", delta_i}, {"delta_v", delta_v}, {"b", b},
        {"gamma_c", gamma_c}, {"gamma_i", gamma_i}};
    for (const auto& [name, value] : rates) {
        if (!std::isfinite(value) || value < 0.0) {
            throw Error(std::string("parameter ") + name + " must be finite and >= 0");
        }
    }
    if (!(nu_e > 0.0) || !(nu_c > 0.0) || !std::isfinite(nu_e) || !std::isfinite(nu_c)) {
        throw Error("parameters nu_e and nu_c must be positive");
    }
    if (!(fibre_ratio >= 0.0 && fibre_ratio < 1.0)) {
        throw Error("parameter R_F must lie in [0, 1)");
    }
    if (!(sensing_radius > 0.0) || !std::isfinite(sensing_radius)) {
        throw Error("parameter R must be positive");
    }
    adhesion.validate();
}

std::string to_string(InfectedFlux mode)
{
    return mode == InfectedFlux::local ? "local" : "nonlocal";
}

InfectedFlux parse_infected_flux(const std::string& text)
{
    if (text == "local") return InfectedFlux::local;
    if (text == "nonlocal") return InfectedFlux::nonlocal;
    throw Error("infected flux mode must be 'local' or 'nonlocal', got '" + text + "'");
}

ScalarField volume_fraction(const StateVector& state, const ScalarField& F, double nu_e, double nu_c)
{
    ScalarField rho(state.grid());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        rho[k] = nu_e * (state.E[k] + F[k]) + nu_c * (state.c[k] + state.i[k]);
    }
    return rho;
}

MacroSolver::MacroSolver(const Grid& grid, ParameterSet params, InfectedFlux mode)
    : grid_(grid), params_(std::move(params)), mode_(mode)
{
    params_.validate();
    stencil_ = SensingStencil::build(params_.sensing_radius, grid_.spacing());
}

double MacroSolver::diffusion_limit() const
{
    const double d = std::max({params_.D_c, params_.D_i, params_.D_v});
    if (d <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double h = grid_.spacing();
    return 0.2 * h * h / d;
}

namespace {

constexpr std::array<std::pair<int, int>, 4> kFaces = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

bool any_positive(std::initializer_list<double> values)
{
    return std::any_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
}

/// Outward normal component of a face-averaged node velocity.
double face_velocity(const VectorField& vel, std::size_t from, std::size_t to, int di, int dj)
{
    const Vec2 a = vel[from], b = vel[to];
    return di != 0 ? 0.5 * di * (a.x + b.x) : 0.5 * dj * (a.y + b.y);
}

double upwind(double w, double here, double there)
{
    return w > 0.0 ? w * here : w * there;
}

void check_finite(const ScalarField& f, const char* name, const char* what = "derivative of ")
{
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!std::isfinite(f[k])) {
            const Node n = f.grid().node(k);
            std::ostringstream msg;
            msg << "non-finite " << what << name << " at node (" << n.i << "," << n.j << ")";
            throw Error(msg.str());
        }
    }
}

}  // namespace

Derivatives MacroSolver::rhs(const StateVector& s, const OrientedFibreField& fibres, const TumourRegion& region) const
{
    check_finite(s.c, "c", "");
    check_finite(s.i, "i", "");
    check_finite(s.E, "E", "");
    check_finite(s.v, "v", "");
    const Grid& g = grid_;
    const ParameterSet& p = params_;
    const double h = g.spacing();
    const double h2 = h * h;
    const int n = g.size();
    const auto count = static_cast<long>(g.node_count());

    const ScalarField rho = volume_fraction(s, fibres.F, p.nu_e, p.nu_c);
    ScalarField e(g);
    for (std::size_t k = 0; k < e.size(); ++k) {
        e[k] = s.E[k] + fibres.F[k];
    }

    const AdhesionStrengths& a = p.adhesion;
    VectorField adhesion_c(g);
    if (any_positive({a.cc_max, a.ci_max, a.ce, a.cF})) {
        adhesion_c = eval_adhesion_flux(Population::uninfected, s, fibres, rho, region, stencil_, a);
    }
    VectorField adhesion_i(g);
    const bool nonlocal = mode_ == InfectedFlux::nonlocal;
    if (nonlocal && any_positive({a.ic_max, a.ii_max, a.ie, a.iF})) {
        adhesion_i = eval_adhesion_flux(Population::infected, s, fibres, rho, region, stencil_, a);
    }

    Derivatives d{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g), 0.0, 0.0};
    std::vector<double> speed(g.node_count(), 0.0);
    std::vector<double> rate(g.node_count(), 0.0);

#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < count; ++idx) {
        const auto k = static_cast<std::size_t>(idx);
        const Node x = g.node(k);
        const bool member = region.contains_index(k);
        const double c = s.c[k], inf = s.i[k], E = s.E[k], v = s.v[k];
        const double room = 1.0 - rho[k];

        // Per-face terms, summed as (west + east) + (south + north).
        std::array<double, 4> tc{}, ti{}, tv{};
        double fastest = 0.0;
        for (std::size_t f = 0; f < kFaces.size(); ++f) {
            const auto [di, dj] = kFaces[f];
            const int ni = x.i + di, nj = x.j + dj;
            if (ni < 0 || nj < 0 || ni >= n || nj >= n) {
                continue;
            }
            const std::size_t nb = g.index(ni, nj);
            const double hapto = (e[nb] - e[k]) / h;

            const double wv = p.eta_v * hapto;
            tv[f] = p.D_v * (s.v[nb] - v) / h2 - upwind(wv, v, s.v[nb]) / h;
            fastest = std::max(fastest, std::abs(wv));

            if (!member || !region.contains_index(nb)) {
                continue;
            }
            const double wc = face_velocity(adhesion_c, k, nb, di, dj);
            tc[f] = p.D_c * (s.c[nb] - c) / h2 - upwind(wc, c, s.c[nb]) / h;
            const double wi = nonlocal ? face_velocity(adhesion_i, k, nb, di, dj) : p.eta_i * hapto;
            ti[f] = p.D_i * (s.i[nb] - inf) / h2 - upwind(wi, inf, s.i[nb]) / h;
            fastest = std::max({fastest, std::abs(wc), std::abs(wi)});
        }
        const double infection = p.infection_rate * c * v;

        d.v[k] = ((tv[0] + tv[1]) + (tv[2] + tv[3])) + p.b * inf - infection - p.delta_v * v;
        d.E[k] = -E * (p.alpha_c * c + p.alpha_i * inf) + p.mu_2 * E * room;
        if (member) {
            d.c[k] = ((tc[0] + tc[1]) + (tc[2] + tc[3])) + p.mu_1 * c * room - infection;
            d.i[k] = ((ti[0] + ti[1]) + (ti[2] + ti[3])) + infection - p.delta_i * inf;
        }
        speed[k] = fastest;
        rate[k] = (p.mu_1 + p.mu_2) * std::abs(room) + p.infection_rate * (v + c) + p.delta_i + p.delta_v +
                  p.alpha_c * c + p.alpha_i * inf;
    }

    check_finite(d.c, "c");
    check_finite(d.i, "i");
    check_finite(d.E, "E");
    check_finite(d.v, "v");
    d.max_speed = *std::max_element(speed.begin(), speed.end());
    d.max_rate = *std::max_element(rate.begin(), rate.end());
    return d;
}

namespace {

void axpy(StateVector& out, const StateVector& base, double dt, const Derivatives& d)
{
    for (std::size_t k = 0; k < base.c.size(); ++k) {
        out.c[k] = base.c[k] + dt * d.c[k];
        out.i[k] = base.i[k] + dt * d.i[k];
        out.E[k] = base.E[k] + dt * d.E[k];
        out.v[k] = base.v[k] + dt * d.v[k];
    }
}

}  // namespace

MacroStepReport MacroSolver::step(StateVector& state, const OrientedFibreField& fibres, const TumourRegion& region,
                                  double dt_stage, double substep) const
{
    if (!(dt_stage >= 0.0) || !std::isfinite(dt_stage)) {
        throw Error("macro step: stage length must be finite and >= 0");
    }
    if (!(substep >= 0.0) || !std::isfinite(substep)) {
        throw Error("macro step: substep must be finite and >= 0");
    }
    MacroStepReport report;
    report.mean_c = ScalarField(grid_);
    report.mean_i = ScalarField(grid_);
    if (dt_stage == 0.0) {
        report.mean_c = state.c;
        report.mean_i = state.i;
        return report;
    }

    const double h = grid_.spacing();
    const double d_max = std::max({params_.D_c, params_.D_i, params_.D_v});
    const double tol = 1e-12 * std::max(1.0, dt_stage);
    StateVector half = state;
    double t = 0.0;
    while (dt_stage - t > tol) {
        const Derivatives k1 = rhs(state, fibres, region);
        double dt = dt_stage - t;
        if (substep > 0.0) {
            dt = std::min(dt, substep);
            const bool unstable = 4.0 * d_max * substep > h * h || k1.max_speed * substep > h ||
                                  k1.max_rate * substep > 2.0;
            if (unstable) {
                std::ostringstream msg;
                msg << "CFL violation at substep " << substep << " (max speed " << k1.max_speed
                    << ", max rate " << k1.max_rate << "); use a smaller substep";
                throw CflError(msg.str());
            }
        } else {
            dt = std::min(dt, diffusion_limit());
            if (k1.max_speed > 0.0) dt = std::min(dt, 0.4 * h / k1.max_speed);
            if (k1.max_rate > 0.0) dt = std::min(dt, 0.25 / k1.max_rate);
        }

        axpy(half, state, 0.5 * dt, k1);
        const Derivatives k2 = rhs(half, fibres, region);
        for (std::size_t k = 0; k < state.c.size(); ++k) {
            report.mean_c[k] += 0.5 * dt * state.c[k];
            report.mean_i[k] += 0.5 * dt * state.i[k];
        }
        axpy(state, state, dt, k2);
        report.clamped_mass += clamp_negative(state.c) + clamp_negative(state.i) + clamp_negative(state.E) +
                               clamp_negative(state.v);
        restrict_to(state.c, region);
        restrict_to(state.i, region);
        for (std::size_t k = 0; k < state.c.size(); ++k) {
            report.mean_c[k] += 0.5 * dt * state.c[k];
            report.mean_i[k] += 0.5 * dt * state.i[k];
        }
        t += dt;
        ++report.substeps;
    }
    for (std::size_t k = 0; k < state.c.size(); ++k) {
        report.mean_c[k] /= t;
        report.mean_i[k] /= t;
    }
    return report;
}

VectorField MacroSolver::total_cell_flux(const StateVector& s, const OrientedFibreField& fibres,
                                         const TumourRegion& region) const
{
    const Grid& g = grid_;
    const ParameterSet& p = params_;
    const ScalarField rho = volume_fraction(s, fibres.F, p.nu_e, p.nu_c);
    const AdhesionStrengths& a = p.adhesion;
    const VectorField adhesion_c = eval_adhesion_flux(Population::uninfected, s, fibres, rho, region, stencil_, a);
    const bool nonlocal = mode_ == InfectedFlux::nonlocal;
    VectorField adhesion_i(g);
    if (nonlocal) {
        adhesion_i = eval_adhesion_flux(Population::infected, s, fibres, rho, region, stencil_, a);
    }
    ScalarField e(g);
    for (std::size_t k = 0; k < e.size(); ++k) {
        e[k] = s.E[k] + fibres.F[k];
    }

    VectorField out(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!region.contains_index(k)) {
            continue;
        }
        const Node x = g.node(k);
        const Vec2 flux_c = p.D_c * masked_gradient(s.c, region, x.i, x.j) - s.c[k] * adhesion_c[k];
        const Vec2 directed = nonlocal ? s.i[k] * adhesion_i[k] : (p.eta_i * s.i[k]) * gradient(e, x.i, x.j);
        const Vec2 flux_i = p.D_i * masked_gradient(s.i, region, x.i, x.j) - directed;
        out[k] = flux_c + flux_i;
    }
    return out;
}

}  // namespace ovsim
