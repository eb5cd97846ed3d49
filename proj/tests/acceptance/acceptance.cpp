// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ovsim/adhesion.hpp"
#include "ovsim/fibre.hpp"
#include "ovsim/macro.hpp"
#include "ovsim/mde.hpp"
#include "ovsim/simulation.hpp"

using namespace ovsim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ParameterSet transport_free()
{
    ParameterSet p;
    p.D_c = p.D_i = p.D_v = 0.0;
    p.eta_i = p.eta_v = 0.0;
    p.adhesion = AdhesionStrengths{0, 0, 0, 0, 0, 0, 0, 0};
    return p;
}

TumourRegion whole(const Grid& g)
{
    TumourRegion r(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) r.insert(g.node(k));
    return r;
}

// 1. Kernel normalisation.
Outcome kernel_normalisation()
{
    Outcome o{true, ""};
    for (double R : {0.1, 0.15, 0.3}) {
        const auto t0 = Clock::now();
        const SensingStencil st = SensingStencil::build(R, R / 8);
        const double dt = seconds_since(t0);
        const double err = std::abs(st.kernel_sum() - 1.0);
        o.pass = o.pass && err <= 1e-3 && dt < 1.0;
        o.detail += "R=" + fmt("%g", R) + " |sum-1|=" + fmt("%.2e", err) + " (" + fmt("%.3f", dt) + "s) ";
    }
    return o;
}

// 2. Adhesion-strength law.
Outcome strength_law()
{
    const auto t0 = Clock::now();
    const double smax = 0.1;
    bool ok = adhesion_strength(1.0, smax) == smax;
    bool monotone = true;
    double prev = adhesion_strength(0.0, smax);
    for (int k = 1; k < 1000; ++k) {
        const double v = adhesion_strength(k / 999.0, smax);
        monotone = monotone && v >= prev;
        prev = v;
    }
    const double ratio_err = std::abs(adhesion_strength(0.5, smax) / smax - std::exp(-1.0 / 3.0));
    const double dt = seconds_since(t0);
    return {ok && monotone && ratio_err <= 1e-12 && dt < 1.0,
            "S(1)=S_max " + std::string(ok ? "yes" : "no") + ", monotone " + (monotone ? "yes" : "no") +
                ", |S(0.5)/S_max-exp(-1/3)|=" + fmt("%.1e", ratio_err)};
}

// 3. ODE reduction against classical RK4.
Outcome ode_reduction()
{
    const auto t0 = Clock::now();
    const Grid g = Grid::build(1.0, 0.125);
    const ParameterSet p = transport_free();
    const MacroSolver solver(g, p, InfectedFlux::local);
    StateVector s(g);
    for (std::size_t k = 0; k < s.c.size(); ++k) {
        s.c[k] = 0.3;
        s.E[k] = 0.4;
        s.v[k] = 0.2;
    }
    // Accuracy, not stability, sets the step here.
    solver.step(s, OrientedFibreField(g), whole(g), 5.0, 0.005);

    using Y = std::array<double, 4>;
    auto f = [&](const Y& y) -> Y {
        const double c = y[0], i = y[1], E = y[2], v = y[3];
        const double rho = p.nu_e * E + p.nu_c * (c + i);
        return {p.mu_1 * c * (1 - rho) - p.infection_rate * c * v, p.infection_rate * c * v - p.delta_i * i,
                -E * (p.alpha_c * c + p.alpha_i * i) + p.mu_2 * E * (1 - rho),
                p.b * i - p.infection_rate * c * v - p.delta_v * v};
    };
    Y y{0.3, 0.0, 0.4, 0.2};
    const int n = 50000;
    const double h = 5.0 / n;
    for (int step = 0; step < n; ++step) {
        Y k1 = f(y), t{}, k2, k3, k4;
        for (int q = 0; q < 4; ++q) t[q] = y[q] + h / 2 * k1[q];
        k2 = f(t);
        for (int q = 0; q < 4; ++q) t[q] = y[q] + h / 2 * k2[q];
        k3 = f(t);
        for (int q = 0; q < 4; ++q) t[q] = y[q] + h * k3[q];
        k4 = f(t);
        for (int q = 0; q < 4; ++q) y[q] += h / 6 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
    }
    double err = 0.0;
    for (std::size_t k = 0; k < s.c.size(); ++k) {
        err = std::max({err, std::abs(s.c[k] - y[0]), std::abs(s.i[k] - y[1]), std::abs(s.E[k] - y[2]),
                        std::abs(s.v[k] - y[3])});
    }
    const double dt = seconds_since(t0);
    return {err <= 1e-4 && dt < 10.0, "Linf=" + fmt("%.2e", err) + " (" + fmt("%.2f", dt) + "s)"};
}

// 4. Infection moves mass between c and i without loss.
Outcome infection_conservation()
{
    const Grid g = Grid::build(1.0, 0.0625);
    ParameterSet p = transport_free();
    p.delta_i = 0.0;
    p.mu_1 = 0.0;
    const MacroSolver solver(g, p, InfectedFlux::local);
    StateVector s(g);
    for (int j = 0; j < g.size(); ++j)
        for (int i = 0; i < g.size(); ++i) {
            const Vec2 x = g.position(i, j);
            s.c(i, j) = 0.2 + 0.3 * std::exp(-((x.x - 0.5) * (x.x - 0.5) + (x.y - 0.4) * (x.y - 0.4)) / 0.05);
            s.v(i, j) = 0.1 + 0.5 * x.x * x.y;
            s.E(i, j) = 0.3;
        }
    const TumourRegion all = whole(g);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const StateVector before = s;
        solver.step(s, OrientedFibreField(g), all, 0.05);
        for (std::size_t k = 0; k < s.c.size(); ++k) {
            worst = std::max(worst, std::abs((s.c[k] + s.i[k]) - (before.c[k] + before.i[k])));
        }
    }
    return {worst <= 1e-10, "max |d(c+i)| per node per step=" + fmt("%.2e", worst)};
}

// 5. Randomised fibre rearrangement keeps mass and bounds.
Outcome fibre_mass_balance()
{
    const Grid g = Grid::build(8.0, 1.0);
    MicroFibreField f(g, 15, 1.0);
    std::mt19937_64 rng(20240517);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : f.data()) v = u(rng) < 0.4 ? u(rng) : 0.0;
    const double total = f.total_mass();
    std::vector<Node> anchors;
    for (std::size_t k = 0; k < g.node_count(); ++k) anchors.push_back(g.node(k));
    bool bounded = true;
    for (int step = 0; step < 1000; ++step) {
        VectorField r(g);
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = {2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0};
        relocate_microfibres(f, anchors, r);
        for (double v : f.data()) bounded = bounded && v >= 0.0 && v <= f.f_max();
    }
    const double rel = std::abs(f.total_mass() - total) / total;
    return {rel <= 1e-12 && bounded,
            "relative mass drift=" + fmt("%.2e", rel) + ", bounds " + (bounded ? "held" : "violated")};
}

struct Watch : StageObserver {
    double worst_orientation = 0.0;
    void check(const ModelState& m)
    {
        for (std::size_t k = 0; k < m.grid.node_count(); ++k) {
            worst_orientation = std::max(worst_orientation, std::abs(m.fibres.F[k] - m.fibres.theta[k].norm()));
        }
    }
    void after_macro(const ModelState& m, int) override { check(m); }
    void after_fibres(const ModelState& m, int) override { check(m); }
    void after_boundary(const ModelState& m, int) override { check(m); }
};

// 7. MDE micro-problem.
Outcome mde_micro()
{
    const MdeSettings s;
    BoundaryMicroDomain dom;
    dom.side = s.epsilon;
    dom.nodes_per_side = s.nodes_per_side;
    dom.inside.assign(static_cast<std::size_t>(s.nodes_per_side) * s.nodes_per_side, 1);
    const MdeSolver solver(s.nodes_per_side, s.epsilon, s.diffusion, 0.5, s.steps);
    const std::size_t n = dom.inside.size();

    bool zero = true;
    for (double v : solver.solve(std::vector<double>(n, 0.0))) zero = zero && v == 0.0;

    const std::vector<double> G(n, 0.8);
    std::vector<double> m(n, 0.0);
    double worst = 0.0;
    for (int step = 0; step < s.steps; ++step) {
        const double before = patch_mass(dom, m);
        m = solver.advance(m, G);
        const double expect = patch_mass(dom, G) * solver.step_size();
        worst = std::max(worst, std::abs(patch_mass(dom, m) - before - expect) / expect);
    }
    return {zero && worst <= 0.01,
            std::string("zero source ") + (zero ? "stays zero" : "drifts") + ", max relative mass error=" +
                fmt("%.2e", worst)};
}

// 8. Four-fold lattice symmetry of a symmetric set-up.
Outcome symmetry()
{
    RunConfig c;
    c.stages = 10;
    Simulation sim(c);
    ModelState& m = sim.model();
    for (std::size_t k = 0; k < m.grid.node_count(); ++k) m.state.E[k] = 0.4;
    std::fill(m.micro.data().begin(), m.micro.data().end(), 0.0);
    m.fibres = derive_orientation(m.micro);

    const int n = m.grid.size();
    double worst = 0.0;
    auto measure = [&](const ScalarField& f) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double v = f(i, j);
                worst = std::max({worst, std::abs(v - f(n - 1 - j, i)), std::abs(v - f(n - 1 - i, j))});
            }
    };
    auto check_all = [&](const ModelState& s) {
        measure(s.state.c);
        measure(s.state.i);
        measure(s.state.E);
        measure(s.state.v);
        measure(s.fibres.F);
        ScalarField omega(s.grid);
        for (std::size_t k = 0; k < omega.size(); ++k) omega[k] = s.region.contains_index(k) ? 1.0 : 0.0;
        measure(omega);
    };
    struct PerStage : StageObserver {
        std::function<void(const ModelState&)> fn;
        void after_macro(const ModelState& s, int) override { fn(s); }
        void after_fibres(const ModelState& s, int) override { fn(s); }
        void after_boundary(const ModelState& s, int) override { fn(s); }
    } obs;
    obs.fn = check_all;
    check_all(m);
    for (int s = 0; s < 10; ++s) sim.advance(&obs);
    return {worst <= 1e-9, "max asymmetry=" + fmt("%.2e", worst) + " over 10 stages"};
}

double final_max_c(const std::string& preset, double& seconds)
{
    RunConfig c = parse_config("preset = " + preset);
    const auto t0 = Clock::now();
    Simulation sim(c);
    for (int s = 0; s < c.stages; ++s) sim.advance();
    seconds = seconds_since(t0);
    return sim.model().state.c.max();
}

// 9. Quantitative anchors for the fibre-rich local-flux runs.
Outcome fibre_adhesion_anchor()
{
    double t_strong = 0.0, t_weak = 0.0;
    const double strong = final_max_c("fibre-40-ScF-05", t_strong);
    const double weak = final_max_c("fibre-40", t_weak);
    const bool ok = strong >= 0.9 && std::abs(weak - 0.55) <= 0.15;
    return {ok, "max c: S_cF=0.5 -> " + fmt("%.4f", strong) + " (need >= 0.9), S_cF=0.2 -> " + fmt("%.4f", weak) +
                    " (need 0.55 +- 0.15); runtime " + fmt("%.1f", t_strong) + "s / " + fmt("%.1f", t_weak) +
                    "s (soft limit 1800s)"};
}

// 10. Baseline qualitative anchor. Also supplies criterion 6 and one run for 11.
Outcome baseline_anchor(const std::string& dir, Watch& watch)
{
    RunConfig c;
    c.output_dir = dir;
    c.threads = 1;
    const ModelState initial = init_state(c);
    fs::remove_all(dir);
    run_simulation(c, &watch);

    const fs::path last = fs::path(dir) / "stage_0075";
    const Grid& g = initial.grid;
    const ScalarField omega = to_field(read_field((last / "omega.ovf").string()), g);
    const ScalarField i = to_field(read_field((last / "i.ovf").string()), g);
    const ScalarField v = to_field(read_field((last / "v.ovf").string()), g);

    bool superset = true;
    std::size_t area = 0;
    double v_outside = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const bool now = omega[k] > 0.5;
        area += now ? 1 : 0;
        superset = superset && (now || !initial.region.contains_index(k));
        if (initial.state.v[k] == 0.0) v_outside = std::max(v_outside, v[k]);
    }
    const bool larger = superset && area > initial.region.area();
    const bool ok = larger && i.max() > 0.0 && v_outside > 0.0;
    return {ok, "mask " + std::to_string(initial.region.area()) + " -> " + std::to_string(area) +
                    " nodes, max i=" + fmt("%.4g", i.max()) + ", max v outside injection=" + fmt("%.4g", v_outside)};
}

bool same_bytes(const fs::path& a, const fs::path& b)
{
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return fa && fb && sa.str() == sb.str();
}

// 11. Determinism across runs and thread counts.
Outcome determinism(const std::string& first_dir)
{
    const std::string dir = "acceptance_baseline_repeat";
    RunConfig c;
    c.output_dir = dir;
    c.threads = 2;
    fs::remove_all(dir);
    run_simulation(c);
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(first_dir)) {
        if (!entry.is_regular_file() || entry.path().filename() == "log.jsonl") continue;
        const fs::path other = fs::path(dir) / fs::relative(entry.path(), first_dir);
        ++files;
        if (!fs::exists(other) || !same_bytes(entry.path(), other)) ++differing;
    }
    fs::remove_all(dir);
    return {files > 0 && differing == 0,
            std::to_string(files) + " snapshot files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main()
{
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %d: %s - %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "kernel normalisation", kernel_normalisation);
    report(2, "adhesion strength law", strength_law);
    report(3, "ODE reduction", ode_reduction);
    report(4, "infection channel conservation", infection_conservation);
    report(5, "fibre mass balance", fibre_mass_balance);

    const std::string baseline_dir = "acceptance_baseline";
    Watch watch;
    Outcome baseline;
    try {
        baseline = baseline_anchor(baseline_dir, watch);
    } catch (const std::exception& e) {
        baseline = {false, std::string("exception: ") + e.what()};
    }
    report(6, "orientation consistency", [&] {
        return Outcome{watch.worst_orientation == 0.0 && baseline.detail.rfind("exception", 0) != 0,
                       "max |F - |theta_f|| over all stages=" + fmt("%.1e", watch.worst_orientation)};
    });
    report(7, "MDE micro", mde_micro);
    report(8, "symmetry preservation", symmetry);
    report(9, "fibre adhesion anchor", fibre_adhesion_anchor);
    report(10, "baseline anchor", [&] { return baseline; });
    report(11, "determinism", [&] { return determinism(baseline_dir); });
    fs::remove_all(baseline_dir);

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
