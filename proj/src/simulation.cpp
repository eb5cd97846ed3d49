#include "ovsim/simulation.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ovsim/render.hpp"

namespace ovsim {

namespace fs = std::filesystem;

StageRecord measure(const ModelState& model, int stage)
{
    StageRecord r;
    r.stage = stage;
    r.mass_c = model.state.c.integral();
    r.mass_i = model.state.i.integral();
    r.mass_E = model.state.E.integral();
    r.mass_F = model.fibres.F.integral();
    r.mass_v = model.state.v.integral();
    r.area = model.region.area();
    return r;
}

std::string to_json_line(const StageRecord& r)
{
    nlohmann::json j{{"stage", r.stage},
                     {"wall_seconds", r.wall_seconds},
                     {"mass_c", r.mass_c},
                     {"mass_i", r.mass_i},
                     {"mass_E", r.mass_E},
                     {"mass_F", r.mass_F},
                     {"mass_v", r.mass_v},
                     {"area", r.area},
                     {"clamped_mass", r.clamped_mass},
                     {"substeps", r.substeps},
                     {"fibre_transfers", r.fibre_transfers},
                     {"patches", r.patches},
                     {"active_patches", r.active_patches},
                     {"added_nodes", r.added_nodes}};
    return j.dump();
}

Simulation::Simulation(RunConfig config)
    : config_(std::move(config)),
      model_(init_state(config_)),
      solver_(model_.grid, config_.params, config_.mode),
      mde_(config_.micro.mde_nodes, config_.epsilon(), config_.params.D_m, config_.stage_dt, config_.micro.mde_steps)
{
}

StageRecord Simulation::advance(StageObserver* observer)
{
    const int stage = stage_ + 1;
    const auto start = std::chrono::steady_clock::now();
    const ParameterSet& p = config_.params;
    const double dt = config_.stage_dt;
    ModelState& m = model_;
    StageRecord rec;
    try {
        // Macro dynamics; the fibre phase is frozen over the stage.
        const MacroStepReport macro = solver_.step(m.state, m.fibres, m.region, dt, config_.substep);
        rec.substeps = macro.substeps;
        rec.clamped_mass = macro.clamped_mass;
        if (observer) observer->after_macro(m, stage);

        // Fibre rearrangement under the total cell flux, then degradation.
        const VectorField flux = solver_.total_cell_flux(m.state, m.fibres, m.region);
        VectorField rearrangement(m.grid);
        const std::vector<Node> anchors = m.region.members();
        for (Node n : anchors) {
            const std::size_t k = m.grid.index(n);
            rearrangement[k] = rearrangement_vector(flux[k], m.state.c[k] + m.state.i[k], m.fibres.theta[k],
                                                    m.fibres.F[k]);
        }
        rec.fibre_transfers = relocate_microfibres(m.micro, anchors, rearrangement).transfers;
        apply_fibre_degradation(m.micro, macro.mean_c, macro.mean_i, p.alpha_cF, p.alpha_iF, dt);
        m.fibres = derive_orientation(m.micro);
        if (observer) observer->after_fibres(m, stage);

        // Boundary micro-dynamics and tumour expansion.
        const MdeSettings mde = config_.mde_settings();
        const std::vector<BoundaryMicroDomain> patches =
            cover_boundary(m.region, mde.epsilon, mde.nodes_per_side);
        std::vector<BoundaryRelocation> moves;
        moves.reserve(patches.size());
        for (const BoundaryMicroDomain& dom : patches) {
            const std::vector<double> source =
                mde_source(dom, m.state.c, m.state.i, m.region, p.gamma_c, p.gamma_i, mde.source_radius);
            const std::vector<double> sol = mde_.solve(source);
            moves.push_back(boundary_relocation(dom, sol, mde.activation_threshold, mde.kappa));
            rec.active_patches += moves.back().active ? 1 : 0;
        }
        rec.patches = patches.size();
        const std::size_t before = m.region.area();
        m.region = expand_tumour(m.region, moves);
        rec.added_nodes = m.region.area() - before;
        // Newly claimed nodes start empty of cells.
        restrict_to(m.state.c, m.region);
        restrict_to(m.state.i, m.region);
        if (observer) observer->after_boundary(m, stage);
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
    stage_ = stage;
    const StageRecord masses = measure(m, stage);
    rec.stage = stage;
    rec.mass_c = masses.mass_c;
    rec.mass_i = masses.mass_i;
    rec.mass_E = masses.mass_E;
    rec.mass_F = masses.mass_F;
    rec.mass_v = masses.mass_v;
    rec.area = masses.area;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

int resolve_threads(int requested)
{
    if (const char* env = std::getenv("OVSIM_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (*end != '\0' || n < 0 || n > 4096) {
            throw Error("OVSIM_THREADS must be a non-negative integer, got '" + std::string(env) + "'");
        }
        return static_cast<int>(n);
    }
    return requested;
}

namespace {

void render_stage(const ModelState& m, const SnapshotManifest& manifest)
{
    const fs::path dir = manifest.directory;
    ScalarField e(m.grid);
    for (std::size_t k = 0; k < m.grid.node_count(); ++k) {
        e[k] = m.state.E[k] + m.fibres.F[k];
    }
    render_heatmap(m.state.c, Palette::jet, (dir / "c.png").string(), 4, &m.region);
    render_heatmap(m.state.i, Palette::jet, (dir / "i.png").string(), 4, &m.region);
    render_heatmap(e, Palette::jet, (dir / "e.png").string(), 4, &m.region);
    render_heatmap(m.fibres.F, Palette::jet, (dir / "F.png").string(), 4, &m.region);
    render_heatmap(m.state.v, Palette::jet, (dir / "v.png").string(), 4, &m.region);
}

}  // namespace

RunResult run_simulation(const RunConfig& config, StageObserver* observer)
{
    config.validate(true);
    if (const int threads = resolve_threads(config.threads); threads > 0) {
        omp_set_num_threads(threads);
    }
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) {
        throw Error("cannot create '" + config.output_dir + "': " + ec.message());
    }
    const fs::path log_path = fs::path(config.output_dir) / "log.jsonl";
    std::ofstream log(log_path, std::ios::trunc);
    if (!log) {
        throw Error("cannot open '" + log_path.string() + "' for writing");
    }

    Simulation sim(config);
    RunResult result;
    auto snapshot = [&](int stage) {
        const ModelState& m = sim.model();
        result.manifests.push_back(write_snapshot(m.state, m.fibres, m.region, stage, config.output_dir));
        if (config.render) {
            render_stage(m, result.manifests.back());
        }
    };

    result.records.push_back(measure(sim.model(), 0));
    log << to_json_line(result.records.back()) << '\n';
    snapshot(0);
    for (int s = 1; s <= config.stages; ++s) {
        result.records.push_back(sim.advance(observer));
        log << to_json_line(result.records.back()) << std::flush << '\n';
        const bool due = config.snapshot_every > 0 && s % config.snapshot_every == 0;
        if (due || s == config.stages) {
            try {
                snapshot(s);
            } catch (const std::exception& e) {
                throw StageError(s, e.what());
            }
        }
    }
    log.flush();
    return result;
}

}  // namespace ovsim
