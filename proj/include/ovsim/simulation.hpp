#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ovsim/config.hpp"
#include "ovsim/init.hpp"
#include "ovsim/macro.hpp"
#include "ovsim/mde.hpp"
#include "ovsim/snapshot.hpp"

namespace ovsim {

/// A module failure re-raised with the stage it happened in.
class StageError : public Error {
public:
    StageError(int stage, const std::string& what)
        : Error("stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
    int stage() const { return stage_; }

private:
    int stage_;
};

struct StageRecord {
    int stage = 0;
    double wall_seconds = 0.0;
    double mass_c = 0.0;
    double mass_i = 0.0;
    double mass_E = 0.0;
    double mass_F = 0.0;
    double mass_v = 0.0;
    std::size_t area = 0;          ///< tumour nodes
    double clamped_mass = 0.0;
    int substeps = 0;
    std::size_t fibre_transfers = 0;
    std::size_t patches = 0;
    std::size_t active_patches = 0;
    std::size_t added_nodes = 0;
};

StageRecord measure(const ModelState& model, int stage);
std::string to_json_line(const StageRecord& record);

/// Per-stage hooks, mainly for tests that check a property after every stage.
struct StageObserver {
    virtual ~StageObserver() = default;
    virtual void after_macro(const ModelState&, int /*stage*/) {}
    virtual void after_fibres(const ModelState&, int /*stage*/) {}
    virtual void after_boundary(const ModelState&, int /*stage*/) {}
};

/// The micro-macro loop. Each stage runs the macro step with frozen fibres,
/// then fibre rearrangement and degradation, then the boundary micro-dynamics
/// and tumour expansion.
class Simulation {
public:
    explicit Simulation(RunConfig config);

    const RunConfig& config() const { return config_; }
    const ModelState& model() const { return model_; }
    ModelState& model() { return model_; }
    const MacroSolver& solver() const { return solver_; }
    int stage() const { return stage_; }

    StageRecord advance(StageObserver* observer = nullptr);

private:
    RunConfig config_;
    ModelState model_;
    MacroSolver solver_;
    MdeSolver mde_;
    int stage_ = 0;
};

/// OVSIM_THREADS if set, else `requested`, else the runtime default (0).
int resolve_threads(int requested);

struct RunResult {
    std::vector<SnapshotManifest> manifests;
    std::vector<StageRecord> records;
};

/// Runs `config.stages` stages, writing snapshots for stage 0, every
/// `snapshot_every` stages and the last stage, plus log.jsonl in the output
/// directory. Throws StageError on failure; snapshots already written stay valid.
RunResult run_simulation(const RunConfig& config, StageObserver* observer = nullptr);

}  // namespace ovsim
