#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovsim/macro.hpp"
#include "ovsim/mde.hpp"

namespace ovsim {

/// Micro-scale settings. Lengths left at 0 resolve to multiples of h.
struct MicroSettings {
    int fibre_cells = 15;              ///< M, micro cells per side of sigmaY
    double f_max = 0.0;                ///< 0: f_max_factor times the initial peak
    double f_max_factor = 2.0;
    double epsilon = 0.0;              ///< 0: 4h
    int mde_nodes = 17;                ///< P
    double rho_ball = 0.0;             ///< 0: 2h
    double kappa = 0.5;
    double activation_threshold = 0.2;
    int mde_steps = 20;

    friend bool operator==(const MicroSettings&, const MicroSettings&) = default;
};

struct RunConfig {
    ParameterSet params;
    InfectedFlux mode = InfectedFlux::local;
    std::string preset;                ///< empty: plain baseline
    double extent = 4.0;
    double spacing = 0.03125;
    int stages = 75;
    double stage_dt = 0.5;
    double substep = 0.0;              ///< 0: adaptive
    MicroSettings micro;
    std::string output_dir = "ovsim-out";
    int snapshot_every = 25;
    bool render = false;
    int threads = 0;                   ///< 0: runtime default
    std::uint64_t seed = 0;            ///< reserved; the model is deterministic

    /// Zero stages is only meaningful for a run that writes the initial state.
    void validate(bool allow_zero_stages = false) const;
    double epsilon() const { return micro.epsilon > 0.0 ? micro.epsilon : 4.0 * spacing; }
    double rho_ball() const { return micro.rho_ball > 0.0 ? micro.rho_ball : 2.0 * spacing; }
    MdeSettings mde_settings() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses `[section]` / `key = value` text. Keys may also appear before any
/// section header. Unknown keys and malformed values are reported with the
/// line number; the result is validated.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

const std::vector<std::string>& preset_names();
/// One-line description of what the preset changes.
std::string preset_summary(const std::string& name);
/// Sets the parameters the named scenario varies; leaves everything else alone.
void apply_preset(RunConfig& config, const std::string& name);

}  // namespace ovsim
