#include "ovsim/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

namespace ovsim {

void RunConfig::validate(bool allow_zero_stages) const
{
    params.validate();
    if (!(extent > 0.0) || !(spacing > 0.0) || !std::isfinite(extent) || !std::isfinite(spacing)) {
        throw Error("grid: L and h must be positive");
    }
    if (spacing >= extent) throw Error("grid: h must be smaller than L");
    if (stages < (allow_zero_stages ? 0 : 1)) throw Error("stages must be >= 1");
    if (!(stage_dt > 0.0) || !std::isfinite(stage_dt)) throw Error("stage_dt must be positive");
    if (!(substep >= 0.0) || !std::isfinite(substep)) throw Error("substep must be >= 0");
    if (micro.fibre_cells < 3) throw Error("micro: M must be >= 3");
    if (!(micro.f_max >= 0.0) || !(micro.f_max_factor > 0.0)) throw Error("micro: f_max settings must be positive");
    if (!(micro.epsilon >= 0.0) || !(micro.rho_ball >= 0.0)) throw Error("micro: lengths must be >= 0");
    if (snapshot_every < 0) throw Error("snapshot_every must be >= 0");
    if (threads < 0) throw Error("threads must be >= 0");
    mde_settings().validate();
}

MdeSettings RunConfig::mde_settings() const
{
    MdeSettings s;
    s.epsilon = epsilon();
    s.nodes_per_side = micro.mde_nodes;
    s.source_radius = rho_ball();
    s.diffusion = params.D_m;
    s.steps = micro.mde_steps;
    s.kappa = micro.kappa;
    s.activation_threshold = micro.activation_threshold;
    return s;
}

namespace {

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw Error("expected a number, got '" + text + "'");
    }
    return v;
}

long long parse_integer(const std::string& text)
{
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error("expected an integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& text)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw Error("expected true or false, got '" + text + "'");
}

struct Key {
    const char* section;
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename Access>
Key real(const char* section, const char* name, Access access)
{
    return {section, name, [access](RunConfig& c, const std::string& v) { access(c) = parse_double(v); },
            [access](const RunConfig& c) { return format_double(access(const_cast<RunConfig&>(c))); }};
}

template <typename Access>
Key integer(const char* section, const char* name, Access access)
{
    return {section, name,
            [access](RunConfig& c, const std::string& v) {
                using T = std::remove_reference_t<decltype(access(c))>;
                access(c) = static_cast<T>(parse_integer(v));
            },
            [access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); }};
}

#define OVSIM_REAL(section, name, member) real(section, name, [](RunConfig& c) -> double& { return c.member; })
#define OVSIM_INT(section, name, member) integer(section, name, [](RunConfig& c) -> auto& { return c.member; })

const std::vector<Key>& keys()
{
    static const std::vector<Key> table = {
        OVSIM_REAL("params", "D_c", params.D_c),
        OVSIM_REAL("params", "D_i", params.D_i),
        OVSIM_REAL("params", "D_v", params.D_v),
        OVSIM_REAL("params", "D_m", params.D_m),
        OVSIM_REAL("params", "eta_i", params.eta_i),
        OVSIM_REAL("params", "eta_v", params.eta_v),
        OVSIM_REAL("params", "mu_1", params.mu_1),
        OVSIM_REAL("params", "mu_2", params.mu_2),
        OVSIM_REAL("params", "alpha_c", params.alpha_c),
        OVSIM_REAL("params", "alpha_i", params.alpha_i),
        OVSIM_REAL("params", "alpha_cF", params.alpha_cF),
        OVSIM_REAL("params", "alpha_iF", params.alpha_iF),
        OVSIM_REAL("params", "infection_rate", params.infection_rate),
        OVSIM_REAL("params", "delta_i", params.delta_i),
        OVSIM_REAL("params", "delta_v", params.delta_v),
        OVSIM_REAL("params", "b", params.b),
        OVSIM_REAL("params", "nu_e", params.nu_e),
        OVSIM_REAL("params", "nu_c", params.nu_c),
        OVSIM_REAL("params", "gamma_c", params.gamma_c),
        OVSIM_REAL("params", "gamma_i", params.gamma_i),
        OVSIM_REAL("params", "R_F", params.fibre_ratio),
        OVSIM_REAL("params", "R", params.sensing_radius),
        OVSIM_REAL("params", "S_cc", params.adhesion.cc_max),
        OVSIM_REAL("params", "S_ci", params.adhesion.ci_max),
        OVSIM_REAL("params", "S_ic", params.adhesion.ic_max),
        OVSIM_REAL("params", "S_ii", params.adhesion.ii_max),
        OVSIM_REAL("params", "S_ce", params.adhesion.ce),
        OVSIM_REAL("params", "S_ie", params.adhesion.ie),
        OVSIM_REAL("params", "S_cF", params.adhesion.cF),
        OVSIM_REAL("params", "S_iF", params.adhesion.iF),
        {"scenario", "preset", [](RunConfig& c, const std::string& v) { apply_preset(c, v); c.preset = v; },
         [](const RunConfig& c) { return c.preset; }},
        {"scenario", "infected_flux", [](RunConfig& c, const std::string& v) { c.mode = parse_infected_flux(v); },
         [](const RunConfig& c) { return to_string(c.mode); }},
        OVSIM_INT("scenario", "stages", stages),
        OVSIM_REAL("scenario", "stage_dt", stage_dt),
        OVSIM_REAL("scenario", "substep", substep),
        OVSIM_INT("scenario", "threads", threads),
        OVSIM_INT("scenario", "seed", seed),
        OVSIM_REAL("grid", "L", extent),
        OVSIM_REAL("grid", "h", spacing),
        OVSIM_INT("micro", "M", micro.fibre_cells),
        OVSIM_REAL("micro", "f_max", micro.f_max),
        OVSIM_REAL("micro", "f_max_factor", micro.f_max_factor),
        OVSIM_REAL("micro", "epsilon", micro.epsilon),
        OVSIM_INT("micro", "P", micro.mde_nodes),
        OVSIM_REAL("micro", "rho_ball", micro.rho_ball),
        OVSIM_REAL("micro", "kappa", micro.kappa),
        OVSIM_REAL("micro", "activation_threshold", micro.activation_threshold),
        OVSIM_INT("micro", "mde_steps", micro.mde_steps),
        {"output", "dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
         [](const RunConfig& c) { return c.output_dir; }},
        OVSIM_INT("output", "snapshot_every", snapshot_every),
        {"output", "render", [](RunConfig& c, const std::string& v) { c.render = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.render ? "true" : "false"); }},
    };
    return table;
}

#undef OVSIM_REAL
#undef OVSIM_INT

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s)
{
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

std::string strip_comment(const std::string& line)
{
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        if (line[k] == '"') quoted = !quoted;
        if (!quoted && (line[k] == '#' || line[k] == ';')) return line.substr(0, k);
    }
    return line;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin)
{
    struct Assignment {
        const Key* key;
        std::string value;
        int line;
    };
    std::vector<Assignment> assignments;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    auto fail = [&](int line, const std::string& what) {
        throw Error(origin + ":" + std::to_string(line) + ": " + what);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "params" && section != "scenario" && section != "grid" && section != "micro" &&
                section != "output") {
                fail(line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string name = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        const Key* found = nullptr;
        for (const Key& k : keys()) {
            if (name == k.name && (section.empty() || section == k.section)) {
                found = &k;
                break;
            }
        }
        if (!found) {
            fail(line_no, "unknown key '" + name + "'" + (section.empty() ? "" : " in [" + section + "]"));
        }
        assignments.push_back({found, value, line_no});
    }

    RunConfig config;
    // A preset only sets what its scenario varies; explicit keys win over it
    // regardless of where they appear.
    for (const auto& a : assignments) {
        if (std::string(a.key->name) != "preset") continue;
        try {
            a.key->set(config, a.value);
        } catch (const Error& e) {
            fail(a.line, std::string(a.key->name) + ": " + e.what());
        }
    }
    for (const auto& a : assignments) {
        if (std::string(a.key->name) == "preset") continue;
        try {
            a.key->set(config, a.value);
        } catch (const Error& e) {
            fail(a.line, std::string(a.key->name) + ": " + e.what());
        }
    }
    try {
        config.validate();
    } catch (const Error& e) {
        throw Error(origin + ": " + e.what());
    }
    return config;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read config '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string serialize_config(const RunConfig& config)
{
    std::ostringstream out;
    std::string section;
    for (const Key& k : keys()) {
        if (section != k.section) {
            section = k.section;
            out << (out.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
        }
        const std::string value = k.get(config);
        if (std::string(k.name) == "preset" && value.empty()) continue;
        const bool text = std::string(k.name) == "dir" || std::string(k.name) == "preset";
        out << k.name << " = " << (text ? "\"" + value + "\"" : value) << '\n';
    }
    return out.str();
}

namespace {

struct Preset {
    const char* name;
    const char* summary;
    std::function<void(RunConfig&)> apply;
};

const std::vector<Preset>& presets()
{
    static const std::vector<Preset> table = {
        {"baseline-local", "baseline parameters, local infected-cell flux", [](RunConfig& c) {
             c.mode = InfectedFlux::local;
         }},
        {"fibre-30", "local flux, R_F = 30%", [](RunConfig& c) { c.params.fibre_ratio = 0.30; }},
        {"fibre-35", "local flux, R_F = 35%", [](RunConfig& c) { c.params.fibre_ratio = 0.35; }},
        {"fibre-40", "local flux, R_F = 40%", [](RunConfig& c) { c.params.fibre_ratio = 0.40; }},
        {"ScF-05", "local flux, S_cF = 0.5", [](RunConfig& c) { c.params.adhesion.cF = 0.5; }},
        {"fibre-30-ScF-05", "local flux, R_F = 30%, S_cF = 0.5", [](RunConfig& c) {
             c.params.fibre_ratio = 0.30;
             c.params.adhesion.cF = 0.5;
         }},
        {"fibre-40-ScF-05", "local flux, R_F = 40%, S_cF = 0.5", [](RunConfig& c) {
             c.params.fibre_ratio = 0.40;
             c.params.adhesion.cF = 0.5;
         }},
        {"nonlocal-baseline", "baseline parameters, nonlocal infected-cell flux", [](RunConfig& c) {
             c.mode = InfectedFlux::nonlocal;
         }},
        {"nonlocal-ScFSiF-03", "nonlocal flux, S_cF = S_iF = 0.3", [](RunConfig& c) {
             c.mode = InfectedFlux::nonlocal;
             c.params.adhesion.cF = 0.3;
             c.params.adhesion.iF = 0.3;
         }},
        {"nonlocal-Sie-0001", "nonlocal flux, S_ie = 0.001", [](RunConfig& c) {
             c.mode = InfectedFlux::nonlocal;
             c.params.adhesion.ie = 0.001;
         }},
        {"nonlocal-fibre-30", "nonlocal flux, R_F = 30%", [](RunConfig& c) {
             c.mode = InfectedFlux::nonlocal;
             c.params.fibre_ratio = 0.30;
         }},
        {"nonlocal-fibre-30-weak", "nonlocal flux, R_F = 30%, S_cc = 0.05, S_ce = 0.001", [](RunConfig& c) {
             c.mode = InfectedFlux::nonlocal;
             c.params.fibre_ratio = 0.30;
             c.params.adhesion.cc_max = 0.05;
             c.params.adhesion.ce = 0.001;
         }},
        {"cross-adhesion-a", "nonlocal flux, S_cc = S_ci = 0.05, S_ic = S_ii = 0.1, S_ce = 0.001", [](RunConfig& c) {
             c.mode = InfectedFlux::nonlocal;
             c.params.adhesion.cc_max = 0.05;
             c.params.adhesion.ci_max = 0.05;
             c.params.adhesion.ic_max = 0.1;
             c.params.adhesion.ii_max = 0.1;
             c.params.adhesion.ce = 0.001;
         }},
        {"cross-adhesion-b", "nonlocal flux, S_cc = S_ci = 0.1, S_ic = S_ii = 0.05, S_ie = 0.001", [](RunConfig& c) {
             c.mode = InfectedFlux::nonlocal;
             c.params.adhesion.cc_max = 0.1;
             c.params.adhesion.ci_max = 0.1;
             c.params.adhesion.ic_max = 0.05;
             c.params.adhesion.ii_max = 0.05;
             c.params.adhesion.ie = 0.001;
         }},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& p : presets()) out.emplace_back(p.name);
        return out;
    }();
    return names;
}

std::string preset_summary(const std::string& name)
{
    for (const auto& p : presets()) {
        if (name == p.name) return p.summary;
    }
    throw Error("unknown scenario preset '" + name + "'");
}

void apply_preset(RunConfig& config, const std::string& name)
{
    for (const auto& p : presets()) {
        if (name == p.name) {
            p.apply(config);
            config.preset = name;
            return;
        }
    }
    throw Error("unknown scenario preset '" + name + "'");
}

}  // namespace ovsim
