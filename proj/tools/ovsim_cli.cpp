// ovsim: run the tumour/virus micro-macro model, render fields, list presets.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ovsim/config.hpp"
#include "ovsim/render.hpp"
#include "ovsim/simulation.hpp"
#include "ovsim/snapshot.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"ovsim - two-scale tumour / oncolytic virus simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scenario;
    std::optional<int> stages;
    std::string out_dir;
    std::optional<int> snapshot_every;
    std::optional<int> threads;
    bool render_pngs = false;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "run the simulation and write snapshots");
    run->add_option("--config", config_path, "config file ([params] [scenario] [grid] [micro] [output])")
        ->check(CLI::ExistingFile);
    run->add_option("--scenario", scenario, "named preset applied before the config's explicit keys");
    run->add_option("--stages", stages, "number of micro-macro stages")->check(CLI::NonNegativeNumber);
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--snapshot-every", snapshot_every, "snapshot cadence in stages (0: first and last only)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--threads", threads, "OpenMP threads (OVSIM_THREADS overrides)")->check(CLI::NonNegativeNumber);
    run->add_flag("--render", render_pngs, "also write PNG heatmaps next to each snapshot");
    run->add_flag("-q,--quiet", quiet, "no per-stage progress on stderr");

    std::string field_path;
    std::string png_path;
    std::string palette = "jet";
    std::string mask_path;
    int scale = 4;
    auto* render = app.add_subcommand("render", "render a field file as a PNG heatmap");
    render->add_option("field", field_path, "field file (.ovf)")->required()->check(CLI::ExistingFile);
    render->add_option("png", png_path, "output PNG")->required();
    render->add_option("--palette", palette, "jet, viridis or gray");
    render->add_option("--scale", scale, "pixels per node")->check(CLI::Range(1, 64));
    render->add_option("--mask", mask_path, "omega field whose boundary is overlaid in white")
        ->check(CLI::ExistingFile);

    auto* presets = app.add_subcommand("presets", "list the named scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            std::string text;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                std::ostringstream buf;
                buf << in.rdbuf();
                text = buf.str();
            }
            if (!scenario.empty()) {
                // Last preset wins; the file's explicit keys still override it.
                text += "\n[scenario]\npreset = " + scenario + "\n";
            }
            ovsim::RunConfig config = ovsim::parse_config(text, config_path.empty() ? "<defaults>" : config_path);
            if (stages) config.stages = *stages;
            if (!out_dir.empty()) config.output_dir = out_dir;
            if (snapshot_every) config.snapshot_every = *snapshot_every;
            if (threads) config.threads = *threads;
            if (render_pngs) config.render = true;
            config.validate(true);

            struct Progress : ovsim::StageObserver {
                void after_boundary(const ovsim::ModelState& m, int stage) override
                {
                    std::fprintf(stderr, "stage %3d  area %6zu  max c %.4f  max i %.4f  max v %.4f\n", stage,
                                 m.region.area(), m.state.c.max(), m.state.i.max(), m.state.v.max());
                }
            } progress;
            const ovsim::RunResult result = ovsim::run_simulation(config, quiet ? nullptr : &progress);
            for (const auto& m : result.manifests) {
                std::cout << m.directory << "/manifest.json\n";
            }
        } else if (*render) {
            const ovsim::FieldFile file = ovsim::read_field(field_path);
            const ovsim::Grid grid = ovsim::Grid::build(file.size - 1, 1.0);
            const ovsim::ScalarField field = ovsim::to_field(file, grid);
            std::optional<ovsim::TumourRegion> region;
            if (!mask_path.empty()) {
                const ovsim::ScalarField omega = ovsim::to_field(ovsim::read_field(mask_path), grid);
                region.emplace(grid);
                for (std::size_t k = 0; k < grid.node_count(); ++k) {
                    if (omega[k] > 0.5) region->insert(grid.node(k));
                }
            }
            ovsim::render_heatmap(field, ovsim::parse_palette(palette), png_path, scale,
                                  region ? &*region : nullptr);
        } else if (*presets) {
            for (const std::string& name : ovsim::preset_names()) {
                std::cout << name << "  " << ovsim::preset_summary(name) << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "ovsim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
