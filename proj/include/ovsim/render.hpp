#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ovsim/grid.hpp"

namespace ovsim {

enum class Palette { jet, viridis, gray };

Palette parse_palette(const std::string& name);

using Rgb = std::array<std::uint8_t, 3>;

/// Colour at t in [0, 1]; t is clamped.
Rgb palette_colour(Palette palette, double t);

struct Image {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;     ///< row-major, row 0 at the top
    std::vector<Node> overlay;   ///< nodes painted as the tumour boundary

    Rgb at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Nearest-neighbour raster: every node becomes a `scale` x `scale` block,
/// x1 to the right and x2 up. Colours map [min, max] linearly; a constant
/// field maps to the bottom of the palette. With a region, its boundary nodes
/// are painted white.
Image rasterize(const ScalarField& field, Palette palette, int scale, const TumourRegion* region = nullptr);

/// Same for a bare n x n row-major array (x1 fastest), with an explicit overlay.
Image rasterize(int n, std::span<const double> values, Palette palette, int scale,
                const std::vector<Node>& overlay = {});

void write_png(const std::string& path, const Image& image);
/// 8-bit RGB PNGs only; the overlay list is not stored.
Image read_png(const std::string& path);

void render_heatmap(const ScalarField& field, Palette palette, const std::string& out_path, int scale = 4,
                    const TumourRegion* region = nullptr);

}  // namespace ovsim
