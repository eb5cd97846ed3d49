#include "ovsim/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace ovsim {

namespace {

struct Stop {
    double t;
    double r, g, b;
};

// Matplotlib anchor colours, interpolated linearly between stops.
constexpr Stop kJet[] = {{0.0, 0.0, 0.0, 0.5},  {0.11, 0.0, 0.0, 1.0}, {0.125, 0.0, 0.0, 1.0},
                         {0.34, 0.0, 0.86, 1.0}, {0.35, 0.0, 0.9, 0.97}, {0.64, 1.0, 0.96, 0.0},
                         {0.65, 1.0, 0.91, 0.0}, {0.89, 1.0, 0.0, 0.0}, {1.0, 0.5, 0.0, 0.0}};
constexpr Stop kViridis[] = {{0.0, 0.267, 0.005, 0.329},  {0.25, 0.229, 0.322, 0.546},
                             {0.5, 0.128, 0.567, 0.551},  {0.75, 0.369, 0.789, 0.383},
                             {1.0, 0.993, 0.906, 0.144}};

template <std::size_t K>
Rgb interpolate(const Stop (&stops)[K], double t)
{
    std::size_t k = 1;
    while (k + 1 < K && stops[k].t < t) {
        ++k;
    }
    const Stop& a = stops[k - 1];
    const Stop& b = stops[k];
    const double w = b.t > a.t ? std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0) : 0.0;
    auto channel = [w](double x, double y) {
        return static_cast<std::uint8_t>(std::lround(255.0 * ((1.0 - w) * x + w * y)));
    };
    return {channel(a.r, b.r), channel(a.g, b.g), channel(a.b, b.b)};
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Palette parse_palette(const std::string& name)
{
    if (name == "jet") return Palette::jet;
    if (name == "viridis") return Palette::viridis;
    if (name == "gray" || name == "grey") return Palette::gray;
    throw Error("unknown palette '" + name + "' (expected jet, viridis or gray)");
}

Rgb palette_colour(Palette palette, double t)
{
    t = std::isnan(t) ? 0.0 : std::clamp(t, 0.0, 1.0);
    switch (palette) {
    case Palette::jet:
        return interpolate(kJet, t);
    case Palette::viridis:
        return interpolate(kViridis, t);
    case Palette::gray: {
        const auto g = static_cast<std::uint8_t>(std::lround(255.0 * t));
        return {g, g, g};
    }
    }
    return {0, 0, 0};
}

Image rasterize(int n, std::span<const double> values, Palette palette, int scale, const std::vector<Node>& overlay)
{
    if (scale < 1) {
        throw Error("render scale must be at least 1");
    }
    if (n < 1 || values.size() != static_cast<std::size_t>(n) * n) {
        throw Error("render: expected " + std::to_string(n) + "x" + std::to_string(n) + " values");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
        throw Error("cannot render a field with non-finite values");
    }
    const double span = hi - lo;

    Image img;
    img.width = n * scale;
    img.height = n * scale;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    auto paint = [&](int i, int j, Rgb colour) {
        const int top = (n - 1 - j) * scale;
        for (int y = top; y < top + scale; ++y) {
            for (int x = i * scale; x < (i + 1) * scale; ++x) {
                img.pixels[static_cast<std::size_t>(y) * img.width + x] = colour;
            }
        }
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double t = span > 0.0 ? (values[static_cast<std::size_t>(j) * n + i] - lo) / span : 0.0;
            paint(i, j, palette_colour(palette, t));
        }
    }
    for (Node b : overlay) {
        if (b.i < 0 || b.j < 0 || b.i >= n || b.j >= n) {
            throw Error("render: overlay node off the raster");
        }
        paint(b.i, b.j, {255, 255, 255});
    }
    img.overlay = overlay;
    return img;
}

Image rasterize(const ScalarField& field, Palette palette, int scale, const TumourRegion* region)
{
    std::vector<Node> overlay;
    if (region != nullptr && !region->empty()) {
        overlay = extract_boundary(*region);
    }
    return rasterize(field.grid().size(), field.values(), palette, scale, overlay);
}

void write_png(const std::string& path, const Image& image)
{
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw Error("cannot open '" + path + "' for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("PNG encoding failed for '" + path + "'");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> row(static_cast<std::size_t>(image.width) * 3);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const Rgb& p = image.at(x, y);
            std::copy(p.begin(), p.end(), row.begin() + 3 * x);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image read_png(const std::string& path)
{
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw Error("cannot read '" + path + "'");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("libpng initialisation failed");
    }
    Image img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("'" + path + "' is not a readable PNG");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_RGB || png_get_bit_depth(png, info) != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("'" + path + "' is not an 8-bit RGB PNG");
    }
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    std::vector<png_byte> row(static_cast<std::size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < img.width; ++x) {
            img.pixels[static_cast<std::size_t>(y) * img.width + x] = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void render_heatmap(const ScalarField& field, Palette palette, const std::string& out_path, int scale,
                    const TumourRegion* region)
{
    write_png(out_path, rasterize(field, palette, scale, region));
}

}  // namespace ovsim
