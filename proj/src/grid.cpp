#include "ovsim/grid.hpp"

#include <algorithm>
#include <numeric>

namespace ovsim {

Grid Grid::build(double extent, double spacing)
{
    if (!std::isfinite(extent) || !std::isfinite(spacing) || extent <= 0.0 || spacing <= 0.0) {
        throw Error("grid: extent and spacing must be positive and finite");
    }
    if (spacing >= extent) {
        throw Error("grid: spacing must be smaller than the extent");
    }
    // L/h is usually an exact power-of-two ratio; the small slack absorbs
    // representations like 4/0.1 = 39.99999...
    const int n = static_cast<int>(std::floor(extent / spacing + 1e-9)) + 1;
    if (n < 3) {
        throw Error("grid: at least 3 nodes per axis required");
    }
    return Grid(extent, spacing, n);
}

double ScalarField::max() const
{
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double ScalarField::min() const
{
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double ScalarField::integral() const
{
    const double h = grid_.spacing();
    return std::accumulate(values_.begin(), values_.end(), 0.0) * h * h;
}

TumourRegion::TumourRegion(const Grid& grid, const std::vector<Node>& members) : TumourRegion(grid)
{
    for (Node n : members) {
        insert(n);
    }
}

std::size_t TumourRegion::area() const
{
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::vector<Node> TumourRegion::members() const
{
    std::vector<Node> out;
    for (std::size_t k = 0; k < mask_.size(); ++k) {
        if (mask_[k]) {
            out.push_back(grid_.node(k));
        }
    }
    return out;
}

void TumourRegion::insert(Node n)
{
    if (!grid_.contains(n)) {
        throw Error("tumour region: node (" + std::to_string(n.i) + "," + std::to_string(n.j) +
                    ") lies off the grid");
    }
    mask_[grid_.index(n)] = 1;
}

std::vector<Node> extract_boundary(const TumourRegion& region)
{
    const Grid& g = region.grid();
    std::vector<Node> out;
    for (int j = 0; j < g.size(); ++j) {
        for (int i = 0; i < g.size(); ++i) {
            if (!region.contains(i, j)) {
                continue;
            }
            if (!region.contains(i - 1, j) || !region.contains(i + 1, j) ||
                !region.contains(i, j - 1) || !region.contains(i, j + 1)) {
                out.push_back({i, j});
            }
        }
    }
    if (out.empty()) {
        throw Error("empty tumour");
    }
    return out;
}

TumourRegion expand_region(const TumourRegion& region, std::span<const Node> new_nodes)
{
    TumourRegion out = region;
    for (Node n : new_nodes) {
        out.insert(n);
    }
    return out;
}

namespace {

double axis_difference(double minus, double centre, double plus, bool has_minus, bool has_plus, double h)
{
    if (has_minus && has_plus) {
        return (plus - minus) / (2.0 * h);
    }
    if (has_plus) {
        return (plus - centre) / h;
    }
    if (has_minus) {
        return (centre - minus) / h;
    }
    return 0.0;
}

}  // namespace

Vec2 gradient(const ScalarField& f, int i, int j)
{
    const Grid& g = f.grid();
    const double h = g.spacing();
    const bool w = g.contains(i - 1, j), e = g.contains(i + 1, j);
    const bool s = g.contains(i, j - 1), n = g.contains(i, j + 1);
    const double c = f(i, j);
    return {axis_difference(w ? f(i - 1, j) : c, c, e ? f(i + 1, j) : c, w, e, h),
            axis_difference(s ? f(i, j - 1) : c, c, n ? f(i, j + 1) : c, s, n, h)};
}

Vec2 masked_gradient(const ScalarField& f, const TumourRegion& region, int i, int j)
{
    const double h = f.grid().spacing();
    const bool w = region.contains(i - 1, j), e = region.contains(i + 1, j);
    const bool s = region.contains(i, j - 1), n = region.contains(i, j + 1);
    const double c = f(i, j);
    return {axis_difference(w ? f(i - 1, j) : c, c, e ? f(i + 1, j) : c, w, e, h),
            axis_difference(s ? f(i, j - 1) : c, c, n ? f(i, j + 1) : c, s, n, h)};
}

double laplacian(const ScalarField& f, int i, int j)
{
    const Grid& g = f.grid();
    const double h = g.spacing();
    const double c = f(i, j);
    double sum = 0.0;
    if (g.contains(i - 1, j)) sum += f(i - 1, j) - c;
    if (g.contains(i + 1, j)) sum += f(i + 1, j) - c;
    if (g.contains(i, j - 1)) sum += f(i, j - 1) - c;
    if (g.contains(i, j + 1)) sum += f(i, j + 1) - c;
    return sum / (h * h);
}

double clamp_negative(ScalarField& f)
{
    double removed = 0.0;
    for (double& x : f.values()) {
        if (x < 0.0) {
            removed -= x;
            x = 0.0;
        }
    }
    const double h = f.grid().spacing();
    return removed * h * h;
}

void restrict_to(ScalarField& f, const TumourRegion& region)
{
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!region.contains_index(k)) {
            f[k] = 0.0;
        }
    }
}

}  // namespace ovsim
