#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ovsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    friend bool operator==(Vec2, Vec2) = default;

    double norm() const { return std::hypot(x, y); }
};

/// Macro grid node by integer index; i runs along x1, j along x2.
struct Node {
    int i = 0;
    int j = 0;
    friend auto operator<=>(Node, Node) = default;
};

/// Uniform square grid over [0, L]^2 with N = floor(L/h) + 1 nodes per axis.
class Grid {
public:
    Grid() = default;

    static Grid build(double extent, double spacing);

    double extent() const { return extent_; }
    double spacing() const { return spacing_; }
    int size() const { return n_; }
    std::size_t node_count() const { return static_cast<std::size_t>(n_) * n_; }

    bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < n_ && j < n_; }
    bool contains(Node n) const { return contains(n.i, n.j); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n_ + i; }
    std::size_t index(Node n) const { return index(n.i, n.j); }
    Node node(std::size_t k) const { return {static_cast<int>(k % n_), static_cast<int>(k / n_)}; }
    Vec2 position(int i, int j) const { return {i * spacing_, j * spacing_}; }
    Vec2 position(Node n) const { return position(n.i, n.j); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Grid(double extent, double spacing, int n) : extent_(extent), spacing_(spacing), n_(n) {}

    double extent_ = 0.0;
    double spacing_ = 0.0;
    int n_ = 0;
};

/// Real value per grid node, row-major (j outer).
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0)
        : grid_(grid), values_(grid.node_count(), value) {}

    const Grid& grid() const { return grid_; }
    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double max() const;
    double min() const;
    /// Node sum times h^2.
    double integral() const;

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    Grid grid_;
    std::vector<double> values_;
};

class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& grid) : grid_(grid), values_(grid.node_count()) {}

    const Grid& grid() const { return grid_; }
    Vec2& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
    Vec2 operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    Vec2& operator[](std::size_t k) { return values_[k]; }
    Vec2 operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }

private:
    Grid grid_;
    std::vector<Vec2> values_;
};

/// Tumour support: node membership mask plus its boundary nodes.
class TumourRegion {
public:
    TumourRegion() = default;
    explicit TumourRegion(const Grid& grid) : grid_(grid), mask_(grid.node_count(), 0) {}
    TumourRegion(const Grid& grid, const std::vector<Node>& members);

    const Grid& grid() const { return grid_; }
    bool contains(int i, int j) const { return grid_.contains(i, j) && mask_[grid_.index(i, j)] != 0; }
    bool contains(Node n) const { return contains(n.i, n.j); }
    bool contains_index(std::size_t k) const { return mask_[k] != 0; }
    std::size_t area() const;
    bool empty() const { return area() == 0; }
    std::span<const std::uint8_t> mask() const { return mask_; }
    std::vector<Node> members() const;

    void insert(Node n);

    friend bool operator==(const TumourRegion&, const TumourRegion&) = default;

private:
    Grid grid_;
    std::vector<std::uint8_t> mask_;
};

/// Members with at least one non-member 4-neighbour (off-grid counts as non-member),
/// in row-major scan order. Throws on an empty region.
std::vector<Node> extract_boundary(const TumourRegion& region);

/// Returns mask ∪ new_nodes. Throws if any node is off the grid.
TumourRegion expand_region(const TumourRegion& region, std::span<const Node> new_nodes);

/// c, i, E, v on the macro grid. e = E + F is always reassembled, never stored.
struct StateVector {
    ScalarField c;
    ScalarField i;
    ScalarField E;
    ScalarField v;

    explicit StateVector(const Grid& grid) : c(grid), i(grid), E(grid), v(grid) {}
    StateVector() = default;
    const Grid& grid() const { return c.grid(); }

    friend bool operator==(const StateVector&, const StateVector&) = default;
};

/// Central second-order gradient with one-sided differences at the domain frame.
Vec2 gradient(const ScalarField& f, int i, int j);

/// Gradient restricted to region members: a missing neighbour switches the
/// difference to one-sided, both missing gives 0 along that axis.
Vec2 masked_gradient(const ScalarField& f, const TumourRegion& region, int i, int j);

/// Five-point Laplacian with zero-flux (mirror) treatment at the domain frame.
double laplacian(const ScalarField& f, int i, int j);

/// Sets negative values to 0; returns the removed (negative) mass as a positive number of h^2 units.
double clamp_negative(ScalarField& f);

/// Zeroes every node outside the region.
void restrict_to(ScalarField& f, const TumourRegion& region);

}  // namespace ovsim
