#include <doctest.h>

#include <set>

#include "ovsim/grid.hpp"

using namespace ovsim;

namespace {

TumourRegion block(const Grid& g, int i0, int j0, int size)
{
    TumourRegion r(g);
    for (int j = j0; j < j0 + size; ++j)
        for (int i = i0; i < i0 + size; ++i) r.insert({i, j});
    return r;
}

// Brute-force boundary: members with a 4-neighbour outside the mask or the grid.
std::set<Node> scan_boundary(const TumourRegion& r)
{
    std::set<Node> out;
    const Grid& g = r.grid();
    for (int j = 0; j < g.size(); ++j) {
        for (int i = 0; i < g.size(); ++i) {
            if (!r.contains(i, j)) continue;
            if (!r.contains(i - 1, j) || !r.contains(i + 1, j) || !r.contains(i, j - 1) || !r.contains(i, j + 1))
                out.insert({i, j});
        }
    }
    return out;
}

}  // namespace

TEST_CASE("grid sizes")
{
    CHECK(Grid::build(4.0, 0.03125).size() == 129);
    CHECK(Grid::build(4.0, 2.0).size() == 3);
    CHECK(Grid::build(1.0, 0.25).size() == 5);
    const Grid g = Grid::build(1.0, 0.25);
    CHECK(g.position(2, 3).x == doctest::Approx(0.5));
    CHECK(g.position(2, 3).y == doctest::Approx(0.75));
    CHECK(g.node(g.index(3, 1)) == Node{3, 1});
}

TEST_CASE("grid rejects degenerate input")
{
    CHECK_THROWS_AS(Grid::build(1.0, 0.0), Error);
    CHECK_THROWS_AS(Grid::build(1.0, -0.1), Error);
    CHECK_THROWS_AS(Grid::build(1.0, 0.6), Error);  // N = 2
}

TEST_CASE("boundary extraction")
{
    const Grid g = Grid::build(1.0, 0.125);

    SUBCASE("single node")
    {
        TumourRegion r(g);
        r.insert({4, 4});
        CHECK(extract_boundary(r) == std::vector<Node>{{4, 4}});
    }
    SUBCASE("full grid gives the frame")
    {
        const TumourRegion r = block(g, 0, 0, g.size());
        const auto b = extract_boundary(r);
        CHECK(b.size() == static_cast<std::size_t>(4 * (g.size() - 1)));
        for (Node n : b) CHECK((n.i == 0 || n.j == 0 || n.i == g.size() - 1 || n.j == g.size() - 1));
    }
    SUBCASE("3x3 block gives its perimeter")
    {
        const TumourRegion r = block(g, 2, 3, 3);
        const auto b = extract_boundary(r);
        CHECK(b.size() == 8);
        CHECK(std::set<Node>(b.begin(), b.end()) == scan_boundary(r));
        CHECK(std::find(b.begin(), b.end(), Node{3, 4}) == b.end());
    }
    SUBCASE("irregular shape matches a neighbour scan")
    {
        TumourRegion r = block(g, 1, 1, 5);
        r.insert({6, 3});
        r.insert({0, 5});
        const auto b = extract_boundary(r);
        CHECK(std::set<Node>(b.begin(), b.end()) == scan_boundary(r));
        CHECK(std::is_sorted(b.begin(), b.end(), [](Node a, Node c) { return std::pair(a.j, a.i) < std::pair(c.j, c.i); }));
    }
    SUBCASE("empty region throws")
    {
        CHECK_THROWS_AS(extract_boundary(TumourRegion(g)), Error);
    }
}

TEST_CASE("region expansion")
{
    const Grid g = Grid::build(1.0, 0.125);
    const TumourRegion r = block(g, 2, 2, 3);
    CHECK(expand_region(r, {}) == r);
    const std::vector<Node> same = {{3, 3}};
    CHECK(expand_region(r, same) == r);
    const std::vector<Node> adjacent = {{5, 3}};
    const TumourRegion grown = expand_region(r, adjacent);
    CHECK(grown.area() == 10);
    CHECK(grown.contains(5, 3));
    const std::vector<Node> off = {{9, 0}};
    CHECK_THROWS_AS(expand_region(r, off), Error);
}

TEST_CASE("difference operators")
{
    const Grid g = Grid::build(1.0, 0.125);
    ScalarField f(g);
    for (int j = 0; j < g.size(); ++j)
        for (int i = 0; i < g.size(); ++i) f(i, j) = 2.0 * g.position(i, j).x - 3.0 * g.position(i, j).y;

    // Linear fields: exact gradient everywhere, including the one-sided frame.
    for (Node n : std::vector<Node>{{0, 0}, {4, 4}, {8, 3}}) {
        const Vec2 d = gradient(f, n.i, n.j);
        CHECK(d.x == doctest::Approx(2.0));
        CHECK(d.y == doctest::Approx(-3.0));
    }
    CHECK(laplacian(f, 4, 4) == doctest::Approx(0.0).epsilon(1e-12));

    SUBCASE("masked gradient ignores non-members")
    {
        TumourRegion r(g);
        r.insert({4, 4});
        r.insert({5, 4});
        const Vec2 d = masked_gradient(f, r, 4, 4);
        CHECK(d.x == doctest::Approx(2.0));
        CHECK(d.y == 0.0);
    }
    SUBCASE("zero-flux laplacian sums to zero")
    {
        ScalarField s(g);
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::sin(0.37 * static_cast<double>(k));
        // Every interior face is counted once from each side.
        double sum = 0.0;
        for (int j = 0; j < g.size(); ++j)
            for (int i = 0; i < g.size(); ++i) sum += laplacian(s, i, j);
        CHECK(std::abs(sum) < 1e-9);
    }
}

TEST_CASE("clamping and restriction")
{
    const Grid g = Grid::build(1.0, 0.25);
    ScalarField f(g, 1.0);
    f(1, 1) = -0.5;
    f(2, 2) = -0.25;
    CHECK(clamp_negative(f) == doctest::Approx(0.75 * 0.0625));
    CHECK(f.min() == 0.0);

    TumourRegion r(g);
    r.insert({0, 0});
    restrict_to(f, r);
    CHECK(f(0, 0) == 1.0);
    CHECK(f.integral() == doctest::Approx(0.0625));
}
