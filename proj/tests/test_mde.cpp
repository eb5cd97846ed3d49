#include <doctest.h>

#include <cmath>
#include <set>

#include "ovsim/mde.hpp"

using namespace ovsim;

namespace {

TumourRegion block(const Grid& g, int i0, int j0, int w, int hgt)
{
    TumourRegion r(g);
    for (int j = j0; j < j0 + hgt; ++j)
        for (int i = i0; i < i0 + w; ++i) r.insert({i, j});
    return r;
}

BoundaryMicroDomain bare_patch(int p, double side)
{
    BoundaryMicroDomain d;
    d.side = side;
    d.nodes_per_side = p;
    d.inside.assign(static_cast<std::size_t>(p) * p, 1);
    return d;
}

}  // namespace

TEST_CASE("settings validation")
{
    MdeSettings s;
    CHECK_NOTHROW(s.validate());
    s.kappa = 0.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s = MdeSettings{};
    s.nodes_per_side = 2;
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("boundary covering")
{
    const Grid g = Grid::build(1.0, 0.125);
    const double h = g.spacing();

    SUBCASE("single node")
    {
        TumourRegion r(g);
        r.insert({2, 5});
        const auto bundle = cover_boundary(r, 2 * h, 5);
        REQUIRE(bundle.size() == 1);
        CHECK(bundle[0].centre == Node{2, 5});
    }
    SUBCASE("3x3 block with epsilon = 2h gives four patches")
    {
        const TumourRegion r = block(g, 3, 3, 3, 3);
        const auto bundle = cover_boundary(r, 2 * h, 5);
        CHECK(bundle.size() == 4);
        std::set<Node> centres;
        for (const auto& d : bundle) centres.insert(d.centre);
        // Each patch spans one node either way, so the corners cover the ring.
        CHECK(centres == std::set<Node>{{3, 3}, {5, 3}, {3, 5}, {5, 5}});
    }
    SUBCASE("every boundary node and its epsilon-neighbourhood is covered")
    {
        TumourRegion r = block(g, 1, 2, 5, 4);
        r.insert({6, 3});
        const double eps = 4 * h;
        const auto bundle = cover_boundary(r, eps, 9);
        for (Node b : extract_boundary(r)) {
            bool hit = false;
            for (const auto& d : bundle)
                hit = hit || (std::abs(d.centre.i - b.i) * h <= eps / 2 + 1e-12 &&
                              std::abs(d.centre.j - b.j) * h <= eps / 2 + 1e-12);
            CHECK(hit);
        }
    }
    SUBCASE("patch inside flags")
    {
        const TumourRegion r = block(g, 2, 2, 5, 5);
        const auto bundle = cover_boundary(r, 2 * h, 5);
        for (const auto& d : bundle) {
            // Patch centres are boundary nodes and sit on the tumour edge.
            CHECK(d.inside.size() == 25);
            std::size_t inside = 0;
            for (auto f : d.inside) inside += f;
            CHECK(inside > 0);
            CHECK(inside < 25);
        }
    }
    SUBCASE("empty region throws")
    {
        CHECK_THROWS_AS(cover_boundary(TumourRegion(g), 2 * h, 5), Error);
    }
}

TEST_CASE("mde source")
{
    const Grid g = Grid::build(2.0, 0.125);
    const double h = g.spacing();
    const TumourRegion r = block(g, 0, 0, 9, 17);  // left half, x <= 1
    ScalarField c(g, 0.0), i(g, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k)
        if (r.contains_index(k)) c[k] = 0.4;
    const auto bundle = cover_boundary(r, 4 * h, 9);
    REQUIRE_FALSE(bundle.empty());
    for (const auto& d : bundle) {
        const auto G = mde_source(d, c, i, r, 1.0, 1.5, 2 * h);
        for (int q = 0; q < 9; ++q)
            for (int p = 0; p < 9; ++p) {
                const double v = G[d.index(p, q)];
                if (!d.inside[d.index(p, q)]) CHECK(v == 0.0);
                // Balls straddling the edge average over the covered part only.
                else CHECK(v == doctest::Approx(0.4));
            }
    }
    // Mixed populations weight by gamma.
    ScalarField i2(g, 0.0);
    for (std::size_t k = 0; k < i2.size(); ++k)
        if (r.contains_index(k)) i2[k] = 0.2;
    const auto G = mde_source(bundle[0], c, i2, r, 1.0, 1.5, 2 * h);
    for (std::size_t k = 0; k < G.size(); ++k)
        if (bundle[0].inside[k]) CHECK(G[k] == doctest::Approx(0.4 + 1.5 * 0.2));
    CHECK_THROWS_AS(mde_source(bundle[0], c, i, r, 1.0, 1.5, 0.0), Error);
}

TEST_CASE("mde solver")
{
    const int P = 17;
    const double side = 0.125;
    const BoundaryMicroDomain d = bare_patch(P, side);
    const MdeSolver solver(P, side, 0.0025, 0.5, 20);
    CHECK(solver.step_size() == doctest::Approx(0.025));

    SUBCASE("zero source stays zero")
    {
        const auto m = solver.solve(std::vector<double>(P * P, 0.0));
        for (double v : m) CHECK(v == 0.0);
    }
    SUBCASE("constant source adds g * area * dtau per step")
    {
        const double gsrc = 0.7;
        std::vector<double> m(P * P, 0.0);
        const std::vector<double> G(P * P, gsrc);
        for (int step = 0; step < 20; ++step) {
            const double before = patch_mass(d, m);
            m = solver.advance(m, G);
            const double gain = patch_mass(d, m) - before;
            const double expect = patch_mass(d, G) * solver.step_size();
            CHECK(std::abs(gain - expect) <= 0.01 * expect);
        }
        CHECK(patch_mass(d, G) == doctest::Approx(gsrc * side * side));
    }
    SUBCASE("point source stays dihedrally symmetric")
    {
        std::vector<double> G(P * P, 0.0);
        G[d.index(8, 8)] = 10.0;
        const auto m = solver.solve(G);
        for (int q = 0; q < P; ++q)
            for (int p = 0; p < P; ++p) {
                const double v = m[d.index(p, q)];
                CHECK(std::abs(v - m[d.index(P - 1 - p, q)]) <= 1e-10);
                CHECK(std::abs(v - m[d.index(p, P - 1 - q)]) <= 1e-10);
                CHECK(std::abs(v - m[d.index(q, p)]) <= 1e-10);
                CHECK(v >= 0.0);
            }
    }
    SUBCASE("zero normal difference at the patch edge")
    {
        std::vector<double> G(P * P, 0.0);
        for (int q = 0; q < P; ++q)
            for (int p = 0; p < P / 2; ++p) G[d.index(p, q)] = 1.0;
        const auto m = solver.solve(G);
        // Rows are uniform along x2 because the source is, and the mirror
        // ghosts give the edge node the same value as its reflection.
        for (int p = 0; p < P; ++p) CHECK(m[d.index(p, 0)] == doctest::Approx(m[d.index(p, P - 1)]));
        CHECK(m[d.index(0, 5)] > m[d.index(P - 1, 5)]);
    }
    SUBCASE("bad sizes throw")
    {
        CHECK_THROWS_AS(solver.solve(std::vector<double>(3, 0.0)), Error);
        CHECK_THROWS_AS(MdeSolver(2, side, 0.0025, 0.5, 20), Error);
    }
}

TEST_CASE("boundary relocation")
{
    const Grid g = Grid::build(2.0, 0.125);
    const TumourRegion r = block(g, 0, 0, 9, 17);
    const auto bundle = cover_boundary(r, 4 * 0.125, 9);
    const BoundaryMicroDomain& d = bundle.at(0);
    const std::size_t n = d.inside.size();

    SUBCASE("no mass")
    {
        CHECK_FALSE(boundary_relocation(d, std::vector<double>(n, 0.0), 0.2, 0.5).active);
    }
    SUBCASE("all mass inside")
    {
        std::vector<double> m(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            if (d.inside[k]) m[k] = 1.0;
        CHECK_FALSE(boundary_relocation(d, m, 0.2, 0.5).active);
    }
    SUBCASE("single outside node")
    {
        std::size_t z0 = n;
        int pz = 0, qz = 0;
        for (int q = 0; q < 9 && z0 == n; ++q)
            for (int p = 8; p >= 0; --p)
                if (!d.inside[d.index(p, q)] && p != 4) {
                    z0 = d.index(p, q);
                    pz = p;
                    qz = q;
                    break;
                }
        REQUIRE(z0 < n);
        std::vector<double> m(n, 0.0);
        m[z0] = 3.0;
        const BoundaryRelocation rel = boundary_relocation(d, m, 0.2, 0.5);
        const Vec2 off = d.offset(pz, qz);
        CHECK(rel.active);
        CHECK(rel.origin == d.centre);
        CHECK(rel.direction.x == doctest::Approx(off.x / off.norm()));
        CHECK(rel.direction.y == doctest::Approx(off.y / off.norm()));
        CHECK(rel.displacement == doctest::Approx(0.5 * 4 * 0.125));
    }
    SUBCASE("uniform rescaling changes nothing")
    {
        std::vector<double> m(n);
        for (std::size_t k = 0; k < n; ++k) m[k] = 0.1 + 0.01 * static_cast<double>(k % 11);
        const BoundaryRelocation a = boundary_relocation(d, m, 0.2, 0.5);
        for (double& v : m) v *= 37.0;
        const BoundaryRelocation b = boundary_relocation(d, m, 0.2, 0.5);
        CHECK(a.active == b.active);
        CHECK(a.direction.x == doctest::Approx(b.direction.x));
        CHECK(a.direction.y == doctest::Approx(b.direction.y));
        CHECK(a.displacement == doctest::Approx(b.displacement));
        CHECK(a.displacement <= 4 * 0.125);
    }
}

TEST_CASE("tumour expansion")
{
    const Grid g = Grid::build(2.0, 0.125);
    const double h = g.spacing();
    const TumourRegion r = block(g, 0, 0, 9, 17);

    CHECK(expand_tumour(r, {}) == r);

    BoundaryRelocation inactive{{8, 8}, {1, 0}, 0.4, false};
    CHECK(expand_tumour(r, {inactive}) == r);

    BoundaryRelocation push{{8, 8}, {1, 0}, h, true};
    const TumourRegion grown = expand_tumour(r, {push});
    CHECK(grown.area() == r.area() + 1);
    CHECK(grown.contains(9, 8));

    // A whole flat edge pushed by h gains exactly the adjacent column.
    std::vector<BoundaryRelocation> edge;
    for (int j = 0; j < g.size(); ++j) edge.push_back({{8, j}, {1, 0}, h, true});
    const TumourRegion column = expand_tumour(r, edge);
    CHECK(column.area() == r.area() + static_cast<std::size_t>(g.size()));
    for (int j = 0; j < g.size(); ++j) {
        CHECK(column.contains(9, j));
        CHECK_FALSE(column.contains(10, j));
    }

    BoundaryRelocation inward{{8, 8}, {-1, 0}, 3 * h, true};
    CHECK(expand_tumour(r, {inward}) == r);
}
