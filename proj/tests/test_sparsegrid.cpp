#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "p3t/exactgeom.hpp"
#include "p3t/sparsegrid.hpp"

using namespace p3t;
using p3t_tests::SparseGridOracle;

TEST_CASE("make_params rounds up to the next power of four") {
    GridParams g = make_params(20);
    CHECK(g.n_eff == 64);
    CHECK(g.q == 3);
    CHECK(g.side == 896);
    CHECK(g.init_side == 640);
    CHECK(g.stretch_base == 1792);

    GridParams g4 = make_params(4);
    CHECK(g4.n_eff == 4);
    CHECK(g4.q == 1);
    CHECK(g4.side == 56);

    CHECK(make_params(3).n_eff == 4);
    CHECK(make_params(64).n_eff == 64);
    CHECK(make_params(65).n_eff == 256);
    CHECK_THROWS_AS(make_params(2), PreconditionError);
}

TEST_CASE("contains: worked membership examples") {
    GridParams g = make_params(64); // q = 3
    CHECK(contains(GridPoint{8, 5}, g));   // full column, 8 | 8*5
    CHECK(contains(GridPoint{3, 3}, g));   // forward diagonal
    CHECK_FALSE(contains(GridPoint{1, 2}, g));
    CHECK_THROWS_AS(contains(GridPoint{-1, 0}, g), PreconditionError);
    CHECK_THROWS_AS(contains(GridPoint{0, g.side + 1}, g), PreconditionError);

    GridParams g1 = make_params(4); // q = 1: everything qualifies
    CHECK(contains(GridPoint{1, 1}, g1));
}

TEST_CASE("contains agrees with the definitional enumeration") {
    for (std::int64_t n : {4, 16, 64}) {
        GridParams g = make_params(n);
        SparseGridOracle oracle(g);
        for (std::int64_t y = 0; y <= g.side; ++y)
            for (std::int64_t x = 0; x <= g.side; ++x)
                if (contains(GridPoint{x, y}, g) != oracle.contains(x, y))
                    FAIL("mismatch at (" << x << "," << y << ") for n_eff " << g.n_eff);
    }
    SUCCEED();
}

TEST_CASE("count_points matches enumeration and the frozen golden values") {
    CHECK(count_points(make_params(4)) == 3249); // 57^2: q = 1 fills the grid
    CHECK(count_points(make_params(16)) == 38081);
    CHECK(count_points(make_params(64)) == 403201);
    for (std::int64_t n : {16, 64}) {
        GridParams g = make_params(n);
        CHECK(count_points(g) == SparseGridOracle(g).count());
    }
    CHECK(count_points(make_params(64)) > count_points(make_params(16)));
}

TEST_CASE("count bound: |B_n| <= 250 * n^1.5 * log2 n") {
    for (std::int64_t n : {16, 64, 256}) {
        GridParams g = make_params(n);
        double ratio = static_cast<double>(count_points(g)) /
                       (std::pow(static_cast<double>(g.n_eff), 1.5) *
                        std::log2(static_cast<double>(g.n_eff)));
        CHECK(ratio <= 250.0);
    }
}

TEST_CASE("point_in_rect: constructive hit") {
    GridParams g = make_params(16); // q = 2
    GridPoint p = point_in_rect(OpenRect{0, 3, 0, 7}, g);
    CHECK(p == GridPoint{2, 4});

    GridPoint p2 = point_in_rect(OpenRect{0, 9, 0, 9}, g);
    CHECK(contains(p2, g));
    SparseGridOracle oracle(g);
    CHECK(oracle.contains(p2.x, p2.y));

    GridParams g3 = make_params(64);
    CHECK_THROWS_AS(point_in_rect(OpenRect{0, 2, 0, 2}, g3), PreconditionError);
}

TEST_CASE("point_in_rect: random rectangles meeting the density bound") {
    GridParams g = make_params(64);
    std::mt19937_64 rng(11);
    int tested = 0;
    while (tested < 1000) {
        std::int64_t x1 = static_cast<std::int64_t>(rng() % (g.side - 2));
        std::int64_t y1 = static_cast<std::int64_t>(rng() % (g.side - 2));
        std::int64_t w = 2 + static_cast<std::int64_t>(rng() % 64);
        std::int64_t h = 2 + static_cast<std::int64_t>(rng() % 64);
        OpenRect r{x1, std::min(x1 + w, g.side), y1, std::min(y1 + h, g.side)};
        if (!r.valid() || r.width() <= 1 || r.height() <= 1 || r.area() < 4 * g.spacing())
            continue;
        ++tested;
        GridPoint p = point_in_rect(r, g);
        REQUIRE(r.contains_point(p));
        REQUIRE(contains(p, g));
    }
}

TEST_CASE("diagonal_point_in_rect: worked examples") {
    GridParams g = make_params(64); // q = 3
    CHECK(diagonal_point_in_rect(OpenRect{4, 6, 0, 10}, Diagonal::Forward, g) == GridPoint{5, 5});
    CHECK(diagonal_point_in_rect(OpenRect{0, 10, 4, 6}, Diagonal::Backward, g) == GridPoint{3, 5});
    CHECK_THROWS_AS(diagonal_point_in_rect(OpenRect{0, 2, 0, 2}, Diagonal::Forward, g),
                    PreconditionError);
}

TEST_CASE("diagonal_point_in_rect: random rectangles, both directions") {
    GridParams g = make_params(64);
    std::mt19937_64 rng(12);
    int tested = 0;
    while (tested < 1000) {
        bool tall = (rng() & 1) != 0;
        std::int64_t w = tall ? 2 + static_cast<std::int64_t>(rng() % 20)
                              : g.spacing() + 1 + static_cast<std::int64_t>(rng() % 40);
        std::int64_t h = tall ? g.spacing() + 1 + static_cast<std::int64_t>(rng() % 40)
                              : 2 + static_cast<std::int64_t>(rng() % 20);
        std::int64_t x1 = static_cast<std::int64_t>(rng() % (g.side - w));
        std::int64_t y1 = static_cast<std::int64_t>(rng() % (g.side - h));
        OpenRect r{x1, x1 + w, y1, y1 + h};
        ++tested;
        for (Diagonal dir : {Diagonal::Forward, Diagonal::Backward}) {
            GridPoint p = diagonal_point_in_rect(r, dir, g);
            REQUIRE(r.contains_point(p));
            REQUIRE(contains(p, g));
            REQUIRE((dir == Diagonal::Forward ? on_forward_diagonal(p, g)
                                              : on_backward_diagonal(p, g)));
        }
    }
}

TEST_CASE("cross_product_in_rect: split selection and membership") {
    GridParams g = make_params(64); // q = 3
    CrossProduct cp = cross_product_in_rect(OpenRect{0, 40, 0, 20}, 4, g);
    CHECK(cp.k == 2);
    CHECK(cp.xs.size() == 9); // multiples of 4 in (0,40)
    CHECK(cp.ys.size() == 9); // multiples of 2 in (0,20)
    for (std::int64_t x : cp.xs)
        for (std::int64_t y : cp.ys) CHECK(contains(GridPoint{x, y}, g));

    // width exactly 2m admits no split
    CHECK_THROWS_AS(cross_product_in_rect(OpenRect{0, 8, 0, 100}, 4, g), PreconditionError);
}

TEST_CASE("stretch: exact powers") {
    GridParams g = make_params(4); // base 112
    CHECK(stretch(GridPoint{5, 0}, g).y == 1);
    CHECK(stretch(GridPoint{2, 1}, g).y == 112);
    BigInt by_mult = 1;
    for (int i = 0; i < 3; ++i) by_mult *= 112;
    CHECK(stretch(GridPoint{2, 3}, g).y == by_mult);
    CHECK(stretch(GridPoint{2, 3}, g).y == BigInt(1404928));

    StretchTable tau(g);
    CHECK(tau.power(3) == by_mult);
    CHECK(tau.power(0) == 1);
}

TEST_CASE("shift closure: +-2^q translations stay in B_n or leave the section") {
    for (std::int64_t n : {16, 64}) {
        GridParams g = make_params(n);
        SparseGridOracle oracle(g);
        std::mt19937_64 rng(13);
        const std::int64_t sp = g.spacing();
        int done = 0;
        while (done < 10000) {
            GridPoint p{static_cast<std::int64_t>(rng() % (g.side + 1)),
                        static_cast<std::int64_t>(rng() % (g.side + 1))};
            if (!contains(p, g)) continue;
            ++done;
            const GridPoint moves[4] = {{p.x + sp, p.y}, {p.x - sp, p.y}, {p.x, p.y + sp}, {p.x, p.y - sp}};
            for (const GridPoint& q : moves) {
                if (!in_bounds(q, g)) continue;
                if (!contains(q, g))
                    FAIL("shift closure broken: (" << p.x << "," << p.y << ") -> (" << q.x << ","
                                                   << q.y << ") n_eff " << g.n_eff);
                REQUIRE(oracle.contains(q.x, q.y));
            }
        }
    }
    SUCCEED();
}

TEST_CASE("stretched middle point lies strictly below the outer segment") {
    GridParams g = make_params(16);
    StretchTable tau(g);
    std::mt19937_64 rng(14);
    const std::int64_t cap = 200; // keep exponents small, property is per-triple
    for (int it = 0; it < 1000; ++it) {
        std::int64_t a1 = static_cast<std::int64_t>(rng() % cap);
        std::int64_t a2 = a1 + 1 + static_cast<std::int64_t>(rng() % 10);
        std::int64_t a3 = a2 + 1 + static_cast<std::int64_t>(rng() % 10);
        std::int64_t b1 = static_cast<std::int64_t>(rng() % cap);
        std::int64_t b2 = b1 + 1 + static_cast<std::int64_t>(rng() % 5);
        std::int64_t b3 = b2 + 1 + static_cast<std::int64_t>(rng() % 5);
        bool decreasing = (rng() & 1) != 0;
        if (decreasing) std::swap(b1, b3);
        StretchedPoint p1 = tau(GridPoint{a1, b1});
        StretchedPoint p2 = tau(GridPoint{a2, b2});
        StretchedPoint p3 = tau(GridPoint{a3, b3});
        // below the segment p1->p3 means a left turn at the middle point
        REQUIRE(orientation(p1, p2, p3) == Orientation::Left);
    }
}

TEST_CASE("every grid point of the spanned box lands inside the stretched triangle") {
    GridParams g = make_params(16);
    StretchTable tau(g);
    std::mt19937_64 rng(15);
    for (int it = 0; it < 1000; ++it) {
        std::int64_t ax = static_cast<std::int64_t>(rng() % 40);
        std::int64_t bx = ax + 2 + static_cast<std::int64_t>(rng() % 30);
        std::int64_t ay = static_cast<std::int64_t>(rng() % 20);
        std::int64_t by = static_cast<std::int64_t>(rng() % 20);
        std::int64_t ty = std::max(ay, by) + 1 + static_cast<std::int64_t>(rng() % 20);
        std::int64_t tx = static_cast<std::int64_t>(rng() % 80); // top x unconstrained
        StretchedPoint pa = tau(GridPoint{ax, ay});
        StretchedPoint pb = tau(GridPoint{bx, by});
        StretchedPoint pt = tau(GridPoint{tx, ty});
        OpenRect box{ax, bx, std::max(ay, by), ty};
        for (std::int64_t x = box.x1 + 1; x < box.x2; ++x)
            for (std::int64_t y = box.y1 + 1; y < box.y2; ++y)
                if (!detail::point_in_triangle_strict(pa, pb, pt, tau(GridPoint{x, y})))
                    FAIL("box point (" << x << "," << y << ") escapes triangle (" << ax << ","
                                       << ay << ")(" << bx << "," << by << ")(" << tx << "," << ty
                                       << ")");
    }
    SUCCEED();
}
