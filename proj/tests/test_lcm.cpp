#include <doctest.h>

#include <cmath>

#include "grensup/lcm.hpp"
#include "grensup/models.hpp"
#include "grensup/rng.hpp"
#include "oracles.hpp"

using namespace grensup;

TEST_CASE("colinear points collapse to the chord") {
    const std::vector<Knot> pts{{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}};
    const auto env = least_concave_majorant(pts);
    REQUIRE(env.vertices.size() == 2);
    CHECK(env.vertices[0] == Knot{0.0, 0.0});
    CHECK(env.vertices[1] == Knot{1.0, 1.0});
}

TEST_CASE("interior point below the chord is absorbed") {
    const std::vector<Knot> pts{{0.0, 0.0}, {0.5, 0.2}, {1.0, 1.0}};
    const auto env = least_concave_majorant(pts);
    REQUIRE(env.vertices.size() == 2);
    CHECK(env.value(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(env.vertices == test::giftwrap_majorant(pts));
}

TEST_CASE("interior point above the chord becomes a vertex") {
    const std::vector<Knot> pts{{0.0, 0.0}, {0.5, 0.6}, {1.0, 1.0}};
    const auto env = least_concave_majorant(pts);
    REQUIRE(env.vertices.size() == 3);
    CHECK(env.vertices[1] == Knot{0.5, 0.6});
    const auto fhat = slope_process(env);
    CHECK(fhat.values()[0] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(fhat.values()[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(env.vertices == test::giftwrap_majorant(pts));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(least_concave_majorant(std::vector<Knot>{{0.0, 0.0}}), std::domain_error);
    CHECK_THROWS_AS(
        least_concave_majorant(std::vector<Knot>{{0.0, 0.0}, {0.6, 1.0}, {0.4, 0.5}}),
        std::domain_error);
}

TEST_CASE("slope process conventions") {
    const ConcaveEnvelope chord{{{0.0, 0.0}, {1.0, 1.0}}};
    const auto f = slope_process(chord);
    CHECK(f.pieces() == 1);
    CHECK(f.eval(0.0) == 1.0);  // f(0) = lim_{t->0}
    CHECK(f.eval(1.0) == 1.0);

    const ConcaveEnvelope env{{{0.0, 0.0}, {0.5, 0.6}, {1.0, 1.0}}};
    const auto g = slope_process(env);
    CHECK(g.eval(0.5) == doctest::Approx(1.2).epsilon(1e-15));   // left continuity at vertex
    CHECK(g.eval(0.50001) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(g.is_nonincreasing());
}

TEST_CASE("three point Grenander estimator by hand enumeration") {
    // sample {0.3, 0.6, 0.9}: ECDF points (0,0),(0.3,1/3),(0.6,2/3),(0.9,1),(1,1)
    const std::vector<Knot> pts{
        {0.0, 0.0}, {0.3, 1.0 / 3.0}, {0.6, 2.0 / 3.0}, {0.9, 1.0}, {1.0, 1.0}};
    // chords from (0,0): slopes 1/0.9 > 2/1.8 == ... -> (0.3,1/3) has slope 10/9,
    // (0.6,2/3) the same 10/9, (0.9,1) the same; colinear triple drops middles.
    const auto env = least_concave_majorant(pts);
    const auto oracle = test::giftwrap_majorant(pts);
    CHECK(env.vertices == oracle);
    const auto fhat = slope_process(env);
    // all three sample points are colinear: one slope 10/9 to t=0.9, then flat
    CHECK(fhat.eval(0.5) == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
    CHECK(fhat.eval(0.95) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sweep equals gift-wrap oracle on random instances") {
    Rng rng(123);
    const auto dens = linear_density_model(1.5, 1.0);
    const auto regr = linear_regression_model(1.0, 1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<Knot> pts;
        const int which = rep % 3;
        if (which == 0) {
            const auto n = 2 + static_cast<std::int64_t>(rng.uniform01() * 198);
            pts = majorant_points(upper_version(
                sample_density(dens, n, {500 + static_cast<std::uint64_t>(rep), 0})));
        } else if (which == 1) {
            const auto n = 2 + static_cast<std::int64_t>(rng.uniform01() * 198);
            pts = majorant_points(upper_version(
                sample_regression(regr, n, {900 + static_cast<std::uint64_t>(rep), 0})));
        } else {
            pts = test::random_point_set(rng, 40, /*allow_colinear=*/true);
        }
        const auto env = least_concave_majorant(pts);
        const auto oracle = test::giftwrap_majorant(pts);
        REQUIRE(env.vertices.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(env.vertices[i] == oracle[i]);
    }
}

TEST_CASE("envelope dominates the points with equality at vertices") {
    Rng rng(321);
    for (int rep = 0; rep < 50; ++rep) {
        const auto pts = test::random_point_set(rng, 30, true);
        const auto env = least_concave_majorant(pts);
        for (const auto& p : pts) CHECK(env.value(p.t) >= p.y - 1e-12);
        for (const auto& v : env.vertices) CHECK(env.value(v.t) == v.y);
        // strictly decreasing chord slopes (exact predicate; the rounded
        // double quotients may collide on near-colinear inputs)
        const auto& vs = env.vertices;
        for (std::size_t i = 2; i < vs.size(); ++i) {
            CHECK(detail::slope_turn(vs[i - 2], vs[i - 1], vs[i]) > 0);
            const double s1 = (vs[i - 1].y - vs[i - 2].y) / (vs[i - 1].t - vs[i - 2].t);
            const double s2 = (vs[i].y - vs[i - 1].y) / (vs[i].t - vs[i - 1].t);
            CHECK(s1 >= s2);
        }
    }
}

TEST_CASE("mass identity: integral of slopes telescopes to env(1) - env(0)") {
    Rng rng(55);
    const auto dens = linear_density_model(1.5, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        const auto n = 5 + static_cast<std::int64_t>(rng.uniform01() * 150);
        const auto Fn = sample_density(dens, n, {42, static_cast<std::uint64_t>(rep)});
        const auto Fp = upper_version(Fn);
        const auto env = least_concave_majorant(majorant_points(Fp));
        const auto fhat = slope_process(env);
        double integral = 0.0, prev = fhat.domain_start();
        for (std::size_t i = 0; i < fhat.pieces(); ++i) {
            integral += fhat.values()[i] * (fhat.bounds()[i] - prev);
            prev = fhat.bounds()[i];
        }
        CHECK(std::fabs(integral - Fp.eval(1.0)) < 1e-10);
        CHECK(fhat.is_nonincreasing());
    }
}

TEST_CASE("envelope json round trip") {
    const ConcaveEnvelope env{{{0.0, 0.0}, {0.5, 0.6}, {1.0, 1.0}}};
    const auto back = ConcaveEnvelope::from_json(env.to_json());
    CHECK(back.vertices == env.vertices);
}
