#include <doctest.h>

#include <cmath>

#include "grensup/models.hpp"
#include "grensup/rng.hpp"

using namespace grensup;

TEST_CASE("linear density model closed forms") {
    const auto m = linear_density_model(1.5, 1.0);
    CHECK(m.f(1.0) == 0.5);
    CHECK(m.F(1.0) == 1.0);
    CHECK(m.g(0.75) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(m.g(0.2) == 1.0);   // a <= f(1) clamps to 1
    CHECK(m.g(2.0) == 0.0);   // a >= f(0) clamps to 0
    CHECK(m.L(0.4) == m.F(0.4));
    CHECK(m.Lprime(0.4) == m.f(0.4));
}

TEST_CASE("model preconditions") {
    CHECK_THROWS_AS(linear_density_model(2.0, 2.0), std::domain_error);   // f(1) = 0
    CHECK_THROWS_AS(linear_density_model(1.4, 1.0), std::domain_error);   // mass != 1
    CHECK_THROWS_AS(linear_density_model(1.0, -0.5), std::domain_error);
    CHECK_THROWS_AS(linear_regression_model(1.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(linear_regression_model(1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("inverse cdf closed form") {
    const auto m = linear_density_model(1.5, 1.0);
    CHECK(m.F_inverse(0.25) == doctest::Approx(1.5 - std::sqrt(1.75)).epsilon(1e-15));
    CHECK(m.F_inverse(0.75) == doctest::Approx(1.5 - std::sqrt(0.75)).epsilon(1e-15));
    CHECK(m.F_inverse(0.0) == 0.0);
    CHECK(m.F_inverse(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // round trips
    for (double u : {0.05, 0.33, 0.71, 0.99})
        CHECK(m.F(m.F_inverse(u)) == doctest::Approx(u).epsilon(1e-12));
}

TEST_CASE("density sampler from forced uniforms") {
    const auto m = linear_density_model(1.5, 1.0);
    const double u[] = {0.25, 0.75};
    const auto Fn = sample_density_from_uniforms(m, u);
    REQUIRE(Fn.knots().size() == 3);
    CHECK(Fn.knots()[1].t == doctest::Approx(0.17712434446770464).epsilon(1e-14));
    CHECK(Fn.knots()[2].t == doctest::Approx(0.6339745962155614).epsilon(1e-14));
    CHECK(Fn.knots()[1].y == 0.5);
    CHECK(Fn.eval(1.0) == 1.0);  // empirical CDF reaches 1 at t = 1
}

TEST_CASE("density sampler matches the first moment") {
    const auto m = linear_density_model(1.5, 1.0);
    const auto n = std::int64_t{1000000};
    const auto Fn = sample_density(m, n, {271828, 0});
    double mean = 0.0;
    double prev_y = 0.0;
    for (const auto& k : Fn.knots()) {
        mean += k.t * (k.y - prev_y);
        prev_y = k.y;
    }
    // E X = 5/12; sd = sqrt(0.25 - (5/12)^2)
    const double se = std::sqrt(0.25 - 25.0 / 144.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(mean - 5.0 / 12.0) < 3.0 * se);
}

TEST_CASE("density sampler stays inside a DKW band") {
    const auto m = linear_density_model(1.5, 1.0);
    const auto n = std::int64_t{100000};
    const auto Fn = sample_density(m, n, {99, 1});
    // DKW at level 1e-3: eps = sqrt(log(2/alpha) / (2n))
    const double eps = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * static_cast<double>(n)));
    double worst = 0.0;
    for (const auto& k : Fn.knots()) {
        worst = std::max(worst, std::fabs(k.y - m.F(k.t)));
        if (k.t > 0.0) worst = std::max(worst, std::fabs(Fn.left_limit(k.t) - m.F(k.t)));
    }
    CHECK(worst < eps);
}

TEST_CASE("regression model and partial sums") {
    const auto m = linear_regression_model(1.0, 1.0, 1.0);
    CHECK(m.Lprime(0.3) == 1.0);
    CHECK(m.fprime(0.3) == -1.0);
    CHECK(m.g(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.norm_A(0.5) == doctest::Approx(std::pow(4.0, -1.0 / 3.0)).epsilon(1e-15));

    const double eps0[] = {0.0, 0.0, 0.0, 0.0};
    const auto Fn = sample_regression_from_noise(m, eps0);
    CHECK(Fn.eval(1.0) == doctest::Approx(0.375).epsilon(1e-15));  // (0.75+0.5+0.25+0)/4
    CHECK(Fn.knots().size() == 5);
}

TEST_CASE("regression noise produces downward steps handled by upper version") {
    const auto m = linear_regression_model(1.0, 1.0, 2.0);
    const auto Fn = sample_regression(m, 50, {1234, 5});
    const auto Fp = upper_version(Fn);
    int down = 0, lifted = 0;
    const auto& ks = Fn.knots();
    for (std::size_t i = 1; i < ks.size(); ++i) {
        if (ks[i].y < ks[i - 1].y) {
            ++down;
            if (Fp.eval(ks[i].t) == ks[i - 1].y && Fp.eval(ks[i].t) > ks[i].y) ++lifted;
        }
    }
    CHECK(down > 0);
    CHECK(lifted == down);
}

TEST_CASE("generalized inverse identities") {
    for (const auto& m : {linear_density_model(1.5, 1.0), linear_regression_model(1.0, 1.0, 1.0)}) {
        for (int i = 0; i <= 50; ++i) {
            const double t = static_cast<double>(i) / 50.0;
            CHECK(m.g(m.f(t)) == doctest::Approx(t).epsilon(1e-12));
        }
        for (int i = 0; i <= 50; ++i) {
            const double a = m.f(1.0) + (m.f(0.0) - m.f(1.0)) * static_cast<double>(i) / 50.0;
            CHECK(m.f(m.g(a)) == doctest::Approx(a).epsilon(1e-12));
        }
    }
}

TEST_CASE("samplers are bit-reproducible in SeedSpec") {
    const auto m = linear_density_model(1.5, 1.0);
    const auto a = sample_density(m, 500, {7, 3});
    const auto b = sample_density(m, 500, {7, 3});
    const auto c = sample_density(m, 500, {7, 4});
    CHECK(a.knots() == b.knots());
    CHECK(a.knots() != c.knots());

    const auto r = linear_regression_model(1.0, 1.0, 1.0);
    CHECK(sample_regression(r, 300, {9, 0}).knots() == sample_regression(r, 300, {9, 0}).knots());
}

TEST_CASE("bounded noise alternative") {
    const auto m = linear_regression_model(1.0, 1.0, 0.5, NoiseKind::bounded);
    const auto Fn = sample_regression(m, 2000, {77, 0});
    // recover eps from consecutive partial sums; all within sqrt(3) sigma
    const auto& ks = Fn.knots();
    double var = 0.0;
    for (std::size_t i = 1; i < ks.size(); ++i) {
        const double y = (ks[i].y - ks[i - 1].y) * 2000.0;
        const double eps = y - m.f(ks[i].t);
        CHECK(std::fabs(eps) <= std::sqrt(3.0) * 0.5 + 1e-9);
        var += eps * eps;
    }
    var /= 1999.0;
    CHECK(var == doctest::Approx(0.25).epsilon(0.15));
}

TEST_CASE("model json round trip") {
    const auto m = linear_regression_model(1.25, 0.75, 0.5, NoiseKind::bounded);
    const auto back = MonotoneModel::from_json(m.to_json());
    CHECK(back.kind == m.kind);
    CHECK(back.c0 == m.c0);
    CHECK(back.c1 == m.c1);
    CHECK(back.sigma == m.sigma);
    CHECK(back.noise == m.noise);
    CHECK_THROWS(MonotoneModel::from_json(nlohmann::json{{"kind", "weibull"}}));
}
