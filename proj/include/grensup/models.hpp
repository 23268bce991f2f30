#pragma once

#include <cstdint>
#include <span>

#include <json.hpp>

#include "grensup/stepfn.hpp"

namespace grensup {

// (seed, replicate_index) pins the entire sample of one replicate.
struct SeedSpec {
    std::uint64_t seed = 0;
    std::uint64_t replicate_index = 0;
};

enum class ModelKind { density, regression };
enum class NoiseKind { gaussian, bounded };

// Analytic truth bundle for the linear test family f(t) = c0 - c1 t on [0,1].
//
// f is strictly decreasing with f' = -c1 bounded away from 0, L' is bounded
// away from 0 and infinity, and f'/L'' are Lipschitz, so the family meets the
// assumptions of the limit theory with Hoelder exponent 1.
struct MonotoneModel {
    ModelKind kind;
    double c0;
    double c1;
    double sigma;      // regression only
    NoiseKind noise;   // regression only

    double f(double t) const { return c0 - c1 * t; }
    double fprime(double) const { return -c1; }
    double F(double t) const { return c0 * t - 0.5 * c1 * t * t; }

    // Generalized inverse of f: g(a)=1 for a <= f(1), g(a)=0 for a >= f(0).
    double g(double a) const {
        const double t = (c0 - a) / c1;
        return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    }

    double L(double t) const { return kind == ModelKind::density ? F(t) : sigma * sigma * t; }
    double Lprime(double t) const { return kind == ModelKind::density ? f(t) : sigma * sigma; }

    // Inverse CDF of the density model.
    double F_inverse(double u) const;

    // |2 f'(t) L'(t)|^{1/3} and its derivative; the weight of the sup statistic.
    double weight(double t) const;
    double weight_prime(double t) const;

    // A(a) = |f'(g(a))|^{2/3} / (4 L'(g(a)))^{1/3} and its derivative in a.
    double norm_A(double a) const;
    double norm_A_prime(double a) const;
    // B(t) = (4 |f'(t)| L'(t))^{-1/3}.
    double norm_B(double t) const;

    nlohmann::json to_json() const;
    static MonotoneModel from_json(const nlohmann::json& j);
};

// Grenander test model: density f(t) = c0 - c1 t, requires unit mass
// (c0 - c1/2 = 1), c1 > 0 and f(1) > 0.
MonotoneModel linear_density_model(double c0, double c1);

// Brunk test model: regression f(t) = c0 - c1 t with noise sd sigma > 0.
MonotoneModel linear_regression_model(double c0, double c1, double sigma,
                                      NoiseKind noise = NoiseKind::gaussian);

// Empirical CDF of n i.i.d. draws by inverse-CDF transform of the seeded
// uniform stream; knots at the order statistics.
CadlagStep sample_density(const MonotoneModel& model, std::int64_t n, SeedSpec seed);
// Test hook: same construction from explicit uniforms.
CadlagStep sample_density_from_uniforms(const MonotoneModel& model, std::span<const double> u);

// Partial-sum process F_n(t) = (1/n) sum_{i<=nt} y_i with y_i = f(i/n) + eps_i.
CadlagStep sample_regression(const MonotoneModel& model, std::int64_t n, SeedSpec seed);
// Test hook: explicit noise vector (eps.size() == n).
CadlagStep sample_regression_from_noise(const MonotoneModel& model, std::span<const double> eps);

CadlagStep sample(const MonotoneModel& model, std::int64_t n, SeedSpec seed);

}  // namespace grensup
