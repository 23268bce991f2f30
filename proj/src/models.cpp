#include "grensup/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "grensup/rng.hpp"

namespace grensup {

double MonotoneModel::F_inverse(double u) const {
    if (kind != ModelKind::density)
        throw std::domain_error("F_inverse: only defined for the density model");
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("F_inverse: u outside [0,1]");
    // solve c0 t - c1 t^2 / 2 = u for the root in [0,1]
    const double t = (c0 - std::sqrt(c0 * c0 - 2.0 * c1 * u)) / c1;
    return std::clamp(t, 0.0, 1.0);
}

double MonotoneModel::weight(double t) const {
    return std::cbrt(2.0 * c1 * Lprime(t));
}

double MonotoneModel::weight_prime(double t) const {
    if (kind == ModelKind::regression) return 0.0;
    // d/dt (2 c1 f(t))^{1/3} with f' = -c1
    const double w = weight(t);
    return -2.0 * c1 * c1 / (3.0 * w * w);
}

double MonotoneModel::norm_A(double a) const {
    const double lp = Lprime(g(a));
    return std::pow(c1, 2.0 / 3.0) / std::cbrt(4.0 * lp);
}

double MonotoneModel::norm_A_prime(double a) const {
    if (kind == ModelKind::regression) return 0.0;
    if (a <= f(1.0) || a >= f(0.0)) return 0.0;  // g clamped, A locally constant
    // density: L'(g(a)) = f(g(a)) = a inside the range
    return -std::pow(c1, 2.0 / 3.0) * 4.0 / (3.0 * std::pow(4.0 * a, 4.0 / 3.0));
}

double MonotoneModel::norm_B(double t) const {
    return 1.0 / std::cbrt(4.0 * c1 * Lprime(t));
}

nlohmann::json MonotoneModel::to_json() const {
    nlohmann::json j = {{"kind", kind == ModelKind::density ? "density" : "regression"},
                        {"c0", c0},
                        {"c1", c1}};
    if (kind == ModelKind::regression) {
        j["sigma"] = sigma;
        j["noise"] = noise == NoiseKind::gaussian ? "gaussian" : "bounded";
    }
    return j;
}

MonotoneModel MonotoneModel::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "density")
        return linear_density_model(j.at("c0").get<double>(), j.at("c1").get<double>());
    if (kind == "regression") {
        NoiseKind noise = NoiseKind::gaussian;
        if (j.contains("noise") && j.at("noise").get<std::string>() == "bounded")
            noise = NoiseKind::bounded;
        return linear_regression_model(j.at("c0").get<double>(), j.at("c1").get<double>(),
                                       j.at("sigma").get<double>(), noise);
    }
    throw std::invalid_argument("MonotoneModel::from_json: unknown kind " + kind);
}

MonotoneModel linear_density_model(double c0, double c1) {
    if (!(c1 > 0.0)) throw std::domain_error("linear_density_model: need c1 > 0");
    if (!(c0 - c1 > 0.0)) throw std::domain_error("linear_density_model: need f(1) = c0 - c1 > 0");
    if (std::fabs(c0 - 0.5 * c1 - 1.0) > 1e-12)
        throw std::domain_error("linear_density_model: unit mass requires c0 - c1/2 = 1");
    return MonotoneModel{ModelKind::density, c0, c1, 0.0, NoiseKind::gaussian};
}

MonotoneModel linear_regression_model(double c0, double c1, double sigma, NoiseKind noise) {
    if (!(c1 > 0.0)) throw std::domain_error("linear_regression_model: need c1 > 0");
    if (!(sigma > 0.0)) throw std::domain_error("linear_regression_model: need sigma > 0");
    return MonotoneModel{ModelKind::regression, c0, c1, sigma, noise};
}

CadlagStep sample_density_from_uniforms(const MonotoneModel& model, std::span<const double> u) {
    if (u.size() < 2) throw std::domain_error("sample_density: need n >= 2");
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = model.F_inverse(u[i]);
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(u.size());
    std::vector<Knot> knots;
    knots.reserve(u.size() + 1);
    knots.push_back({0.0, 0.0});
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double y = static_cast<double>(i + 1) / n;
        if (knots.back().t == x[i])
            knots.back().y = y;  // tied order statistics merge into one jump
        else
            knots.push_back({x[i], y});
    }
    return CadlagStep(std::move(knots));
}

CadlagStep sample_density(const MonotoneModel& model, std::int64_t n, SeedSpec seed) {
    if (model.kind != ModelKind::density)
        throw std::domain_error("sample_density: model kind mismatch");
    if (n < 2) throw std::domain_error("sample_density: need n >= 2");
    Rng rng(derive_stream(seed.seed, static_cast<std::uint64_t>(n), seed.replicate_index));
    std::vector<double> u(static_cast<std::size_t>(n));
    for (auto& v : u) v = rng.uniform_open();
    return sample_density_from_uniforms(model, u);
}

CadlagStep sample_regression_from_noise(const MonotoneModel& model, std::span<const double> eps) {
    const std::size_t n = eps.size();
    if (n < 2) throw std::domain_error("sample_regression: need n >= 2");
    std::vector<Knot> knots;
    knots.reserve(n + 1);
    knots.push_back({0.0, 0.0});
    double sum = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) / dn;
        sum += model.f(t) + eps[i - 1];
        knots.push_back({t, sum / dn});
    }
    return CadlagStep(std::move(knots));
}

CadlagStep sample_regression(const MonotoneModel& model, std::int64_t n, SeedSpec seed) {
    if (model.kind != ModelKind::regression)
        throw std::domain_error("sample_regression: model kind mismatch");
    if (n < 2) throw std::domain_error("sample_regression: need n >= 2");
    Rng rng(derive_stream(seed.seed, static_cast<std::uint64_t>(n), seed.replicate_index));
    std::vector<double> eps(static_cast<std::size_t>(n));
    if (model.noise == NoiseKind::gaussian) {
        for (auto& e : eps) e = model.sigma * rng.normal();
    } else {
        const double half = model.sigma * std::sqrt(3.0);  // variance sigma^2
        for (auto& e : eps) e = half * (2.0 * rng.uniform01() - 1.0);
    }
    return sample_regression_from_noise(model, eps);
}

CadlagStep sample(const MonotoneModel& model, std::int64_t n, SeedSpec seed) {
    return model.kind == ModelKind::density ? sample_density(model, n, seed)
                                            : sample_regression(model, n, seed);
}

}  // namespace grensup
