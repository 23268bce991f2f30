#include "grensup/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace grensup {

void StatisticWindow::validate() const {
    if (!(0.0 <= u && u < v && v <= 1.0))
        throw std::domain_error("StatisticWindow: need 0 <= u < v <= 1");
    if (!(alpha_n >= 0.0 && beta_n >= 0.0 && lo() < hi()))
        throw std::domain_error("StatisticWindow: offsets collapse the window");
}

StatisticWindow default_limit_window(std::int64_t n, double u, double v, double growth) {
    const double ln = std::log(static_cast<double>(n));
    const double off = growth * std::pow(static_cast<double>(n), -1.0 / 3.0) *
                       std::pow(ln, -1.0 / 6.0);
    StatisticWindow w{u, v, off, off};
    w.validate();
    return w;
}

nlohmann::json TailConstants::to_json() const {
    return {{"kappa", kappa}, {"lambda", lambda}, {"provenance", provenance}};
}

TailConstants TailConstants::from_json(const nlohmann::json& j) {
    TailConstants tc;
    tc.kappa = j.at("kappa").get<double>();
    tc.lambda = j.at("lambda").get<double>();
    if (j.contains("provenance")) tc.provenance = j.at("provenance").get<std::string>();
    if (!(tc.lambda > 0.0) || !(tc.kappa >= 0.0))
        throw std::domain_error("TailConstants: need lambda > 0, kappa >= 0");
    return tc;
}

double norm_A(double a, const MonotoneModel& model) {
    if (!(a >= model.f(1.0) && a <= model.f(0.0)))
        throw std::domain_error("norm_A: level outside [f(1), f(0)]");
    return model.norm_A(a);
}

double norm_B(double t, const MonotoneModel& model) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("norm_B: t outside [0,1]");
    return model.norm_B(t);
}

double c_fl(const StatisticWindow& window, const MonotoneModel& model) {
    window.validate();
    auto integrand = [&model](double t) {
        const double fp = model.fprime(t);
        return std::cbrt(fp * fp / model.Lprime(t));
    };
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, window.u, window.v, 12, 1e-12, &err);
    return 2.0 * val;
}

double mu_n(std::int64_t n, double C, const TailConstants& tails) {
    if (n < 3) throw std::domain_error("mu_n: need n >= 3 for log log n");
    if (!(C > 0.0)) throw std::domain_error("mu_n: need C > 0");
    const double ln = std::log(static_cast<double>(n));
    return 1.0 - tails.kappa / (std::cbrt(2.0) * std::pow(ln, 2.0 / 3.0)) +
           (std::log(ln) / 3.0 + std::log(tails.lambda * C)) / ln;
}

double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

double gumbel_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gumbel_quantile: p outside (0,1)");
    return -std::log(-std::log(p));
}

UnExpansion u_n_expansion(double x, std::int64_t n, double C, const TailConstants& tails) {
    if (n < 3) throw std::domain_error("u_n_expansion: need n >= 3");
    const double ln = std::log(static_cast<double>(n));
    const double cbrt2 = std::cbrt(2.0);
    UnExpansion e;
    e.a_n = cbrt2 * std::pow(ln, 2.0 / 3.0);
    e.b_n = std::pow(ln, 1.0 / 3.0) / cbrt2 - tails.kappa / std::cbrt(4.0 * ln) +
            std::cbrt(4.0) * std::log(ln) / (6.0 * std::pow(ln, 2.0 / 3.0)) +
            std::log(tails.lambda * C) / (cbrt2 * std::pow(ln, 2.0 / 3.0));
    e.u_n = x / e.a_n + e.b_n;
    return e;
}

double standardize_inverse_scale(double S, std::int64_t n, double C, const TailConstants& tails) {
    const double ln = std::log(static_cast<double>(n));
    return ln * (std::cbrt(2.0 / ln) * S - mu_n(n, C, tails));
}

namespace {

// Largest |phi| over [lo, hi] for smooth phi with derivative dphi; the sign
// pattern of dphi is scanned on a subdivision and each bracketed root is
// bisected to ~1e-12.
double max_abs_smooth(const std::function<double(double)>& phi,
                      const std::function<double(double)>& dphi, double lo, double hi) {
    double best = std::max(std::fabs(phi(lo)), std::fabs(phi(hi)));
    constexpr int kSegments = 8;
    const double step = (hi - lo) / kSegments;
    if (!(step > 0.0)) return best;
    double a = lo;
    double da = dphi(a);
    for (int seg = 0; seg < kSegments; ++seg) {
        double b = (seg + 1 == kSegments) ? hi : lo + (seg + 1) * step;
        double db = dphi(b);
        if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
            double p = a, q = b, dp = da;
            while (q - p > 1e-12) {
                const double m = 0.5 * (p + q);
                const double dm = dphi(m);
                if ((dp > 0.0 && dm > 0.0) || (dp < 0.0 && dm < 0.0)) {
                    p = m;
                    dp = dm;
                } else {
                    q = m;
                }
            }
            best = std::max(best, std::fabs(phi(0.5 * (p + q))));
        }
        a = b;
        da = db;
    }
    return best;
}

}  // namespace

double sup_weighted_function_scale(const LeftContStep& fhat, const MonotoneModel& model,
                                   const StatisticWindow& window) {
    window.validate();
    const double lo = window.lo(), hi = window.hi();
    const auto& bounds = fhat.bounds();
    const auto& vals = fhat.values();
    double best = 0.0;
    double prev = fhat.domain_start();
    for (std::size_t i = 0; i < bounds.size() && prev < hi; ++i) {
        const double pl = std::max(prev, lo);
        const double ph = std::min(bounds[i], hi);
        prev = bounds[i];
        if (!(pl < ph)) continue;
        const double v = vals[i];
        auto phi = [&](double t) { return (v - model.f(t)) / model.weight(t); };
        auto dphi = [&](double t) {
            const double w = model.weight(t);
            return (-model.fprime(t) * w - (v - model.f(t)) * model.weight_prime(t)) / (w * w);
        };
        best = std::max(best, max_abs_smooth(phi, dphi, pl, ph));
    }
    return best;
}

FunctionScaleStat sup_statistic_function_scale(const LeftContStep& fhat,
                                               const MonotoneModel& model,
                                               const StatisticWindow& window, std::int64_t n,
                                               const TailConstants& tails) {
    FunctionScaleStat st;
    st.sup_weighted = sup_weighted_function_scale(fhat, model, window);
    const double ln = std::log(static_cast<double>(n));
    st.rate_stat = std::cbrt(static_cast<double>(n) / ln) * st.sup_weighted;
    st.t_stat = ln * (st.rate_stat - mu_n(n, c_fl(window, model), tails));
    return st;
}

InverseScaleStat sup_statistic_inverse_scale(const LeftContStep& Uhat, const MonotoneModel& model,
                                             const StatisticWindow& window, std::int64_t n) {
    window.validate();
    const double a_lo = model.f(window.hi());
    const double a_hi = model.f(window.lo());
    const auto& bounds = Uhat.bounds();
    double best = 0.0;
    auto do_piece = [&](double pl, double ph, double v) {
        if (!(pl < ph)) return;
        auto phi = [&](double a) { return model.norm_A(a) * (v - model.g(a)); };
        auto dphi = [&](double a) {
            const double gp = (a > model.f(1.0) && a < model.f(0.0)) ? -1.0 / model.c1 : 0.0;
            return model.norm_A_prime(a) * (v - model.g(a)) - model.norm_A(a) * gp;
        };
        best = std::max(best, max_abs_smooth(phi, dphi, pl, ph));
    };
    best = std::fabs(model.norm_A(a_lo) * (Uhat.eval(a_lo) - model.g(a_lo)));
    double prev = a_lo;
    for (std::size_t i = 0; i < bounds.size() && prev < a_hi; ++i) {
        if (bounds[i] <= a_lo) continue;
        const double ph = std::min(bounds[i], a_hi);
        do_piece(prev, ph, Uhat.eval(ph));
        prev = ph;
    }
    if (prev < a_hi) do_piece(prev, a_hi, Uhat.eval(a_hi));

    InverseScaleStat st;
    st.sup_A = best;
    st.s_stat = std::cbrt(static_cast<double>(n)) * best;
    return st;
}

double smoothed_step_eval(const LeftContStep& fhat, double t, double bandwidth) {
    // integral of fhat against a gaussian kernel; Phi differences per piece
    auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const auto& bounds = fhat.bounds();
    const auto& vals = fhat.values();
    double acc = 0.0;
    double prev = fhat.domain_start();
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        acc += vals[i] * (Phi((t - prev) / bandwidth) - Phi((t - bounds[i]) / bandwidth));
        prev = bounds[i];
    }
    // renormalize by the kernel mass over the domain
    const double mass =
        Phi((t - fhat.domain_start()) / bandwidth) - Phi((t - bounds.back()) / bandwidth);
    return acc / mass;
}

ConfidenceBand confidence_band(const LeftContStep& fhat, const MonotoneModel& model,
                               const DerivativeSource& deriv, const StatisticWindow& window,
                               std::int64_t n, double level, const TailConstants& tails) {
    window.validate();
    const double ln = std::log(static_cast<double>(n));
    const double x = gumbel_quantile(level);
    const double c = mu_n(n, c_fl(window, model), tails) + x / ln;
    ConfidenceBand band;
    band.window = window;
    band.radius_scale = std::cbrt(ln / static_cast<double>(n)) * c;

    auto radius = [&](double t) {
        double fp, lp;
        if (deriv.mode == DerivativeSource::Mode::oracle) {
            fp = std::fabs(model.fprime(t));
            lp = model.Lprime(t);
        } else {
            fp = deriv.fprime_abs(t);
            lp = deriv.lprime(t);
            if (!(fp > 0.0) || !(lp > 0.0))
                throw std::domain_error("confidence_band: nonpositive derivative estimate");
        }
        return band.radius_scale * std::cbrt(2.0 * fp * lp);
    };

    // sample edges at the estimator breakpoints inside the window
    std::vector<double> grid;
    grid.push_back(window.lo());
    for (double b : fhat.bounds())
        if (b > window.lo() && b < window.hi()) grid.push_back(b);
    grid.push_back(window.hi());
    for (double t : grid) {
        const double fh = fhat.eval(t);
        const double r = radius(t);
        band.lower.push_back({t, fh - r});
        band.upper.push_back({t, fh + r});
    }
    return band;
}

bool band_covers_truth(const LeftContStep& fhat, const MonotoneModel& model,
                       const StatisticWindow& window, std::int64_t n, double level,
                       const TailConstants& tails) {
    const auto st = sup_statistic_function_scale(fhat, model, window, n, tails);
    return st.t_stat <= gumbel_quantile(level);
}

nlohmann::json ConfidenceBand::to_json() const {
    auto knots = [](const std::vector<Knot>& ks) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& k : ks) a.push_back({{"t", k.t}, {"y", k.y}});
        return a;
    };
    return {{"u", window.u},       {"v", window.v},
            {"alpha_n", window.alpha_n}, {"beta_n", window.beta_n},
            {"radius_scale", radius_scale}, {"lower", knots(lower)},
            {"upper", knots(upper)}};
}

double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::domain_error("ks_distance: empty sample");
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    const double m = static_cast<double>(xs.size());
    double best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        best = std::max(best, std::fabs(F - static_cast<double>(i + 1) / m));
        best = std::max(best, std::fabs(F - static_cast<double>(i) / m));
    }
    return best;
}

}  // namespace grensup
