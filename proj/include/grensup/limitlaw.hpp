#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "grensup/models.hpp"
#include "grensup/stepfn.hpp"

namespace grensup {

// Default offset growth: alpha_n = beta_n = growth * n^{-1/3} (log n)^{-1/6},
// which exceeds the n^{-1/3}(log n)^{-2/3} threshold scale by growth*(log n)^{1/2}.
inline constexpr double kDefaultWindowGrowth = 1.0 / 3.0;

// Sup-statistic window (u + alpha_n, v - beta_n].
struct StatisticWindow {
    double u = 0.0;
    double v = 1.0;
    double alpha_n = 0.0;
    double beta_n = 0.0;

    double lo() const { return u + alpha_n; }
    double hi() const { return v - beta_n; }
    void validate() const;
};

StatisticWindow default_limit_window(std::int64_t n, double u = 0.0, double v = 1.0,
                                     double growth = kDefaultWindowGrowth);

// Tail constants of the zeta(0) density, mu(t) ~ 2 lambda |t| e^{-2|t|^3/3 - kappa|t|}.
struct TailConstants {
    double kappa = 0.0;
    double lambda = 1.0;
    std::string provenance;

    nlohmann::json to_json() const;
    static TailConstants from_json(const nlohmann::json& j);
};

// A(a) = |f'(g(a))|^{2/3} / (4 L'(g(a)))^{1/3}; domain [f(1), f(0)].
double norm_A(double a, const MonotoneModel& model);
// B(t) = (4 |f'(t)| L'(t))^{-1/3}.
double norm_B(double t, const MonotoneModel& model);

// C_{f,L} = 2 int_u^v (f'(t)^2 / L'(t))^{1/3} dt, adaptive quadrature.
double c_fl(const StatisticWindow& window, const MonotoneModel& model);

// Centering sequence mu_n = 1 - kappa/(2^{1/3}(log n)^{2/3})
//                          + (log log n / 3 + log(lambda C)) / log n.
double mu_n(std::int64_t n, double C, const TailConstants& tails);

double gumbel_cdf(double x);
double gumbel_quantile(double p);

// u_n = x/a_n + b_n with a_n = 2^{1/3}(log n)^{2/3}; a_n(S - b_n) equals the
// log n{(2/log n)^{1/3} S - mu_n} standardization identically.
struct UnExpansion {
    double a_n;
    double b_n;
    double u_n;
};
UnExpansion u_n_expansion(double x, std::int64_t n, double C, const TailConstants& tails);

// log n {(2/log n)^{1/3} S - mu_n}; the standardized inverse-scale statistic.
double standardize_inverse_scale(double S, std::int64_t n, double C, const TailConstants& tails);

// Exact sup over the window of |fhat - f| / |2 f' L'|^{1/3}; per piece the
// extremum is bracketed by the endpoints and at most one stationary point of
// the weighted difference, located by bisection on its derivative sign.
double sup_weighted_function_scale(const LeftContStep& fhat, const MonotoneModel& model,
                                   const StatisticWindow& window);

struct FunctionScaleStat {
    double sup_weighted;  // sup |fhat-f|/w
    double rate_stat;     // (n/log n)^{1/3} * sup_weighted
    double t_stat;        // log n (rate_stat - mu_n)
};
FunctionScaleStat sup_statistic_function_scale(const LeftContStep& fhat,
                                               const MonotoneModel& model,
                                               const StatisticWindow& window, std::int64_t n,
                                               const TailConstants& tails);

struct InverseScaleStat {
    double sup_A;   // sup A(a) |Uhat(a) - g(a)| over [f(hi), f(lo)]
    double s_stat;  // n^{1/3} * sup_A
};
InverseScaleStat sup_statistic_inverse_scale(const LeftContStep& Uhat, const MonotoneModel& model,
                                             const StatisticWindow& window, std::int64_t n);

// Confidence band fhat +- (log n/n)^{1/3} |2 f' L'|^{1/3} {mu_n + x/log n}.
struct DerivativeSource {
    enum class Mode { oracle, plugin } mode = Mode::oracle;
    // plug-in evaluators; |f'| estimate must be positive on the window
    std::function<double(double)> fprime_abs;
    std::function<double(double)> lprime;

    static DerivativeSource oracle() { return {}; }
    static DerivativeSource plugin(std::function<double(double)> fp,
                                   std::function<double(double)> lp) {
        return {Mode::plugin, std::move(fp), std::move(lp)};
    }
};

struct ConfidenceBand {
    StatisticWindow window;
    double radius_scale;              // (log n/n)^{1/3} (mu_n + x/log n)
    std::vector<Knot> lower, upper;   // edges sampled at fhat breakpoints

    nlohmann::json to_json() const;
};

ConfidenceBand confidence_band(const LeftContStep& fhat, const MonotoneModel& model,
                               const DerivativeSource& deriv, const StatisticWindow& window,
                               std::int64_t n, double level, const TailConstants& tails);

// Simultaneous coverage of the oracle-weight band: equivalent to
// T_n <= gumbel_quantile(level) by construction.
bool band_covers_truth(const LeftContStep& fhat, const MonotoneModel& model,
                       const StatisticWindow& window, std::int64_t n, double level,
                       const TailConstants& tails);

// Gaussian-kernel smoothing of a step function (exact piecewise integrals);
// used by the plug-in derivative mode with bandwidth ~ n^{-1/5}.
double smoothed_step_eval(const LeftContStep& fhat, double t, double bandwidth);

// One-sample Kolmogorov-Smirnov distance against a cdf (sample gets sorted).
double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);

}  // namespace grensup
