#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "grensup/limitlaw.hpp"

namespace grensup {

// One truncated two-sided Brownian path W on the grid {kh : |kh| <= T},
// shared by all drift shifts c (the definition shifts the same W).
struct ZetaSimConfig {
    double half_width = 6.0;  // T, truncation of the time axis
    double step = 1e-3;       // h, grid resolution
    double c_max = 0.0;       // largest drift shift queried
    double u_max = 4.0;       // largest argmax magnitude of interest
    std::int64_t paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> c_grid;  // shifts recorded per path, within [0, c_max]

    void validate() const;  // requires T >= max(4, u_max + c_max), h > 0
};

// zeta(c) on the configured c-grid for one path.
struct ZetaSample {
    std::vector<double> zeta_at_c;
};

// Piecewise representation of c -> argmax location: the upper envelope of
// the lines y = 2 s_j c + (W_j - s_j^2).  Within a piece the active grid
// point s is fixed and zeta(c) = s - c; at breakpoints the larger s wins
// (greatest location of the maximum).
struct ArgmaxEnvelope {
    std::vector<double> start;  // piece i active on [start[i], start[i+1])
    std::vector<double> s;      // active grid location per piece

    double zeta(double c) const;
    double sup_abs_zeta(double c_lo, double c_hi) const;
};

ArgmaxEnvelope build_argmax_envelope(std::span<const double> s_grid, std::span<const double> w);

// Serial reference: greatest grid maximizer of W(s) - (s - c)^2 by direct
// scan; kept for testing and benchmarking against the envelope kernel.
double zeta_direct_scan(std::span<const double> s_grid, std::span<const double> w, double c);

// Builds the path for (cfg, path_index) and evaluates the c-grid.
ZetaSample simulate_zeta_path(const ZetaSimConfig& cfg, std::uint64_t path_index);

// OpenMP batch over paths; all outputs are indexed by path so results are
// independent of the parallelism degree.
struct ZetaBatch {
    std::vector<std::vector<double>> zeta_at;  // [c_grid index][path]
    std::vector<std::vector<double>> sup_abs;  // [delta index][path], sup over [0, delta]
};
ZetaBatch run_zeta_batch(const ZetaSimConfig& cfg, std::span<const double> deltas, int threads);

// Same Brownian paths at step h/2 and h (coarse = even-index restriction);
// used for the grid-refinement stability check with common randomness.
struct ZetaRefinementBatch {
    std::vector<double> zeta0_fine;
    std::vector<double> zeta0_coarse;
};
ZetaRefinementBatch run_zeta_refinement_batch(const ZetaSimConfig& cfg, int threads);

// Histogram density of zeta(0) samples with symmetric bins around 0.
class DensityEstimate {
  public:
    DensityEstimate(std::span<const double> samples, double bin_width,
                    std::int64_t min_samples = 100000);
    // From precomputed bin counts (deserialization and synthetic fixtures).
    DensityEstimate(double bin_width, double lo, std::vector<std::int64_t> counts);

    double bin_width() const { return bin_width_; }
    std::int64_t total() const { return total_; }
    std::size_t bins() const { return counts_.size(); }
    double center(std::size_t i) const { return lo_ + (static_cast<double>(i) + 0.5) * bin_width_; }
    std::int64_t count(std::size_t i) const { return counts_[i]; }
    double density(std::size_t i) const;

    // mu_hat(t) by linear interpolation between bin centers; integrates to 1.
    double value(double t) const;
    double mean() const;
    double sd() const;

    nlohmann::json to_json() const;

  private:
    double bin_width_;
    double lo_;  // left edge of bin 0; grid symmetric about 0
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

struct TailFit {
    TailConstants constants;
    int bins_used = 0;
    double weighted_rms = 0.0;
    double condition = 0.0;
    double t_lo_eff = 0.0, t_hi_eff = 0.0;

    nlohmann::json to_json() const;
};

// Weighted least squares of log mu_hat(t) + 2t^3/3 - log(2t) ~ log(lambda) - kappa t
// over bins with |center| in [t_lo, t_hi], both tails pooled by symmetry and
// bins below min_count dropped.  Throws with a condition report when fewer
// than three bins qualify.
TailFit fit_tail_constants(const DensityEstimate& dens, double t_lo, double t_hi,
                           std::int64_t min_count = 50);

// 2 lambda |t| exp(-2|t|^3/3 - kappa |t|).
double fitted_tail_density(const TailConstants& tails, double t);

// Empirical P(sup_{c in [0,delta]} |zeta(c)| <= u) from a batch column.
double sup_zeta_interval_prob(std::span<const double> sup_abs, double u);

}  // namespace grensup
