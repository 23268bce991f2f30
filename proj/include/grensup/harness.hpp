#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grensup/inverse.hpp"
#include "grensup/lcm.hpp"
#include "grensup/limitlaw.hpp"
#include "grensup/models.hpp"
#include "grensup/zeta.hpp"

namespace grensup {

// Window recipe; `fixed` pins alpha_n = beta_n = 0 (fixed-interval bands),
// otherwise the default shrinking offsets with the given growth are used.
struct WindowConfig {
    double u = 0.0;
    double v = 1.0;
    double growth = kDefaultWindowGrowth;
    bool fixed = false;

    StatisticWindow at(std::int64_t n) const;
    nlohmann::json to_json() const;
    static WindowConfig from_json(const nlohmann::json& j);
};

struct ExperimentConfig {
    MonotoneModel model = linear_density_model(1.5, 1.0);
    std::vector<std::int64_t> ns = {10000};
    std::int64_t replicates = 100;
    std::uint64_t seed = 1;
    WindowConfig window;                      // limit-statistic window
    WindowConfig band_window{0.1, 0.9, 0.0, true};  // fixed interior band window
    std::vector<double> levels = {0.9};
    TailConstants tails;
    int threads = 0;  // 0 = OpenMP default

    void validate() const;
    nlohmann::json to_json() const;
    // `tails` must be resolved by the caller (file or zeta fit) before running.
    static ExperimentConfig from_json(const nlohmann::json& j, TailConstants tails);
};

struct ReplicateRecord {
    std::int64_t n = 0;
    std::int64_t replicate = 0;
    double t_stat = 0.0;
    double s_stat = 0.0;
    double sup_raw = 0.0;      // (n/log n)^{1/3} sup |fhat-f|/|2f'L'|^{1/3}
    double max_spacing = 0.0;
    std::int64_t n_flat = 0;
    std::vector<std::uint8_t> cover;  // band-window coverage per level
};

ReplicateRecord compute_replicate(const MonotoneModel& model, std::int64_t n,
                                  std::int64_t replicate, std::uint64_t seed,
                                  const StatisticWindow& window,
                                  const StatisticWindow& band_window,
                                  std::span<const double> levels, const TailConstants& tails);

struct LimitRun {
    std::vector<ReplicateRecord> records;
    nlohmann::json summary;
};

// Seeded replicate fan-out (OpenMP) + order-insensitive aggregation:
// empirical law of T_n per n (KS distance to Gumbel, medians), the rate
// envelope fractions and band coverage per level.
LimitRun run_limit_experiment(const ExperimentConfig& cfg);

// Serial reference for the fan-out; byte-identical to the parallel path.
std::vector<ReplicateRecord> run_replicates_serial(const ExperimentConfig& cfg);

// Per-n quantiles of (n/log n)^{1/3} max_spacing and of N_n, plus the
// log-log slope of median N_n across the n grid.
LimitRun run_spacing_study(const ExperimentConfig& cfg);

// Empirical simultaneous coverage per level and n; oracle derivatives gate,
// plug-in mode reported alongside when requested.
LimitRun run_band_study(const ExperimentConfig& cfg, bool with_plugin);

// Approximate plug-in coverage (kernel-smoothed derivative estimates,
// grid-checked); informational only.
bool plugin_band_covers(const LeftContStep& fhat, const MonotoneModel& model,
                        const StatisticWindow& window, std::int64_t n, double level,
                        const TailConstants& tails);

struct ZetaPipelineConfig {
    std::uint64_t seed = 1;
    bool smoke = false;

    double h = 1e-3;                // production grid step (refinement runs h/2)
    double density_T = 7.0;
    std::int64_t density_paths = 150000;
    std::vector<double> density_c_grid = {0.0, 1.0, 1.5, 3.0};
    std::vector<double> pool_c = {0.0, 1.5, 3.0};  // stationarity-pooled draws
    double bin_width = 0.02;

    std::int64_t refine_paths = 120000;
    std::int64_t oracle_paths = 20000;

    double extremal_T = 24.0;
    double extremal_c_max = 20.0;
    std::int64_t extremal_paths = 40000;
    std::vector<double> deltas = {5.0, 10.0, 20.0};
    double u_threshold = 1.4;

    double fit_lo = 1.2, fit_hi = 2.2;
    std::int64_t min_bin_count = 50;
    std::int64_t min_density_samples = 100000;
    int threads = 0;

    static ZetaPipelineConfig production(std::uint64_t seed);
    static ZetaPipelineConfig smoke_config(std::uint64_t seed);
    nlohmann::json to_json() const;
    static ZetaPipelineConfig from_json(const nlohmann::json& j);
};

struct ZetaPipelineResult {
    TailFit fit;          // production fit at step h
    TailFit fit_refined;  // coupled fit at h/2 (same Brownian paths)
    double kappa_rel_change = 0.0;
    double lambda_rel_change = 0.0;
    double sd_density = 0.0;  // sd of zeta(0) from the production density
    double sd_oracle = 0.0;   // independent (h/4, 2T) run
    double sd_rel_diff = 0.0;
    double stationarity_ks = 0.0;  // zeta(0) vs zeta(1)
    struct ExtremalRow {
        double delta, u, p_hat, ratio;
    };
    std::vector<ExtremalRow> extremal;
    std::optional<DensityEstimate> density;

    nlohmann::json summary() const;
};

// Density run, coupled refinement run, independent sd oracle and the
// extremal-probability run; writes tails.json / zeta_density.csv /
// zeta_supprob.csv / zeta_summary.json when out_dir is given.
ZetaPipelineResult run_zeta_pipeline(const ZetaPipelineConfig& cfg,
                                     const std::filesystem::path* out_dir = nullptr);

// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Shortest-roundtrip decimal formatting (std::to_chars); CSV cells.
std::string format_double(double v);

void write_records_csv(const std::filesystem::path& path,
                       std::span<const ReplicateRecord> records, std::span<const double> levels);

// Order-statistic quantile (type 1) of an unsorted sample copy.
double sample_quantile(std::vector<double> xs, double q);

}  // namespace grensup
