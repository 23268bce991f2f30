#include "grensup/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <omp.h>

#include "grensup/rng.hpp"

namespace grensup {

StatisticWindow WindowConfig::at(std::int64_t n) const {
    if (fixed) {
        StatisticWindow w{u, v, 0.0, 0.0};
        w.validate();
        return w;
    }
    return default_limit_window(n, u, v, growth);
}

nlohmann::json WindowConfig::to_json() const {
    return {{"u", u}, {"v", v}, {"growth", growth}, {"fixed", fixed}};
}

WindowConfig WindowConfig::from_json(const nlohmann::json& j) {
    WindowConfig w;
    if (j.contains("u")) w.u = j.at("u").get<double>();
    if (j.contains("v")) w.v = j.at("v").get<double>();
    if (j.contains("growth")) w.growth = j.at("growth").get<double>();
    if (j.contains("fixed")) w.fixed = j.at("fixed").get<bool>();
    return w;
}

void ExperimentConfig::validate() const {
    if (replicates < 1) throw std::invalid_argument("ExperimentConfig: replicates must be >= 1");
    if (ns.empty()) throw std::invalid_argument("ExperimentConfig: empty n list");
    for (auto n : ns)
        if (n < 100) throw std::invalid_argument("ExperimentConfig: n values must be >= 100");
    for (double p : levels)
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("ExperimentConfig: levels must be in (0,1)");
    if (!(tails.lambda > 0.0))
        throw std::invalid_argument("ExperimentConfig: tail constants not resolved");
}

// threads is an execution detail, not part of the experiment identity, so it
// stays out of serialized configs (outputs must not depend on it).
nlohmann::json ExperimentConfig::to_json() const {
    return {{"schema_version", 1},
            {"model", model.to_json()},
            {"n", ns},
            {"replicates", replicates},
            {"seed", seed},
            {"window", window.to_json()},
            {"band_window", band_window.to_json()},
            {"levels", levels},
            {"tails", tails.to_json()}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, TailConstants tails) {
    if (j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("ExperimentConfig: unsupported schema version");
    ExperimentConfig cfg;
    cfg.model = MonotoneModel::from_json(j.at("model"));
    cfg.ns = j.at("n").get<std::vector<std::int64_t>>();
    cfg.replicates = j.at("replicates").get<std::int64_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("window")) cfg.window = WindowConfig::from_json(j.at("window"));
    if (j.contains("band_window"))
        cfg.band_window = WindowConfig::from_json(j.at("band_window"));
    if (j.contains("levels")) cfg.levels = j.at("levels").get<std::vector<double>>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    cfg.tails = std::move(tails);
    cfg.validate();
    return cfg;
}

namespace {

struct PerN {
    StatisticWindow win;
    StatisticWindow band_win;
    double mu_win = 0.0;
    double mu_band = 0.0;
    double rate_factor = 0.0;  // (n/log n)^{1/3}
    double log_n = 0.0;
};

PerN make_per_n(const ExperimentConfig& cfg, std::int64_t n) {
    PerN p;
    p.win = cfg.window.at(n);
    p.band_win = cfg.band_window.at(n);
    p.mu_win = mu_n(n, c_fl(p.win, cfg.model), cfg.tails);
    p.mu_band = mu_n(n, c_fl(p.band_win, cfg.model), cfg.tails);
    p.log_n = std::log(static_cast<double>(n));
    p.rate_factor = std::cbrt(static_cast<double>(n) / p.log_n);
    return p;
}

ReplicateRecord replicate_with_context(const MonotoneModel& model, std::int64_t n,
                                       std::int64_t replicate, std::uint64_t seed,
                                       const PerN& ctx, std::span<const double> levels) {
    const CadlagStep Fn = sample(model, n, SeedSpec{seed, static_cast<std::uint64_t>(replicate)});
    const LeftContStep fhat = slope_estimator(Fn);
    const LeftContStep Uhat = inverse_estimator(fhat);
    const JumpStructure js = jump_structure(fhat);

    ReplicateRecord rec;
    rec.n = n;
    rec.replicate = replicate;
    rec.sup_raw = ctx.rate_factor * sup_weighted_function_scale(fhat, model, ctx.win);
    rec.t_stat = ctx.log_n * (rec.sup_raw - ctx.mu_win);
    rec.s_stat = sup_statistic_inverse_scale(Uhat, model, ctx.win, n).s_stat;
    rec.max_spacing = max_spacing(js);
    rec.n_flat = js.n_flat;

    const double band_rate = ctx.rate_factor * sup_weighted_function_scale(fhat, model, ctx.band_win);
    const double band_t = ctx.log_n * (band_rate - ctx.mu_band);
    rec.cover.resize(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li)
        rec.cover[li] = band_t <= gumbel_quantile(levels[li]) ? 1 : 0;
    return rec;
}

std::vector<ReplicateRecord> run_replicates(const ExperimentConfig& cfg, bool parallel) {
    cfg.validate();
    std::vector<PerN> ctx;
    ctx.reserve(cfg.ns.size());
    for (auto n : cfg.ns) ctx.push_back(make_per_n(cfg, n));

    const std::int64_t M = cfg.replicates;
    std::vector<ReplicateRecord> records(cfg.ns.size() * static_cast<std::size_t>(M));
    const int nthreads =
        parallel ? (cfg.threads > 0 ? cfg.threads : omp_get_max_threads()) : 1;

#pragma omp parallel for collapse(2) schedule(dynamic) num_threads(nthreads)
    for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
        for (std::int64_t rep = 0; rep < M; ++rep) {
            records[ni * static_cast<std::size_t>(M) + static_cast<std::size_t>(rep)] =
                replicate_with_context(cfg.model, cfg.ns[ni], rep, cfg.seed, ctx[ni],
                                       cfg.levels);
        }
    }
    return records;
}

double median_of(std::vector<double> xs) { return sample_quantile(std::move(xs), 0.5); }

}  // namespace

ReplicateRecord compute_replicate(const MonotoneModel& model, std::int64_t n,
                                  std::int64_t replicate, std::uint64_t seed,
                                  const StatisticWindow& window,
                                  const StatisticWindow& band_window,
                                  std::span<const double> levels, const TailConstants& tails) {
    PerN ctx;
    ctx.win = window;
    ctx.band_win = band_window;
    ctx.mu_win = mu_n(n, c_fl(window, model), tails);
    ctx.mu_band = mu_n(n, c_fl(band_window, model), tails);
    ctx.log_n = std::log(static_cast<double>(n));
    ctx.rate_factor = std::cbrt(static_cast<double>(n) / ctx.log_n);
    return replicate_with_context(model, n, replicate, seed, ctx, levels);
}

std::vector<ReplicateRecord> run_replicates_serial(const ExperimentConfig& cfg) {
    return run_replicates(cfg, false);
}

LimitRun run_limit_experiment(const ExperimentConfig& cfg) {
    LimitRun run;
    run.records = run_replicates(cfg, true);
    const std::int64_t M = cfg.replicates;

    nlohmann::json per_n = nlohmann::json::array();
    for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
        const auto* recs = run.records.data() + ni * static_cast<std::size_t>(M);
        std::vector<double> t(M), rate(M), s_std(M);
        std::vector<double> cover_frac(cfg.levels.size(), 0.0);
        const double C = c_fl(cfg.window.at(cfg.ns[ni]), cfg.model);
        std::int64_t in_env = 0;
        for (std::int64_t r = 0; r < M; ++r) {
            t[r] = recs[r].t_stat;
            rate[r] = recs[r].sup_raw;
            s_std[r] = standardize_inverse_scale(recs[r].s_stat, cfg.ns[ni], C, cfg.tails);
            in_env += (rate[r] >= 0.5 && rate[r] <= 1.6);
            for (std::size_t li = 0; li < cfg.levels.size(); ++li)
                cover_frac[li] += recs[r].cover[li];
        }
        for (auto& c : cover_frac) c /= static_cast<double>(M);
        const double ks = ks_distance(t, gumbel_cdf);
        const double ks_s = ks_distance(s_std, gumbel_cdf);
        per_n.push_back({{"n", cfg.ns[ni]},
                         {"ks_gumbel_t", ks},
                         {"ks_gumbel_s", ks_s},
                         {"ks_t_vs_s", ks_two_sample(t, s_std)},
                         {"median_t", median_of(t)},
                         {"median_rate", median_of(rate)},
                         {"rate_envelope_frac", static_cast<double>(in_env) / static_cast<double>(M)},
                         {"median_standardized_s", median_of(s_std)},
                         {"coverage", cover_frac}});
    }
    run.summary = {{"config", cfg.to_json()}, {"per_n", std::move(per_n)}};
    return run;
}

LimitRun run_spacing_study(const ExperimentConfig& cfg) {
    LimitRun run;
    run.records = run_replicates(cfg, true);
    const std::int64_t M = cfg.replicates;

    std::vector<double> log_n, log_med_nflat;
    nlohmann::json per_n = nlohmann::json::array();
    for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
        const auto* recs = run.records.data() + ni * static_cast<std::size_t>(M);
        const double scale =
            std::cbrt(static_cast<double>(cfg.ns[ni]) / std::log(static_cast<double>(cfg.ns[ni])));
        std::vector<double> scaled(M), nf(M);
        for (std::int64_t r = 0; r < M; ++r) {
            scaled[r] = scale * recs[r].max_spacing;
            nf[r] = static_cast<double>(recs[r].n_flat);
        }
        const double med_nf = median_of(nf);
        log_n.push_back(std::log(static_cast<double>(cfg.ns[ni])));
        log_med_nflat.push_back(std::log(med_nf));
        per_n.push_back({{"n", cfg.ns[ni]},
                         {"scaled_spacing_q50", sample_quantile(scaled, 0.5)},
                         {"scaled_spacing_q95", sample_quantile(scaled, 0.95)},
                         {"median_n_flat", med_nf}});
    }
    // log-log slope of median N_n
    double slope = 0.0;
    if (log_n.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            mx += log_n[i];
            my += log_med_nflat[i];
        }
        mx /= static_cast<double>(log_n.size());
        my /= static_cast<double>(log_n.size());
        double num = 0, den = 0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            num += (log_n[i] - mx) * (log_med_nflat[i] - my);
            den += (log_n[i] - mx) * (log_n[i] - mx);
        }
        slope = num / den;
    }
    run.summary = {{"config", cfg.to_json()},
                   {"per_n", std::move(per_n)},
                   {"n_flat_loglog_slope", slope}};
    return run;
}

bool plugin_band_covers(const LeftContStep& fhat, const MonotoneModel& model,
                        const StatisticWindow& window, std::int64_t n, double level,
                        const TailConstants& tails) {
    const double ln = std::log(static_cast<double>(n));
    const double bw = std::pow(static_cast<double>(n), -0.2);
    const double c = mu_n(n, c_fl(window, model), tails) + gumbel_quantile(level) / ln;
    const double scale = std::cbrt(ln / static_cast<double>(n)) * c;
    const double d = 0.5 * bw;

    auto fprime_abs = [&](double t) {
        return -(smoothed_step_eval(fhat, t + d, bw) - smoothed_step_eval(fhat, t - d, bw)) /
               (2.0 * d);
    };
    auto lprime_est = [&](double t) {
        return model.kind == ModelKind::density ? smoothed_step_eval(fhat, t, bw)
                                                : model.sigma * model.sigma;
    };
    // grid check per estimator piece (plug-in radius is not piecewise monotone)
    const double lo = window.lo(), hi = window.hi();
    std::vector<double> grid;
    grid.push_back(lo);
    for (double b : fhat.bounds())
        if (b > lo && b < hi) grid.push_back(b);
    grid.push_back(hi);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        for (int k = 1; k <= 8; ++k) {
            const double t = grid[i] + (grid[i + 1] - grid[i]) * k / 8.0;
            const double fp = fprime_abs(t), lp = lprime_est(t);
            if (!(fp > 0.0) || !(lp > 0.0))
                throw std::domain_error("plugin_band_covers: nonpositive derivative estimate");
            const double radius = scale * std::cbrt(2.0 * fp * lp);
            if (std::fabs(fhat.eval(t) - model.f(t)) > radius) return false;
        }
    }
    return true;
}

LimitRun run_band_study(const ExperimentConfig& cfg, bool with_plugin) {
    LimitRun run;
    run.records = run_replicates(cfg, true);
    const std::int64_t M = cfg.replicates;

    nlohmann::json per_n = nlohmann::json::array();
    for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
        const auto* recs = run.records.data() + ni * static_cast<std::size_t>(M);
        std::vector<double> oracle_cov(cfg.levels.size(), 0.0);
        for (std::int64_t r = 0; r < M; ++r)
            for (std::size_t li = 0; li < cfg.levels.size(); ++li)
                oracle_cov[li] += recs[r].cover[li];
        for (auto& c : oracle_cov) c /= static_cast<double>(M);
        nlohmann::json row = {{"n", cfg.ns[ni]}, {"oracle_coverage", oracle_cov}};

        if (with_plugin) {
            const StatisticWindow bw = cfg.band_window.at(cfg.ns[ni]);
            std::vector<double> plug_cov(cfg.levels.size(), 0.0);
            std::int64_t degenerate = 0;
#pragma omp parallel for schedule(dynamic) \
    num_threads(cfg.threads > 0 ? cfg.threads : omp_get_max_threads())
            for (std::int64_t r = 0; r < M; ++r) {
                const CadlagStep Fn =
                    sample(cfg.model, cfg.ns[ni],
                           SeedSpec{cfg.seed, static_cast<std::uint64_t>(r)});
                const LeftContStep fhat = slope_estimator(Fn);
                for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
                    bool hit = false;
                    bool bad = false;
                    try {
                        hit = plugin_band_covers(fhat, cfg.model, bw, cfg.ns[ni],
                                                 cfg.levels[li], cfg.tails);
                    } catch (const std::domain_error&) {
                        bad = true;
                    }
#pragma omp critical
                    {
                        if (bad)
                            ++degenerate;
                        else
                            plug_cov[li] += hit;
                    }
                }
            }
            for (auto& c : plug_cov) c /= static_cast<double>(M);
            row["plugin_coverage"] = plug_cov;
            row["plugin_degenerate"] = degenerate;
        }
        per_n.push_back(std::move(row));
    }
    run.summary = {{"config", cfg.to_json()}, {"per_n", std::move(per_n)}};
    return run;
}

ZetaPipelineConfig ZetaPipelineConfig::production(std::uint64_t seed) {
    ZetaPipelineConfig cfg;
    cfg.seed = seed;
    return cfg;
}

ZetaPipelineConfig ZetaPipelineConfig::smoke_config(std::uint64_t seed) {
    ZetaPipelineConfig cfg;
    cfg.seed = seed;
    cfg.smoke = true;
    cfg.h = 1e-2;
    cfg.density_paths = 10000;
    cfg.refine_paths = 12000;
    cfg.oracle_paths = 3000;
    cfg.extremal_paths = 3000;
    cfg.fit_lo = 1.0;  // smaller samples need the denser part of the tail
    cfg.min_bin_count = 10;
    cfg.min_density_samples = 1000;
    return cfg;
}

nlohmann::json ZetaPipelineConfig::to_json() const {
    return {{"seed", seed},
            {"smoke", smoke},
            {"h", h},
            {"density_T", density_T},
            {"density_paths", density_paths},
            {"density_c_grid", density_c_grid},
            {"pool_c", pool_c},
            {"bin_width", bin_width},
            {"refine_paths", refine_paths},
            {"oracle_paths", oracle_paths},
            {"extremal_T", extremal_T},
            {"extremal_c_max", extremal_c_max},
            {"extremal_paths", extremal_paths},
            {"deltas", deltas},
            {"u_threshold", u_threshold},
            {"fit_lo", fit_lo},
            {"fit_hi", fit_hi},
            {"min_bin_count", min_bin_count},
            {"min_density_samples", min_density_samples}};
}

ZetaPipelineConfig ZetaPipelineConfig::from_json(const nlohmann::json& j) {
    ZetaPipelineConfig cfg;
    auto get = [&](const char* k, auto& v) {
        if (j.contains(k)) v = j.at(k).get<std::decay_t<decltype(v)>>();
    };
    get("seed", cfg.seed);
    get("smoke", cfg.smoke);
    get("h", cfg.h);
    get("density_T", cfg.density_T);
    get("density_paths", cfg.density_paths);
    get("density_c_grid", cfg.density_c_grid);
    get("pool_c", cfg.pool_c);
    get("bin_width", cfg.bin_width);
    get("refine_paths", cfg.refine_paths);
    get("oracle_paths", cfg.oracle_paths);
    get("extremal_T", cfg.extremal_T);
    get("extremal_c_max", cfg.extremal_c_max);
    get("extremal_paths", cfg.extremal_paths);
    get("deltas", cfg.deltas);
    get("u_threshold", cfg.u_threshold);
    get("fit_lo", cfg.fit_lo);
    get("fit_hi", cfg.fit_hi);
    get("min_bin_count", cfg.min_bin_count);
    get("min_density_samples", cfg.min_density_samples);
    get("threads", cfg.threads);
    return cfg;
}

nlohmann::json ZetaPipelineResult::summary() const {
    nlohmann::json ext = nlohmann::json::array();
    for (const auto& row : extremal)
        ext.push_back({{"delta", row.delta}, {"u", row.u}, {"p_hat", row.p_hat},
                       {"ratio", row.ratio}});
    return {{"fit", fit.to_json()},
            {"fit_refined", fit_refined.to_json()},
            {"kappa_rel_change", kappa_rel_change},
            {"lambda_rel_change", lambda_rel_change},
            {"sd_density", sd_density},
            {"sd_oracle", sd_oracle},
            {"sd_rel_diff", sd_rel_diff},
            {"stationarity_ks", stationarity_ks},
            {"extremal", std::move(ext)}};
}

ZetaPipelineResult run_zeta_pipeline(const ZetaPipelineConfig& cfg,
                                     const std::filesystem::path* out_dir) {
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
    ZetaPipelineResult res;

    // Phase 1: density run, zeta(c) pooled over well-separated shifts.
    ZetaSimConfig dens_cfg;
    dens_cfg.half_width = cfg.density_T;
    dens_cfg.step = cfg.h;
    dens_cfg.c_grid = cfg.density_c_grid;
    dens_cfg.c_max = *std::max_element(cfg.density_c_grid.begin(), cfg.density_c_grid.end());
    dens_cfg.paths = cfg.density_paths;
    dens_cfg.seed = derive_stream(cfg.seed, 1, 0);
    const ZetaBatch dens = run_zeta_batch(dens_cfg, {}, threads);

    std::vector<double> pooled;
    pooled.reserve(cfg.pool_c.size() * static_cast<std::size_t>(cfg.density_paths));
    for (double c : cfg.pool_c) {
        const auto it = std::find(cfg.density_c_grid.begin(), cfg.density_c_grid.end(), c);
        if (it == cfg.density_c_grid.end())
            throw std::invalid_argument("zeta pipeline: pool_c entry missing from c_grid");
        const auto& col = dens.zeta_at[static_cast<std::size_t>(it - cfg.density_c_grid.begin())];
        pooled.insert(pooled.end(), col.begin(), col.end());
    }
    res.density.emplace(pooled, cfg.bin_width, cfg.min_density_samples);
    res.fit = fit_tail_constants(*res.density, cfg.fit_lo, cfg.fit_hi, cfg.min_bin_count);
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "zeta-fit h=%g T=%g paths=%lld pooled=%zu seed=%llu",
                      cfg.h, cfg.density_T, static_cast<long long>(cfg.density_paths),
                      pooled.size(), static_cast<unsigned long long>(cfg.seed));
        res.fit.constants.provenance = buf;
    }
    res.sd_density = res.density->sd();

    // stationarity: zeta(0) vs zeta(1) on the same paths
    {
        const auto it0 = std::find(cfg.density_c_grid.begin(), cfg.density_c_grid.end(), 0.0);
        const auto it1 = std::find(cfg.density_c_grid.begin(), cfg.density_c_grid.end(), 1.0);
        if (it0 != cfg.density_c_grid.end() && it1 != cfg.density_c_grid.end())
            res.stationarity_ks = ks_two_sample(
                dens.zeta_at[static_cast<std::size_t>(it0 - cfg.density_c_grid.begin())],
                dens.zeta_at[static_cast<std::size_t>(it1 - cfg.density_c_grid.begin())]);
    }

    // Phase 2: coupled grid refinement h vs h/2.
    ZetaSimConfig ref_cfg;
    ref_cfg.half_width = cfg.density_T;
    ref_cfg.step = cfg.h;
    ref_cfg.paths = cfg.refine_paths;
    ref_cfg.seed = derive_stream(cfg.seed, 2, 0);
    const ZetaRefinementBatch ref = run_zeta_refinement_batch(ref_cfg, threads);
    const DensityEstimate dens_coarse(ref.zeta0_coarse, cfg.bin_width,
                                      std::min<std::int64_t>(cfg.min_density_samples,
                                                             cfg.refine_paths));
    const DensityEstimate dens_fine(ref.zeta0_fine, cfg.bin_width,
                                    std::min<std::int64_t>(cfg.min_density_samples,
                                                           cfg.refine_paths));
    const TailFit fit_coarse =
        fit_tail_constants(dens_coarse, cfg.fit_lo, cfg.fit_hi, cfg.min_bin_count);
    res.fit_refined = fit_tail_constants(dens_fine, cfg.fit_lo, cfg.fit_hi, cfg.min_bin_count);
    res.fit_refined.constants.provenance = "zeta-fit refinement h/2, coupled paths";
    res.kappa_rel_change =
        std::fabs(res.fit_refined.constants.kappa - fit_coarse.constants.kappa) /
        fit_coarse.constants.kappa;
    res.lambda_rel_change =
        std::fabs(res.fit_refined.constants.lambda - fit_coarse.constants.lambda) /
        fit_coarse.constants.lambda;

    // Phase 3: independent fine-grid oracle (h/4, 2T) for the sd check.
    ZetaSimConfig ora_cfg;
    ora_cfg.half_width = 2.0 * cfg.density_T;
    ora_cfg.step = 0.25 * cfg.h;
    ora_cfg.c_grid = {0.0};
    ora_cfg.paths = cfg.oracle_paths;
    ora_cfg.seed = derive_stream(cfg.seed, 3, 0);
    const ZetaBatch ora = run_zeta_batch(ora_cfg, {}, threads);
    {
        const auto& z = ora.zeta_at[0];
        double m = 0.0;
        for (double x : z) m += x;
        m /= static_cast<double>(z.size());
        double v = 0.0;
        for (double x : z) v += (x - m) * (x - m);
        res.sd_oracle = std::sqrt(v / static_cast<double>(z.size()));
    }
    res.sd_rel_diff = std::fabs(res.sd_density - res.sd_oracle) / res.sd_oracle;

    // Phase 4: extremal probabilities over growing intervals.
    ZetaSimConfig ext_cfg;
    ext_cfg.half_width = cfg.extremal_T;
    ext_cfg.step = cfg.h;
    ext_cfg.c_max = cfg.extremal_c_max;
    ext_cfg.c_grid = {0.0};
    ext_cfg.paths = cfg.extremal_paths;
    ext_cfg.seed = derive_stream(cfg.seed, 4, 0);
    const ZetaBatch ext = run_zeta_batch(ext_cfg, cfg.deltas, threads);
    const double mu_u = fitted_tail_density(res.fit.constants, cfg.u_threshold);
    for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
        ZetaPipelineResult::ExtremalRow row;
        row.delta = cfg.deltas[di];
        row.u = cfg.u_threshold;
        row.p_hat = sup_zeta_interval_prob(ext.sup_abs[di], cfg.u_threshold);
        row.ratio = std::log(row.p_hat) / (-2.0 * row.delta * mu_u);
        res.extremal.push_back(row);
    }

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        {
            std::ofstream f(*out_dir / "tails.json");
            f << res.fit.constants.to_json().dump(2) << "\n";
        }
        {
            std::ofstream f(*out_dir / "zeta_density.csv");
            f << "t,mu_hat\n";
            for (std::size_t i = 0; i < res.density->bins(); ++i)
                f << format_double(res.density->center(i)) << ","
                  << format_double(res.density->density(i)) << "\n";
        }
        {
            std::ofstream f(*out_dir / "zeta_supprob.csv");
            f << "delta,u,p_hat,ratio\n";
            for (const auto& row : res.extremal)
                f << format_double(row.delta) << "," << format_double(row.u) << ","
                  << format_double(row.p_hat) << "," << format_double(row.ratio) << "\n";
        }
        {
            std::ofstream f(*out_dir / "zeta_summary.json");
            nlohmann::json j = res.summary();
            j["config"] = cfg.to_json();
            f << j.dump(2) << "\n";
        }
    }
    return res;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::domain_error("ks_two_sample: empty sample");
    std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < xa.size() && j < xb.size()) {
        const double x = std::min(xa[i], xb[j]);
        while (i < xa.size() && xa[i] == x) ++i;
        while (j < xb.size() && xb[j] == x) ++j;
        best = std::max(best, std::fabs(static_cast<double>(i) / static_cast<double>(xa.size()) -
                                        static_cast<double>(j) / static_cast<double>(xb.size())));
    }
    return best;
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_records_csv(const std::filesystem::path& path,
                       std::span<const ReplicateRecord> records, std::span<const double> levels) {
    std::ofstream f(path, std::ios::binary);  // '\n' endings on every platform
    f << "n,replicate,T_n,S_n,sup_raw,max_spacing,N_n";
    for (double p : levels) f << ",cover_" << format_double(p);
    f << "\n";
    for (const auto& r : records) {
        f << r.n << "," << r.replicate << "," << format_double(r.t_stat) << ","
          << format_double(r.s_stat) << "," << format_double(r.sup_raw) << ","
          << format_double(r.max_spacing) << "," << r.n_flat;
        for (auto c : r.cover) f << "," << static_cast<int>(c);
        f << "\n";
    }
}

double sample_quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::domain_error("sample_quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size());
    auto idx = static_cast<std::size_t>(std::ceil(pos));
    if (idx == 0) idx = 1;
    if (idx > xs.size()) idx = xs.size();
    return xs[idx - 1];
}

}  // namespace grensup
