#include "grensup/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <omp.h>

#include "grensup/rng.hpp"

namespace grensup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kZetaSalt = 0x7a657461ULL;  // stream tag for path draws

struct PathGrid {
    std::vector<double> s;
    std::size_t origin;  // index of s = 0
};

PathGrid make_grid(double half_width, double step) {
    const auto half = static_cast<std::size_t>(std::llround(half_width / step));
    PathGrid g;
    g.origin = half;
    g.s.resize(2 * half + 1);
    for (std::size_t j = 0; j < g.s.size(); ++j)
        g.s[j] = (static_cast<double>(j) - static_cast<double>(half)) * step;
    return g;
}

// W(0)=0; independent N(0, step) increments cumulated in both directions.
// Draw order is fixed (right side first), so a path is a pure function of
// its stream.
void fill_path(std::vector<double>& w, const PathGrid& g, double step, Rng& rng) {
    w.resize(g.s.size());
    const double sd = std::sqrt(step);
    w[g.origin] = 0.0;
    for (std::size_t j = g.origin + 1; j < w.size(); ++j) w[j] = w[j - 1] + sd * rng.normal();
    for (std::size_t j = g.origin; j > 0; --j) w[j - 1] = w[j] + sd * rng.normal();
}

}  // namespace

void ZetaSimConfig::validate() const {
    if (!(step > 0.0)) throw std::domain_error("ZetaSimConfig: step must be positive");
    if (!(half_width >= std::max(4.0, u_max + c_max)))
        throw std::domain_error("ZetaSimConfig: half width below max(4, u_max + c_max)");
    if (paths < 1) throw std::domain_error("ZetaSimConfig: need at least one path");
    for (double c : c_grid)
        if (!(c >= 0.0 && c <= c_max))
            throw std::domain_error("ZetaSimConfig: c-grid entry outside [0, c_max]");
}

ArgmaxEnvelope build_argmax_envelope(std::span<const double> s_grid, std::span<const double> w) {
    if (s_grid.size() != w.size() || s_grid.empty())
        throw std::invalid_argument("build_argmax_envelope: grid/path size mismatch");
    ArgmaxEnvelope env;
    env.start.reserve(64);
    env.s.reserve(64);
    std::vector<double> slope, icept;
    slope.reserve(64);
    icept.reserve(64);
    for (std::size_t j = 0; j < s_grid.size(); ++j) {
        const double a = 2.0 * s_grid[j];
        const double b = w[j] - s_grid[j] * s_grid[j];
        double x = -kInf;
        while (!slope.empty()) {
            x = (icept.back() - b) / (a - slope.back());
            if (x <= env.start.back()) {
                slope.pop_back();
                icept.pop_back();
                env.start.pop_back();
                env.s.pop_back();
                x = -kInf;
            } else {
                break;
            }
        }
        slope.push_back(a);
        icept.push_back(b);
        env.start.push_back(slope.size() == 1 ? -kInf : x);
        env.s.push_back(s_grid[j]);
    }
    return env;
}

double ArgmaxEnvelope::zeta(double c) const {
    // last piece with start <= c; ties at a breakpoint go to the newer line
    auto it = std::upper_bound(start.begin(), start.end(), c);
    return s[static_cast<std::size_t>(it - start.begin()) - 1] - c;
}

double ArgmaxEnvelope::sup_abs_zeta(double c_lo, double c_hi) const {
    if (!(c_lo <= c_hi)) throw std::domain_error("sup_abs_zeta: reversed interval");
    auto it = std::upper_bound(start.begin(), start.end(), c_lo);
    std::size_t i = static_cast<std::size_t>(it - start.begin()) - 1;
    double best = 0.0;
    for (; i < s.size(); ++i) {
        const double lo = std::max(start[i], c_lo);
        const double hi = (i + 1 < s.size()) ? std::min(start[i + 1], c_hi) : c_hi;
        best = std::max(best, std::fabs(s[i] - lo));
        best = std::max(best, std::fabs(s[i] - hi));
        if (i + 1 >= s.size() || start[i + 1] > c_hi) break;
    }
    return best;
}

double zeta_direct_scan(std::span<const double> s_grid, std::span<const double> w, double c) {
    double best_s = s_grid[0];
    double best_v = w[0] - (s_grid[0] - c) * (s_grid[0] - c);
    for (std::size_t j = 1; j < s_grid.size(); ++j) {
        const double d = s_grid[j] - c;
        const double v = w[j] - d * d;
        if (v >= best_v) {  // ties to the greater location
            best_v = v;
            best_s = s_grid[j];
        }
    }
    return best_s - c;
}

ZetaSample simulate_zeta_path(const ZetaSimConfig& cfg, std::uint64_t path_index) {
    cfg.validate();
    const PathGrid grid = make_grid(cfg.half_width, cfg.step);
    Rng rng(derive_stream(cfg.seed, kZetaSalt, path_index));
    std::vector<double> w;
    fill_path(w, grid, cfg.step, rng);
    const ArgmaxEnvelope env = build_argmax_envelope(grid.s, w);
    ZetaSample out;
    out.zeta_at_c.reserve(cfg.c_grid.size());
    for (double c : cfg.c_grid) out.zeta_at_c.push_back(env.zeta(c));
    return out;
}

ZetaBatch run_zeta_batch(const ZetaSimConfig& cfg, std::span<const double> deltas, int threads) {
    cfg.validate();
    for (double d : deltas)
        if (!(d >= 0.0 && d <= cfg.c_max))
            throw std::domain_error("run_zeta_batch: delta outside [0, c_max]");
    const PathGrid grid = make_grid(cfg.half_width, cfg.step);
    ZetaBatch batch;
    batch.zeta_at.assign(cfg.c_grid.size(), std::vector<double>(cfg.paths));
    batch.sup_abs.assign(deltas.size(), std::vector<double>(cfg.paths));

#pragma omp parallel num_threads(threads)
    {
        std::vector<double> w;
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t p = 0; p < cfg.paths; ++p) {
            Rng rng(derive_stream(cfg.seed, kZetaSalt, static_cast<std::uint64_t>(p)));
            fill_path(w, grid, cfg.step, rng);
            const ArgmaxEnvelope env = build_argmax_envelope(grid.s, w);
            for (std::size_t ci = 0; ci < cfg.c_grid.size(); ++ci)
                batch.zeta_at[ci][p] = env.zeta(cfg.c_grid[ci]);
            for (std::size_t di = 0; di < deltas.size(); ++di)
                batch.sup_abs[di][p] = env.sup_abs_zeta(0.0, deltas[di]);
        }
    }
    return batch;
}

ZetaRefinementBatch run_zeta_refinement_batch(const ZetaSimConfig& cfg, int threads) {
    cfg.validate();
    const double fine_step = 0.5 * cfg.step;
    const PathGrid fine = make_grid(cfg.half_width, fine_step);
    const PathGrid coarse = make_grid(cfg.half_width, cfg.step);
    ZetaRefinementBatch batch;
    batch.zeta0_fine.resize(cfg.paths);
    batch.zeta0_coarse.resize(cfg.paths);

#pragma omp parallel num_threads(threads)
    {
        std::vector<double> wf, wc;
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t p = 0; p < cfg.paths; ++p) {
            Rng rng(derive_stream(cfg.seed, kZetaSalt, static_cast<std::uint64_t>(p)));
            fill_path(wf, fine, fine_step, rng);
            wc.resize(coarse.s.size());
            for (std::size_t j = 0; j < wc.size(); ++j) wc[j] = wf[2 * j];
            const ArgmaxEnvelope envf = build_argmax_envelope(fine.s, wf);
            const ArgmaxEnvelope envc = build_argmax_envelope(coarse.s, wc);
            batch.zeta0_fine[p] = envf.zeta(0.0);
            batch.zeta0_coarse[p] = envc.zeta(0.0);
        }
    }
    return batch;
}

DensityEstimate::DensityEstimate(std::span<const double> samples, double bin_width,
                                 std::int64_t min_samples)
    : bin_width_(bin_width) {
    if (!(bin_width > 0.0)) throw std::domain_error("DensityEstimate: bin width must be positive");
    if (static_cast<std::int64_t>(samples.size()) < min_samples)
        throw std::domain_error("DensityEstimate: too few samples for a reliable density");
    double maxabs = 0.0;
    for (double x : samples) maxabs = std::max(maxabs, std::fabs(x));
    const auto half_bins = static_cast<std::size_t>(std::ceil(maxabs / bin_width)) + 1;
    lo_ = -static_cast<double>(half_bins) * bin_width;
    counts_.assign(2 * half_bins, 0);
    for (double x : samples) {
        auto i = static_cast<std::size_t>((x - lo_) / bin_width);
        if (i >= counts_.size()) i = counts_.size() - 1;
        ++counts_[i];
    }
    total_ = static_cast<std::int64_t>(samples.size());
}

DensityEstimate::DensityEstimate(double bin_width, double lo, std::vector<std::int64_t> counts)
    : bin_width_(bin_width), lo_(lo), counts_(std::move(counts)) {
    if (!(bin_width_ > 0.0) || counts_.empty())
        throw std::domain_error("DensityEstimate: bad bin layout");
    total_ = 0;
    for (auto c : counts_) {
        if (c < 0) throw std::domain_error("DensityEstimate: negative count");
        total_ += c;
    }
    if (total_ < 1) throw std::domain_error("DensityEstimate: empty histogram");
}

double DensityEstimate::density(std::size_t i) const {
    return static_cast<double>(counts_[i]) / (static_cast<double>(total_) * bin_width_);
}

double DensityEstimate::value(double t) const {
    const double pos = (t - lo_) / bin_width_ - 0.5;  // in units of bin centers
    if (pos <= 0.0) return density(0);
    const auto last = static_cast<double>(counts_.size() - 1);
    if (pos >= last) return density(counts_.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return (1.0 - frac) * density(i) + frac * density(i + 1);
}

double DensityEstimate::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i)
        acc += static_cast<double>(counts_[i]) * center(i);
    return acc / static_cast<double>(total_);
}

double DensityEstimate::sd() const {
    const double m = mean();
    double acc = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        const double d = center(i) - m;
        acc += static_cast<double>(counts_[i]) * d * d;
    }
    return std::sqrt(acc / static_cast<double>(total_));
}

nlohmann::json DensityEstimate::to_json() const {
    return {{"bin_width", bin_width_}, {"lo", lo_}, {"counts", counts_}, {"total", total_}};
}

nlohmann::json TailFit::to_json() const {
    return {{"kappa", constants.kappa},   {"lambda", constants.lambda},
            {"provenance", constants.provenance}, {"bins_used", bins_used},
            {"weighted_rms", weighted_rms}, {"condition", condition},
            {"t_lo_eff", t_lo_eff},         {"t_hi_eff", t_hi_eff}};
}

TailFit fit_tail_constants(const DensityEstimate& dens, double t_lo, double t_hi,
                           std::int64_t min_count) {
    if (!(0.0 < t_lo && t_lo < t_hi))
        throw std::domain_error("fit_tail_constants: bad fit window");
    std::vector<double> ts, ys, wts;
    for (std::size_t i = 0; i < dens.bins(); ++i) {
        const double t = dens.center(i);
        if (t <= 0.0) continue;  // mirror bin pooled below
        if (t < t_lo || t > t_hi) continue;
        // pooled count of the symmetric pair of bins
        const double mirror = -t;
        std::int64_t pooled = dens.count(i);
        for (std::size_t k = 0; k < dens.bins(); ++k)
            if (std::fabs(dens.center(k) - mirror) < 0.25 * dens.bin_width()) {
                pooled += dens.count(k);
                break;
            }
        if (pooled < min_count) continue;
        const double mu = static_cast<double>(pooled) /
                          (2.0 * static_cast<double>(dens.total()) * dens.bin_width());
        ts.push_back(t);
        ys.push_back(std::log(mu) + 2.0 * t * t * t / 3.0 - std::log(2.0 * t));
        wts.push_back(static_cast<double>(pooled));
    }
    if (ts.size() < 3) {
        throw std::runtime_error(
            "fit_tail_constants: ill-conditioned window, only " + std::to_string(ts.size()) +
            " bins with count >= " + std::to_string(min_count) + " in the requested range");
    }
    // weighted least squares for y = b0 - kappa t
    double sw = 0, swt = 0, swtt = 0, swy = 0, swty = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sw += wts[i];
        swt += wts[i] * ts[i];
        swtt += wts[i] * ts[i] * ts[i];
        swy += wts[i] * ys[i];
        swty += wts[i] * ts[i] * ys[i];
    }
    const double det = sw * swtt - swt * swt;
    const double slope = (sw * swty - swt * swy) / det;
    const double b0 = (swtt * swy - swt * swty) / det;

    TailFit fit;
    fit.constants.kappa = -slope;
    fit.constants.lambda = std::exp(b0);
    fit.bins_used = static_cast<int>(ts.size());
    fit.t_lo_eff = ts.front();
    fit.t_hi_eff = ts.back();
    // condition of the normal matrix (eigenvalue ratio)
    const double tr = sw + swtt;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    fit.condition = (tr + disc) / std::max(tr - disc, 1e-300);
    double rss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (b0 + slope * ts[i]);
        rss += wts[i] * r * r;
    }
    fit.weighted_rms = std::sqrt(rss / sw);
    if (!(fit.constants.lambda > 0.0) || !std::isfinite(fit.constants.kappa))
        throw std::runtime_error("fit_tail_constants: degenerate fit");
    return fit;
}

double fitted_tail_density(const TailConstants& tails, double t) {
    const double a = std::fabs(t);
    return 2.0 * tails.lambda * a * std::exp(-2.0 * a * a * a / 3.0 - tails.kappa * a);
}

double sup_zeta_interval_prob(std::span<const double> sup_abs, double u) {
    if (sup_abs.empty()) throw std::domain_error("sup_zeta_interval_prob: no paths");
    std::int64_t hits = 0;
    for (double s : sup_abs) hits += (s <= u);
    return static_cast<double>(hits) / static_cast<double>(sup_abs.size());
}

}  // namespace grensup
