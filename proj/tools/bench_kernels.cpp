// Kernel benchmark: OpenMP batch vs serial reference for the zeta argmax
// (envelope vs direct per-c scan) and for the replicate fan-out.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "grensup/harness.hpp"
#include "grensup/rng.hpp"

using namespace grensup;

namespace {

double seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_zeta() {
    ZetaSimConfig cfg;
    cfg.half_width = 6.0;
    cfg.step = 2e-3;
    cfg.c_max = 2.0;
    cfg.paths = 2000;
    cfg.seed = 7;
    for (int k = 0; k <= 200; ++k) cfg.c_grid.push_back(2.0 * k / 200.0);
    const double deltas[] = {2.0};

    auto t0 = std::chrono::steady_clock::now();
    const ZetaBatch batch = run_zeta_batch(cfg, deltas, omp_get_max_threads());
    const double t_env = seconds(t0);

    // serial reference: direct per-c scan over the same paths
    const auto half = static_cast<std::size_t>(std::llround(cfg.half_width / cfg.step));
    std::vector<double> s(2 * half + 1), w(2 * half + 1);
    for (std::size_t j = 0; j < s.size(); ++j)
        s[j] = (static_cast<double>(j) - static_cast<double>(half)) * cfg.step;
    t0 = std::chrono::steady_clock::now();
    double checksum = 0.0, checksum_env = 0.0;
    for (std::int64_t p = 0; p < cfg.paths; ++p) {
        Rng rng(derive_stream(cfg.seed, 0x7a657461ULL, static_cast<std::uint64_t>(p)));
        const double sd = std::sqrt(cfg.step);
        w[half] = 0.0;
        for (std::size_t j = half + 1; j < w.size(); ++j) w[j] = w[j - 1] + sd * rng.normal();
        for (std::size_t j = half; j > 0; --j) w[j - 1] = w[j] + sd * rng.normal();
        for (std::size_t ci = 0; ci < cfg.c_grid.size(); ++ci)
            checksum += zeta_direct_scan(s, w, cfg.c_grid[ci]);
    }
    const double t_ref = seconds(t0);
    for (const auto& col : batch.zeta_at)
        for (double z : col) checksum_env += z;

    std::printf("zeta kernel      paths=%lld grid=%zu c-grid=%zu\n",
                static_cast<long long>(cfg.paths), s.size(), cfg.c_grid.size());
    std::printf("  envelope (omp, %d threads): %8.3f s   checksum %.6f\n", omp_get_max_threads(),
                t_env, checksum_env);
    std::printf("  direct scan (serial ref) : %8.3f s   checksum %.6f\n", t_ref, checksum);
}

void bench_replicates() {
    ExperimentConfig cfg;
    cfg.model = linear_density_model(1.5, 1.0);
    cfg.ns = {20000};
    cfg.replicates = 60;
    cfg.seed = 11;
    cfg.tails = {2.7, 1.7, "bench"};

    auto t0 = std::chrono::steady_clock::now();
    const auto par = run_limit_experiment(cfg).records;
    const double t_par = seconds(t0);

    t0 = std::chrono::steady_clock::now();
    const auto ser = run_replicates_serial(cfg);
    const double t_ser = seconds(t0);

    double dmax = 0.0;
    for (std::size_t i = 0; i < par.size(); ++i)
        dmax = std::max(dmax, std::fabs(par[i].t_stat - ser[i].t_stat));
    std::printf("replicate fan-out n=%lld M=%lld\n", static_cast<long long>(cfg.ns[0]),
                static_cast<long long>(cfg.replicates));
    std::printf("  parallel (%d threads): %8.3f s\n", omp_get_max_threads(), t_par);
    std::printf("  serial reference    : %8.3f s   max |diff| = %g\n", t_ser, dmax);
}

}  // namespace

int main() {
    bench_zeta();
    bench_replicates();
    return 0;
}
