// Command-line harness: estimate one dataset, run the seeded Monte Carlo
// studies, or drive the zeta pipeline.  All outputs are deterministic in
// (config, seed) at any parallelism degree.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "grensup/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    json j;
    f >> j;
    return j;
}

void dump_json(const fs::path& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    f << j.dump(2) << "\n";
}

grensup::TailConstants resolve_tails(const json& cfg, const fs::path& out_dir,
                                     bool smoke, std::uint64_t seed) {
    using namespace grensup;
    if (!cfg.contains("tails")) throw std::runtime_error("config missing 'tails'");
    const json& t = cfg.at("tails");
    const std::string source = t.at("source").get<std::string>();
    if (source == "file") {
        const std::string path = t.at("path").get<std::string>();
        if (!fs::exists(path))
            throw std::runtime_error("tails file does not exist: " + path);
        return TailConstants::from_json(load_json(path));
    }
    if (source == "zeta-fit") {
        ZetaPipelineConfig zc = t.contains("zeta")
                                    ? ZetaPipelineConfig::from_json(t.at("zeta"))
                                    : ZetaPipelineConfig::production(seed);
        if (smoke) zc = ZetaPipelineConfig::smoke_config(zc.seed);
        const fs::path zdir = out_dir / "zeta";
        return run_zeta_pipeline(zc, &zdir).fit.constants;
    }
    throw std::runtime_error("unknown tails source: " + source);
}

grensup::ExperimentConfig experiment_from(const json& cfg, const fs::path& out_dir,
                                          bool smoke,
                                          std::optional<std::uint64_t> seed_override) {
    using namespace grensup;
    json j = cfg;
    if (seed_override) j["seed"] = *seed_override;
    if (smoke) {
        j["replicates"] = std::min<std::int64_t>(j.at("replicates").get<std::int64_t>(), 24);
        json ns = json::array();
        for (auto n : j.at("n")) ns.push_back(std::min<std::int64_t>(n.get<std::int64_t>(), 2000));
        j["n"] = ns;
    }
    const auto tails = resolve_tails(j, out_dir, smoke, j.at("seed").get<std::uint64_t>());
    return ExperimentConfig::from_json(j, tails);
}

int cmd_estimate(const json& cfg, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed_override) {
    using namespace grensup;
    CadlagStep Fn = [&]() {
        if (cfg.contains("data")) {
            // raw observations in [0,1]: build their empirical CDF directly
            std::vector<double> xs = cfg.at("data").get<std::vector<double>>();
            std::sort(xs.begin(), xs.end());
            std::vector<Knot> knots{{0.0, 0.0}};
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double y = static_cast<double>(i + 1) / static_cast<double>(xs.size());
                if (knots.back().t == xs[i])
                    knots.back().y = y;
                else
                    knots.push_back({xs[i], y});
            }
            return CadlagStep(std::move(knots));
        }
        const MonotoneModel model = MonotoneModel::from_json(cfg.at("model"));
        const auto n = cfg.at("n").get<std::int64_t>();
        const auto seed = seed_override.value_or(cfg.at("seed").get<std::uint64_t>());
        return sample(model, n, SeedSpec{seed, 0});
    }();

    const CadlagStep Fplus = upper_version(Fn);
    const ConcaveEnvelope env = least_concave_majorant(majorant_points(Fplus));
    const LeftContStep fhat = slope_process(env);
    const LeftContStep Uhat = inverse_estimator(fhat);
    const JumpStructure js = jump_structure(fhat);

    fs::create_directories(out_dir);
    dump_json(out_dir / "fn.json", Fn.to_json());
    dump_json(out_dir / "envelope.json", env.to_json());
    dump_json(out_dir / "fhat.json", fhat.to_json());
    dump_json(out_dir / "uhat.json", Uhat.to_json());
    dump_json(out_dir / "jumps.json", js.to_json());
    std::cout << "estimate: " << js.n_flat << " flat parts, outputs in " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monotone estimator sup-norm limit harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    bool smoke = false;
    std::optional<std::uint64_t> seed_override;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override config seed");
        sub->add_flag("--smoke", smoke, "scaled-down smoke run");
    };

    auto* est = app.add_subcommand("estimate", "one dataset -> fhat, Uhat, jumps");
    add_common(est);
    auto* lim = app.add_subcommand("limit-sim", "Gumbel limit experiment");
    add_common(lim);
    auto* spa = app.add_subcommand("spacings", "jump spacing / N_n study");
    add_common(spa);
    auto* ban = app.add_subcommand("band", "confidence band coverage study");
    add_common(ban);
    auto* zet = app.add_subcommand("zeta-sim", "zeta pipeline: density, tail fit, extremal");
    add_common(zet);

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_json(config_path);
        const fs::path out(out_dir);
        fs::create_directories(out);

        if (est->parsed()) return cmd_estimate(cfg, out, seed_override);

        if (zet->parsed()) {
            grensup::ZetaPipelineConfig zc = grensup::ZetaPipelineConfig::from_json(cfg);
            if (seed_override) zc.seed = *seed_override;
            if (smoke) {
                auto s = grensup::ZetaPipelineConfig::smoke_config(zc.seed);
                s.threads = zc.threads;
                zc = s;
            }
            const auto res = grensup::run_zeta_pipeline(zc, &out);
            std::cout << res.summary().dump(2) << "\n";
            return 0;
        }

        const grensup::ExperimentConfig ecfg =
            experiment_from(cfg, out, smoke, seed_override);
        grensup::LimitRun run;
        if (lim->parsed())
            run = grensup::run_limit_experiment(ecfg);
        else if (spa->parsed())
            run = grensup::run_spacing_study(ecfg);
        else
            run = grensup::run_band_study(ecfg, /*with_plugin=*/ban->parsed());

        grensup::write_records_csv(out / "records.csv", run.records, ecfg.levels);
        dump_json(out / "summary.json", run.summary);
        std::cout << run.summary.dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
