// Command-line front end: simulate a dataset, run the sampler, evaluate a run.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "issfa/bench/config.hpp"
#include "issfa/bench/experiment.hpp"
#include "issfa/bench/simulate.hpp"
#include "issfa/random.hpp"

namespace fs = std::filesystem;
using namespace issfa;

namespace {

int cmd_simulate(const std::string& config_path, const std::string& out) {
    const bench::ExperimentConfig config = bench::load_config(config_path);
    Rng rng = Rng(config.sim.seed).substream(stream::kSimulate);
    const bench::Dataset data = bench::simulate(config.sim, rng);
    bench::save_dataset(data, out);
    std::cout << "wrote " << data.y.rows() << "+" << data.y_holdout.rows() << " rows of dimension " << data.y.cols()
              << " to " << out << '\n';
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& data_dir, const std::string& out,
            const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& sweeps,
            const std::optional<std::size_t>& thin, bool no_wall_time, bool quiet) {
    bench::ExperimentConfig config = bench::load_config(config_path);
    if (seed) {
        config.run.seed = *seed;
    }
    if (sweeps) {
        config.run.sweeps = *sweeps;
    }
    if (thin) {
        config.run.thin = *thin;
    }
    if (no_wall_time) {
        config.run.record_wall_time = false;
    }
    const bench::Dataset data = bench::load_dataset(data_dir);
    auto progress = [&](const bench::TraceRecord& r) {
        if (!quiet) {
            std::fprintf(stderr, "sweep %zu  K+=%zu  sigma2=%.4g  theta=(%.4g, %.4g)  holdout_sse=%.6g\n", r.iteration,
                         r.k_plus, r.sigma2, r.theta1, r.theta2, r.holdout_sse);
        }
    };
    const bench::ExperimentResult result = bench::run_experiment(config, data, out, progress);
    std::cout << bench::metrics_to_json(result.metrics) << '\n';
    return 0;
}

int cmd_eval(const std::string& run_dir, const std::optional<std::string>& truth) {
    std::optional<fs::path> truth_dir;
    if (truth) {
        truth_dir = *truth;
    }
    const bench::EvalReport report = bench::evaluate_run(run_dir, truth_dir);
    const bench::ExperimentMetrics& m = report.metrics;
    nlohmann::json summary = {
        {"run", run_dir},
        {"consistent", report.consistent},
        {"truth_checked", report.truth_checked},
        {"notes", report.notes},
        {"holdout_sse_ratio", m.holdout_sse_ratio},
        {"kplus_final", m.kplus_final},
        {"kplus_tail", {m.kplus_tail_min, m.kplus_tail_max}},
        {"theta_ratio_median", m.theta_ratio_median},
    };
    if (m.er_ratio) {
        summary["er_ratio"] = *m.er_ratio;
    }
    if (m.er_truth_issfa) {
        summary["er_truth_issfa"] = *m.er_truth_issfa;
    }
    if (m.kurtosis_issfa) {
        summary["kurtosis_issfa"] = *m.kurtosis_issfa;
    }
    std::cout << summary.dump(2) << '\n';
    return report.consistent ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"issfa: infinite sparse structured factor analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    std::string data_dir;
    std::string run_dir;
    std::optional<std::string> truth;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> sweeps;
    std::optional<std::size_t> thin;
    bool no_wall_time = false;
    bool quiet = false;

    CLI::App* sim = app.add_subcommand("simulate", "Simulate a dataset from the [sim] section of a config");
    sim->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "Output directory")->required();

    CLI::App* run = app.add_subcommand("run", "Run the sampler on a dataset directory");
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--data", data_dir, "Dataset directory (from simulate)")->required()->check(CLI::ExistingDirectory);
    run->add_option("--out", out, "Run output directory")->required();
    run->add_option("--seed", seed, "Override sampler.seed");
    run->add_option("--sweeps", sweeps, "Override sampler.sweeps");
    run->add_option("--thin", thin, "Override sampler.thin")->check(CLI::PositiveNumber);
    run->add_flag("--no-wall-time", no_wall_time, "Write 0 in the wall_ms trace column (byte-reproducible traces)");
    run->add_flag("--quiet", quiet, "No per-sample progress on stderr");

    CLI::App* eval = app.add_subcommand("eval", "Check and summarise a run directory");
    eval->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--truth", truth, "Dataset directory holding S_true.ismx");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            return cmd_simulate(config_path, out);
        }
        if (*run) {
            return cmd_run(config_path, data_dir, out, seed, sweeps, thin, no_wall_time, quiet);
        }
        return cmd_eval(run_dir, truth);
    } catch (const std::exception& e) {
        std::cerr << "issfa: error: " << e.what() << '\n';
        return 2;
    }
}
