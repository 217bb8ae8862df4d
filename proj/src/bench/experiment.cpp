#include "issfa/bench/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "issfa/bench/matrix_io.hpp"
#include "issfa/bench/svd_baseline.hpp"
#include "issfa/gmrf/spectral_curve.hpp"
#include "issfa/random.hpp"
#include "issfa/sampler/checkpoint.hpp"
#include "issfa/sampler/gibbs.hpp"
#include "issfa/sampler/heldout.hpp"
#include "issfa/sampler/initialise.hpp"

namespace issfa::bench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_trace_row(const TraceRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f", r.iteration, r.k_plus,
                  r.sigma2, r.alpha, r.beta, r.theta1, r.theta2, r.train_sse, r.holdout_sse, r.wall_ms);
    return buf;
}

bool ExperimentMetrics::operator==(const ExperimentMetrics& o) const { return metrics_to_json(*this) == metrics_to_json(o); }

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_null()) {
        return std::nullopt;
    }
    return v.get<double>();
}

}  // namespace

std::string metrics_to_json(const ExperimentMetrics& m) {
    json matches = json::array();
    for (const FeatureMatch& f : m.matches) {
        matches.push_back({{"truth", f.truth}, {"estimate", f.estimate}, {"similarity", f.similarity}});
    }
    const json j = {
        {"schema_version", m.schema_version},
        {"grid", m.grid},
        {"observations", m.observations},
        {"holdout", m.holdout},
        {"sweeps", m.sweeps},
        {"thin", m.thin},
        {"seed", m.seed},
        {"samples_averaged", m.samples_averaged},
        {"svd_rank", m.svd_rank},
        {"holdout_reference", m.holdout_reference},
        {"holdout_sse_issfa", m.holdout_sse_issfa},
        {"holdout_sse_svd", m.holdout_sse_svd},
        {"holdout_sse_ratio", m.holdout_sse_ratio},
        {"er_truth_issfa", optional_json(m.er_truth_issfa)},
        {"er_truth_svd", optional_json(m.er_truth_svd)},
        {"er_issfa_truth", optional_json(m.er_issfa_truth)},
        {"er_svd_truth", optional_json(m.er_svd_truth)},
        {"er_ratio", optional_json(m.er_ratio)},
        {"matches", matches},
        {"kurtosis_issfa", optional_json(m.kurtosis_issfa)},
        {"kurtosis_svd", optional_json(m.kurtosis_svd)},
        {"kplus_history", m.kplus_history},
        {"kplus_final", m.kplus_final},
        {"kplus_tail_min", m.kplus_tail_min},
        {"kplus_tail_max", m.kplus_tail_max},
        {"kplus_tail_mean", m.kplus_tail_mean},
        {"theta_ratio_median", m.theta_ratio_median},
        {"theta_ratio_generating", optional_json(m.theta_ratio_generating)},
        {"unique_accept_rate", m.unique_accept_rate},
        {"clamped_proposals", m.clamped_proposals},
        {"theta_fit_failures", m.theta_fit_failures},
        {"wall_seconds", m.wall_seconds},
        {"full_scale_reference",
         {{"holdout_sse_ratio", 1.67}, {"kurtosis_issfa", 73.8}, {"kurtosis_fastica", 1.1}, {"er_ratio_fastica", 1.41}}},
    };
    return j.dump(2);
}

ExperimentMetrics metrics_from_json(const std::string& text) {
    ExperimentMetrics m;
    try {
        const json j = json::parse(text);
        m.schema_version = j.at("schema_version").get<int>();
        if (m.schema_version != 1) {
            throw std::runtime_error("unsupported schema_version " + std::to_string(m.schema_version));
        }
        m.grid = j.at("grid").get<std::vector<std::size_t>>();
        m.observations = j.at("observations").get<std::size_t>();
        m.holdout = j.at("holdout").get<std::size_t>();
        m.sweeps = j.at("sweeps").get<std::size_t>();
        m.thin = j.at("thin").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.samples_averaged = j.at("samples_averaged").get<std::size_t>();
        m.svd_rank = j.at("svd_rank").get<std::size_t>();
        m.holdout_reference = j.at("holdout_reference").get<std::string>();
        m.holdout_sse_issfa = j.at("holdout_sse_issfa").get<double>();
        m.holdout_sse_svd = j.at("holdout_sse_svd").get<double>();
        m.holdout_sse_ratio = j.at("holdout_sse_ratio").get<double>();
        m.er_truth_issfa = optional_from(j, "er_truth_issfa");
        m.er_truth_svd = optional_from(j, "er_truth_svd");
        m.er_issfa_truth = optional_from(j, "er_issfa_truth");
        m.er_svd_truth = optional_from(j, "er_svd_truth");
        m.er_ratio = optional_from(j, "er_ratio");
        for (const json& f : j.at("matches")) {
            m.matches.push_back({f.at("truth").get<std::size_t>(), f.at("estimate").get<std::size_t>(),
                                 f.at("similarity").get<double>()});
        }
        m.kurtosis_issfa = optional_from(j, "kurtosis_issfa");
        m.kurtosis_svd = optional_from(j, "kurtosis_svd");
        m.kplus_history = j.at("kplus_history").get<std::vector<std::size_t>>();
        m.kplus_final = j.at("kplus_final").get<std::size_t>();
        m.kplus_tail_min = j.at("kplus_tail_min").get<std::size_t>();
        m.kplus_tail_max = j.at("kplus_tail_max").get<std::size_t>();
        m.kplus_tail_mean = j.at("kplus_tail_mean").get<double>();
        m.theta_ratio_median = j.at("theta_ratio_median").get<double>();
        m.theta_ratio_generating = optional_from(j, "theta_ratio_generating");
        m.unique_accept_rate = j.at("unique_accept_rate").get<double>();
        m.clamped_proposals = j.at("clamped_proposals").get<std::size_t>();
        m.theta_fit_failures = j.at("theta_fit_failures").get<std::size_t>();
        m.wall_seconds = j.at("wall_seconds").get<double>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("metrics.json: ") + e.what());
    }
    return m;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot open for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(path.string() + ": cannot open");
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Image layout for a feature on the grid: 1D → 1×N, 2D → d0×d1, 3D → the d0
// axial slices (each d1×d2) tiled left to right.
void write_feature_pgm(const fs::path& path, const Vector& s, const std::vector<std::size_t>& grid) {
    if (grid.size() == 1) {
        write_pgm(path, s, 1, grid[0]);
    } else if (grid.size() == 2) {
        write_pgm(path, s, grid[0], grid[1]);
    } else {
        const std::size_t d0 = grid[0];
        const std::size_t d1 = grid[1];
        const std::size_t d2 = grid[2];
        Vector img(static_cast<Eigen::Index>(s.size()));
        for (std::size_t y = 0; y < d1; ++y) {
            for (std::size_t x = 0; x < d0 * d2; ++x) {
                const std::size_t slice = x / d2;
                const std::size_t col = x % d2;
                img[static_cast<Eigen::Index>(y * d0 * d2 + x)] =
                    s[static_cast<Eigen::Index>(slice * d1 * d2 + y * d2 + col)];
            }
        }
        write_pgm(path, img, d1, d0 * d2);
    }
}

std::optional<double> kurtosis_or_empty(const std::vector<double>& values) {
    try {
        return excess_kurtosis(values);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

// Entries of A∘Z restricted to columns shared by at least two observations.
std::vector<double> shared_weight_entries(const sampler::ModelState& state) {
    std::vector<double> out;
    for (std::size_t k = 0; k < state.feature_count(); ++k) {
        if (state.z.count(k) < 2) {
            continue;
        }
        for (std::size_t t = 0; t < state.observations(); ++t) {
            out.push_back(state.z(t, k) ? state.weights[k][static_cast<Eigen::Index>(t)] : 0.0);
        }
    }
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data, const fs::path& out_dir,
                                const std::function<void(const TraceRecord&)>& progress) {
    const RunConfig& run = config.run;
    run.validate();
    if (data.y.rows() == 0) {
        throw std::invalid_argument("run_experiment: dataset has no training rows");
    }
    fs::create_directories(out_dir / "checkpoints");
    fs::create_directories(out_dir / "features");
    if (run.write_samples) {
        fs::create_directories(out_dir / "samples");
    }
    write_text(out_dir / "config.ini", format_config(config));

    const auto transform = std::make_shared<const gmrf::OrthoTransform>(gmrf::OrthoTransform::dct(data.grid));
    const gmrf::SpectralCurve curve = gmrf::SpectralCurve::affine(gmrf::grid_laplacian_eigenvalues(data.grid));

    const Rng root(run.seed);
    Rng init_rng = root.substream(stream::kInitialise);
    sampler::ModelState initial = sampler::initialise(data.y, *transform, curve, config.prior, run.init, init_rng);
    sampler::SamplerOptions options;
    options.residual_refresh = run.residual_refresh;
    sampler::GibbsSampler gibbs(data.y, transform, curve, config.prior, options, std::move(initial),
                                mix_seed(run.seed, stream::kSampler));
    const Rng heldout_root = root.substream(stream::kHeldout);

    std::ofstream trace_out(out_dir / "trace.csv", std::ios::trunc);
    if (!trace_out) {
        throw std::runtime_error((out_dir / "trace.csv").string() + ": cannot open for writing");
    }
    trace_out << kTraceHeader << '\n';

    ExperimentResult result;
    ExperimentMetrics& m = result.metrics;
    const auto burn_in = static_cast<std::size_t>(std::floor(run.burn_in_fraction * static_cast<double>(run.sweeps)));
    ReconstructionAverage train_avg;
    ReconstructionAverage holdout_avg;
    std::vector<double> theta_ratios;
    std::size_t proposals = 0;
    std::size_t accepts = 0;
    const auto start = std::chrono::steady_clock::now();
    const std::size_t v = data.dimension();
    const bool has_holdout = data.y_holdout.rows() > 0;

    for (std::size_t it = 1; it <= run.sweeps; ++it) {
        const sampler::SweepDiagnostics& diag = gibbs.sweep();
        proposals += diag.unique_proposals;
        accepts += diag.unique_accepts;
        m.clamped_proposals += diag.clamped_proposals;
        m.theta_fit_failures += diag.theta_fit_failed ? 1 : 0;
        const sampler::ModelState& state = gibbs.state();
        m.kplus_history.push_back(state.feature_count());
        const Vector theta = state.theta();
        if (it > burn_in) {
            theta_ratios.push_back(theta[1] / theta[0]);
        }

        if (it % run.thin == 0 || it == run.sweeps) {
            TraceRecord rec;
            rec.iteration = it;
            rec.k_plus = state.feature_count();
            rec.sigma2 = state.sigma2;
            rec.alpha = state.alpha;
            rec.beta = state.beta;
            rec.theta1 = theta[0];
            rec.theta2 = theta[1];
            rec.train_sse = (data.y - state.reconstruction(v)).squaredNorm();
            RowMatrix holdout_hat;
            if (has_holdout) {
                holdout_hat = sampler::heldout_infer(data.y_holdout, state, run.heldout_sweeps,
                                                     heldout_root.substream(static_cast<std::uint64_t>(it)))
                                  .reconstruction;
                rec.holdout_sse = (data.y_holdout - holdout_hat).squaredNorm();
            }
            if (run.record_wall_time) {
                rec.wall_ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            }
            trace_out << format_trace_row(rec) << '\n';
            result.trace.push_back(rec);
            if (progress) {
                progress(rec);
            }
            if (it > burn_in) {
                train_avg.add(state.reconstruction(v));
                if (has_holdout) {
                    holdout_avg.add(holdout_hat);
                }
            }
            if (run.write_samples) {
                write_matrix(out_dir / "samples" / ("S_" + std::to_string(it) + ".ismx"), state.feature_matrix(),
                             {run.seed, "feature matrix S at sweep " + std::to_string(it)});
            }
        }
        if (run.checkpoint_every > 0 && it % run.checkpoint_every == 0) {
            sampler::write_checkpoint(out_dir / "checkpoints" / ("sweep_" + std::to_string(it) + ".bin"), state, it);
        }
    }
    trace_out.flush();
    if (!trace_out) {
        throw std::runtime_error((out_dir / "trace.csv").string() + ": write failed");
    }

    const sampler::ModelState& final_state = gibbs.state();
    sampler::write_checkpoint(out_dir / "checkpoints" / "final.bin", final_state, run.sweeps);
    const Provenance prov{run.seed, "iSSFA run"};
    const RowMatrix s_final = final_state.feature_matrix();
    write_matrix(out_dir / "S_final.ismx", s_final, prov);
    write_matrix(out_dir / "W_final.ismx", final_state.weight_matrix(), prov);
    if (train_avg.count() > 0) {
        write_matrix(out_dir / "X_hat.ismx", train_avg.mean(), prov);
    }
    if (holdout_avg.count() > 0) {
        write_matrix(out_dir / "X_holdout_hat.ismx", holdout_avg.mean(), prov);
    }
    if (run.write_pgm) {
        for (std::size_t k = 0; k < final_state.feature_count(); ++k) {
            write_feature_pgm(out_dir / "features" / ("feature_" + std::to_string(k) + ".pgm"),
                              final_state.features[k], data.grid);
        }
    }

    // Metrics.
    m.grid = data.grid;
    m.observations = static_cast<std::size_t>(data.y.rows());
    m.holdout = static_cast<std::size_t>(data.y_holdout.rows());
    m.sweeps = run.sweeps;
    m.thin = run.thin;
    m.seed = run.seed;
    m.samples_averaged = holdout_avg.count();
    m.unique_accept_rate = proposals ? static_cast<double>(accepts) / static_cast<double>(proposals) : 0.0;
    m.kplus_final = final_state.feature_count();
    if (!m.kplus_history.empty()) {
        const std::size_t tail_start = m.kplus_history.size() - std::max<std::size_t>(1, m.kplus_history.size() / 4);
        const auto first = m.kplus_history.begin() + static_cast<std::ptrdiff_t>(tail_start);
        m.kplus_tail_min = *std::min_element(first, m.kplus_history.end());
        m.kplus_tail_max = *std::max_element(first, m.kplus_history.end());
        double sum = 0.0;
        for (auto i = first; i != m.kplus_history.end(); ++i) {
            sum += static_cast<double>(*i);
        }
        m.kplus_tail_mean = sum / static_cast<double>(m.kplus_history.end() - first);
    }
    m.theta_ratio_median = median(theta_ratios);
    if (data.truth) {
        m.theta_ratio_generating = config.sim.theta2 / config.sim.theta1;
    }

    const std::size_t max_rank = static_cast<std::size_t>(std::min(data.y.rows(), data.y.cols()));
    std::size_t rank = run.svd_rank;
    if (rank == 0) {
        rank = data.truth ? static_cast<std::size_t>(data.truth->features.rows())
                          : std::max<std::size_t>(1, final_state.feature_count());
    }
    m.svd_rank = std::min(rank, max_rank);
    const SvdBaseline svd = svd_baseline(data.y, m.svd_rank);
    write_matrix(out_dir / "svd_S.ismx", svd.features, prov);
    write_matrix(out_dir / "svd_W.ismx", svd.weights, prov);

    if (has_holdout) {
        const RowMatrix svd_holdout = svd.project(data.y_holdout);
        const RowMatrix& reference = data.truth ? data.truth->holdout_latent : data.y_holdout;
        m.holdout_reference = data.truth ? "latent" : "observed";
        const RowMatrix issfa_holdout =
            holdout_avg.count() > 0 ? holdout_avg.mean() : RowMatrix(RowMatrix::Zero(reference.rows(), reference.cols()));
        m.holdout_sse_issfa = (reference - issfa_holdout).squaredNorm();
        m.holdout_sse_svd = (reference - svd_holdout).squaredNorm();
        m.holdout_sse_ratio = m.holdout_sse_issfa > 0.0 ? m.holdout_sse_svd / m.holdout_sse_issfa : 0.0;
    } else {
        m.holdout_reference = "none";
    }

    if (data.truth && s_final.rows() > 0) {
        const RowMatrix& truth = data.truth->features;
        m.er_truth_issfa = metric_er(truth, s_final);
        m.er_truth_svd = metric_er(truth, svd.features);
        m.er_issfa_truth = metric_er(s_final, truth);
        m.er_svd_truth = metric_er(svd.features, truth);
        m.er_ratio = *m.er_truth_issfa > 0.0 ? *m.er_truth_svd / *m.er_truth_issfa : 0.0;
        m.matches = match_features(truth, s_final);
    }
    m.kurtosis_issfa = kurtosis_or_empty(shared_weight_entries(final_state));
    m.kurtosis_svd = kurtosis_or_empty(std::vector<double>(svd.weights.data(), svd.weights.data() + svd.weights.size()));
    if (run.record_wall_time) {
        m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    write_text(out_dir / "metrics.json", metrics_to_json(m) + "\n");

    result.final_state = final_state;
    return result;
}

EvalReport evaluate_run(const fs::path& run_dir, const std::optional<fs::path>& truth_dir) {
    const fs::path metrics_path = run_dir / "metrics.json";
    const std::string text = read_text(metrics_path);
    EvalReport report;
    report.metrics = metrics_from_json(text);
    if (!(metrics_from_json(metrics_to_json(report.metrics)) == report.metrics)) {
        report.consistent = false;
        report.notes.push_back("metrics.json does not round-trip");
    }
    if (!fs::exists(run_dir / "trace.csv")) {
        report.consistent = false;
        report.notes.push_back("trace.csv missing");
    }
    if (truth_dir) {
        const RowMatrix truth = read_matrix(*truth_dir / "S_true.ismx");
        const RowMatrix s_final = read_matrix(run_dir / "S_final.ismx");
        report.truth_checked = true;
        if (s_final.rows() == 0) {
            report.notes.push_back("final sample has no features; E_r undefined");
        } else {
            const double er = metric_er(truth, s_final);
            const double er_back = metric_er(s_final, truth);
            const auto close = [](const std::optional<double>& stored, double fresh) {
                return stored && std::abs(*stored - fresh) <= 1e-9 * (1.0 + std::abs(fresh));
            };
            if (!close(report.metrics.er_truth_issfa, er) || !close(report.metrics.er_issfa_truth, er_back)) {
                report.consistent = false;
                report.notes.push_back("recomputed E_r differs from metrics.json");
            }
            report.metrics.er_truth_issfa = er;
            report.metrics.er_issfa_truth = er_back;
            report.metrics.matches = match_features(truth, s_final);
        }
    }
    return report;
}

}  // namespace issfa::bench
