#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "issfa/bench/config.hpp"
#include "issfa/bench/metrics.hpp"
#include "issfa/bench/simulate.hpp"
#include "issfa/sampler/model_state.hpp"

namespace issfa::bench {

/// One row of trace.csv. train_sse is ‖Y − (A∘Z)S‖² on the training rows;
/// holdout_sse is ‖Y_h − X̂_h‖² for the holdout reconstruction of that sample.
struct TraceRecord {
    std::size_t iteration = 0;
    std::size_t k_plus = 0;
    double sigma2 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double train_sse = 0.0;
    double holdout_sse = 0.0;
    double wall_ms = 0.0;
};

inline constexpr const char* kTraceHeader = "iter,Kplus,sigma2,alpha,beta,theta1,theta2,train_sse,holdout_sse,wall_ms";
[[nodiscard]] std::string format_trace_row(const TraceRecord& record);

/// Summary written to metrics.json. Truth-dependent fields are empty when the
/// dataset carries no ground truth.
struct ExperimentMetrics {
    int schema_version = 1;
    std::vector<std::size_t> grid;
    std::size_t observations = 0;
    std::size_t holdout = 0;
    std::size_t sweeps = 0;
    std::size_t thin = 0;
    std::uint64_t seed = 0;
    std::size_t samples_averaged = 0;
    std::size_t svd_rank = 0;

    std::string holdout_reference;  // "latent" (vs X_h) or "observed" (vs Y_h)
    double holdout_sse_issfa = 0.0;
    double holdout_sse_svd = 0.0;
    double holdout_sse_ratio = 0.0;  // svd / issfa

    std::optional<double> er_truth_issfa;  // E_r(S_true, S_issfa)
    std::optional<double> er_truth_svd;
    std::optional<double> er_issfa_truth;  // E_r(S_issfa, S_true)
    std::optional<double> er_svd_truth;
    std::optional<double> er_ratio;  // E_r(S_true, S_svd) / E_r(S_true, S_issfa)
    std::vector<FeatureMatch> matches;

    std::optional<double> kurtosis_issfa;  // shared columns of the final A∘Z
    std::optional<double> kurtosis_svd;    // SVD weights W

    std::vector<std::size_t> kplus_history;  // every sweep
    std::size_t kplus_final = 0;
    std::size_t kplus_tail_min = 0;  // last 25% of sweeps
    std::size_t kplus_tail_max = 0;
    double kplus_tail_mean = 0.0;

    double theta_ratio_median = 0.0;  // θ₂/θ₁ over post-burn-in sweeps
    std::optional<double> theta_ratio_generating;

    double unique_accept_rate = 0.0;
    std::size_t clamped_proposals = 0;
    std::size_t theta_fit_failures = 0;
    double wall_seconds = 0.0;

    bool operator==(const ExperimentMetrics&) const;
};

[[nodiscard]] std::string metrics_to_json(const ExperimentMetrics& metrics);
/// Throws std::runtime_error listing the first missing or mistyped field.
[[nodiscard]] ExperimentMetrics metrics_from_json(const std::string& text);

struct ExperimentResult {
    ExperimentMetrics metrics;
    sampler::ModelState final_state;
    std::vector<TraceRecord> trace;
};

/**
 * Runs the sampler on `data` and writes into out_dir:
 *   config.ini, trace.csv, metrics.json,
 *   checkpoints/sweep_<n>.bin and checkpoints/final.bin,
 *   samples/S_<n>.ismx (one per thinned sample),
 *   features/feature_<k>.pgm (final sample),
 *   S_final.ismx, W_final.ismx, X_hat.ismx, X_holdout_hat.ismx,
 *   svd_S.ismx, svd_W.ismx.
 *
 * Seeds: initialisation, sampler and holdout inference use documented
 * substreams of config.run.seed (see issfa::stream).
 */
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data,
                                const std::filesystem::path& out_dir,
                                const std::function<void(const TraceRecord&)>& progress = {});

struct EvalReport {
    ExperimentMetrics metrics;
    bool truth_checked = false;
    bool consistent = true;  // recomputed truth metrics agree with metrics.json
    std::vector<std::string> notes;
};

/// Reloads a run directory, checks that metrics.json round-trips, and with a
/// truth directory recomputes E_r and the feature matching from S_final.
[[nodiscard]] EvalReport evaluate_run(const std::filesystem::path& run_dir,
                                      const std::optional<std::filesystem::path>& truth_dir);

}  // namespace issfa::bench
