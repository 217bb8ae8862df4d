#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "issfa/gmrf/ortho_transform.hpp"
#include "issfa/gmrf/spectral_curve.hpp"
#include "issfa/gmrf/spectral_precision.hpp"
#include "issfa/random.hpp"
#include "issfa/sampler/hyperparams.hpp"
#include "issfa/sampler/model_state.hpp"
#include "issfa/types.hpp"

namespace issfa::sampler {

/// Which updates a sweep applies, and housekeeping knobs. Disabling an update
/// freezes that block at its current value (used by the Geweke checks and by
/// ablations).
struct SamplerOptions {
    std::size_t residual_refresh = 50;  // full residual recomputation period, in sweeps
    bool update_features = true;
    bool update_activations = true;  // shared activations and all active weights
    bool update_unique = true;
    bool update_noise = true;
    bool update_theta = true;
    bool update_alpha = true;
    bool update_beta = true;
    bool update_nu = true;
    bool update_tau = true;
    /// Receives non-fatal warnings (θ optimiser failures). Defaults to stderr.
    std::function<void(const std::string&)> warn;
};

/// Counters from the most recent sweep.
struct SweepDiagnostics {
    std::size_t unique_proposals = 0;
    std::size_t unique_accepts = 0;
    std::size_t clamped_proposals = 0;  // n* drawn above max_new_features
    std::size_t activations_flipped = 0;
    bool theta_accepted = false;
    bool theta_fit_failed = false;
    bool beta_accepted = false;
    std::size_t pruned = 0;
    double residual_drift = 0.0;  // measured only on refresh sweeps, else 0
};

/**
 * Gibbs/Metropolis kernel for the iSSFA model.
 *
 * One sweep applies, in order: the feature-row draws S_k for every column,
 * the shared-activation and weight draws for every observation, the
 * unique-feature block for every observation, then σ², ξ, α, β, ν, τ, and
 * finally prunes empty columns.
 *
 * Columns with m_k = 1 belong to their single observation: that observation
 * never runs the shared step on them and instead recycles them through the
 * unique-feature block.
 *
 * Randomness: sweep i uses the substream (seed, i) and every observation or
 * column inside a phase draws from its own child stream. Results therefore
 * depend only on (seed, data, initial state, options), not on evaluation
 * order within a phase.
 */
class GibbsSampler {
public:
    GibbsSampler(RowMatrix y, std::shared_ptr<const gmrf::OrthoTransform> transform, gmrf::SpectralCurve curve,
                 Hyperparams hp, SamplerOptions options, ModelState initial, std::uint64_t seed);

    /// Runs one full sweep and returns its diagnostics.
    const SweepDiagnostics& sweep();

    // Individual updates. Each leaves the residual cache consistent.
    void update_feature_row(std::size_t k, Rng& rng);
    /// Shared activations of observation t plus the weight draw of every
    /// feature active in t.
    void update_activations(std::size_t t, Rng& rng);
    /// MH block over the unique features of observation t followed by the
    /// exact draw of their feature vectors. Returns true on acceptance.
    bool update_unique_features(std::size_t t, Rng& rng);
    void update_noise(Rng& rng);
    void update_theta(Rng& rng);
    void update_alpha(Rng& rng);
    void update_beta(Rng& rng);
    void update_weight_precisions(Rng& rng);
    void update_weight_means(Rng& rng);

    /// Replaces the observations (the Geweke successive-conditional chain
    /// redraws Y each iteration) and recomputes the residuals.
    void set_data(RowMatrix y);
    void set_state(ModelState state);

    [[nodiscard]] const ModelState& state() const { return state_; }
    [[nodiscard]] const RowMatrix& data() const { return y_; }
    [[nodiscard]] const ResidualCache& residuals() const { return residuals_; }
    [[nodiscard]] const gmrf::SpectralPrecision& precision() const { return *precision_; }
    [[nodiscard]] const Hyperparams& hyperparams() const { return hp_; }
    [[nodiscard]] const SweepDiagnostics& diagnostics() const { return diagnostics_; }
    [[nodiscard]] std::size_t iteration() const { return iteration_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    /// Restores the sweep counter (checkpoint resume).
    void set_iteration(std::size_t iteration) { iteration_ = iteration; }

    /// Indices of the features with m_k = 1 active in observation t.
    [[nodiscard]] std::vector<std::size_t> unique_features_of(std::size_t t) const;

private:
    void refresh_precision();
    void warn(const std::string& message) const;

    RowMatrix y_;
    std::shared_ptr<const gmrf::OrthoTransform> transform_;
    gmrf::SpectralCurve curve_;
    Hyperparams hp_;
    SamplerOptions options_;
    ModelState state_;
    ResidualCache residuals_;
    std::optional<gmrf::SpectralPrecision> precision_;
    std::uint64_t seed_;
    std::size_t iteration_ = 0;
    SweepDiagnostics diagnostics_;
};

}  // namespace issfa::sampler
