#pragma once

#include <cstddef>
#include <string>

#include "issfa/gmrf/ortho_transform.hpp"
#include "issfa/gmrf/spectral_curve.hpp"
#include "issfa/random.hpp"
#include "issfa/sampler/hyperparams.hpp"
#include "issfa/sampler/model_state.hpp"
#include "issfa/types.hpp"

namespace issfa::sampler {

enum class InitMethod { kKMeans, kPrior };

[[nodiscard]] InitMethod parse_init_method(const std::string& name);
[[nodiscard]] std::string to_string(InitMethod method);

struct InitOptions {
    InitMethod method = InitMethod::kKMeans;
    std::size_t clusters = 15;
    std::size_t kmeans_iterations = 25;
    /// Z_{t,k} starts at 1 where the cosine between Y_t and centroid k exceeds this.
    double corr_threshold = 0.1;
};

/**
 * Starting state for a run on data y.
 *
 * kKMeans: k-means++ seeding then Lloyd iterations on the rows of y; the
 * centroids become S, Z is the thresholded cosine, A the least-squares
 * coefficient of each active pair, τ_k the mean active weight, ν_k the prior
 * mean, σ² the residual variance, ξ the prior mean, α = β = 1. Columns left
 * empty by the threshold are dropped.
 *
 * kPrior: a draw from the joint prior (sample_prior_state).
 */
[[nodiscard]] ModelState initialise(const RowMatrix& y, const gmrf::OrthoTransform& transform,
                                    const gmrf::SpectralCurve& curve, const Hyperparams& hp,
                                    const InitOptions& options, Rng& rng);

/// Exact draw of every latent variable from the prior: ξ, α, β, σ², Z ~ IBP,
/// per-column ν, τ, the active weights, and S_k ~ N(0, Q(θ)⁻¹).
[[nodiscard]] ModelState sample_prior_state(std::size_t rows, const gmrf::OrthoTransform& transform,
                                            const gmrf::SpectralCurve& curve, const Hyperparams& hp, Rng& rng);

/// Y = (A∘Z)S + E with E_{t,v} ~ N(0, σ²).
[[nodiscard]] RowMatrix sample_data(const ModelState& state, std::size_t dimension, Rng& rng);

}  // namespace issfa::sampler
