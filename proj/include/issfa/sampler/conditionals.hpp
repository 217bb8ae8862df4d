#pragma once

#include <cstddef>
#include <span>

#include "issfa/ibp/ibp.hpp"
#include "issfa/random.hpp"
#include "issfa/sampler/hyperparams.hpp"
#include "issfa/types.hpp"

namespace issfa::sampler {

// Posterior parameters of the conjugate updates. Each sampler step draws from
// exactly these; tests compare them against closed-form and dense oracles.

struct NormalParams {
    double mean;
    double variance;
};

struct GammaParams {
    double shape;
    double rate;
};

struct InverseGammaParams {
    double shape;
    double scale;
};

/// A_{t,k} | ·  given sᵀr (r = Y_t − μ_t, the residual without feature k) and ‖s‖².
[[nodiscard]] NormalParams weight_posterior(double s_dot_r, double s_norm2, double sigma2, double nu, double tau);

/// σ² | ·  ~ IG(n/2 + a, b + sse/2) for n residual entries.
[[nodiscard]] InverseGammaParams noise_posterior(double sse, std::size_t count, const Hyperparams& hp);

/// α | Z, β ~ G(K⁺ + e_α, f_α + H_T(β)).
[[nodiscard]] GammaParams alpha_posterior(std::size_t k_plus, double harmonic_t, const Hyperparams& hp);

/// ν_k from the active weights of column k.
[[nodiscard]] GammaParams nu_posterior(std::span<const double> active_weights, double tau, const Hyperparams& hp);

/// τ_k from the active weights of column k.
[[nodiscard]] NormalParams tau_posterior(std::span<const double> active_weights, double nu, const Hyperparams& hp);

/**
 * ln r_l for switching Z_{t,k} from 0 to 1 with A_{t,k} integrated out:
 * ln N(r₀; τs, σ²I + ν⁻¹ssᵀ) − ln N(r₀; 0, σ²I), where r₀ is the residual
 * of observation t without feature k. O(1) given sᵀr₀ and ‖s‖².
 */
[[nodiscard]] double activation_log_likelihood_ratio(double s_dot_r0, double s_norm2, double tau, double nu,
                                                     double sigma2);

/// ln r_l + ln r_p for a shared feature (m_{k,−t} ≥ 1). Throws
/// std::logic_error for m_{k,−t} = 0.
[[nodiscard]] double activation_log_odds(double s_dot_r0, double s_norm2, double tau, double nu, double sigma2,
                                         std::size_t m_minus_t, double beta, std::size_t rows);

/**
 * ln N(y; μ, σ²I + wQ⁻¹) evaluated in the spectral domain, where
 * coeffs = Uᵀ(y − μ), w = Σ_j a_j² and h are the eigenvalues of Q. The
 * covariance has eigenvalues σ² + w/h_i.
 */
[[nodiscard]] double unique_marginal_log_density(const Vector& coeffs, double weight_sq_sum, double sigma2,
                                                 const Vector& h);

/**
 * Spectral-domain posterior of n stacked unique features given their weights
 * a. At index i the n coefficients have precision aaᵀ/σ² + h_i I and mean
 * a d_i/(σ² h_i + ‖a‖²), with d = Uᵀ(y − μ).
 */
class UniqueFeaturePosterior {
public:
    UniqueFeaturePosterior(Vector weights, double sigma2);

    /// n×V matrix of posterior mean coefficients.
    [[nodiscard]] Matrix mean(const Vector& coeffs, const Vector& h) const;
    /// Applies the symmetric square root of the index-i posterior covariance to z.
    [[nodiscard]] Vector covariance_sqrt_apply(double h_i, const Vector& z) const;
    /// n×V matrix of coefficients drawn from the posterior.
    [[nodiscard]] Matrix draw(const Vector& coeffs, const Vector& h, Rng& rng) const;

private:
    Vector a_;
    double sigma2_;
    double norm2_;
};

/**
 * L = ln P(Z | α, β*) − ln P(Z | α, β), in closed form:
 *   K⁺ (ln β* − ln β) + Σ_k [lnΓ(T − m_k + β*) − lnΓ(T − m_k + β)]
 *   + K⁺ [lnΓ(T + β) − lnΓ(T + β*)] + α [H_T(β) − H_T(β*)].
 */
[[nodiscard]] double beta_log_likelihood_ratio(const ibp::BinaryFeatureMatrix& z, double alpha, double beta,
                                               double beta_star);

/// ln of the MH ratio for the random walk on ln β with a G(e_β, f_β) prior.
[[nodiscard]] double beta_log_acceptance(double log_likelihood_ratio, double beta, double beta_star,
                                         const Hyperparams& hp);

}  // namespace issfa::sampler
