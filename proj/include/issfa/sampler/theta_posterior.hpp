#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "issfa/gmrf/ortho_transform.hpp"
#include "issfa/gmrf/spectral_curve.hpp"
#include "issfa/types.hpp"

namespace issfa::sampler {

/// E_i = Σ_k (Uᵀ S_k)_i², the sufficient statistic of S for ξ.
[[nodiscard]] Vector spectral_energy(const std::vector<Vector>& features, const gmrf::OrthoTransform& transform);

/**
 * ln p(ξ | S) up to a constant, with θ = exp(ξ):
 *   (K/2) Σ_i ln h_i(θ) − ½ Σ_i h_i(θ) E_i − Σ_p (r_p/2)(ξ_p − m_p)².
 *
 * For the affine curve the data term is θ₁ Σ_k‖S_k‖² + θ₂ Σ_k S_k L S_kᵀ.
 * Derivatives are taken in ξ: ∂/∂ξ_p = θ_p ∂/∂θ_p and
 * ∂²/∂ξ_p∂ξ_q = θ_pθ_q ∂²/∂θ_p∂θ_q + δ_pq θ_p ∂/∂θ_p.
 */
class ThetaLogPosterior {
public:
    ThetaLogPosterior(gmrf::SpectralCurve curve, Vector energy, std::size_t feature_count, Vector prior_mean,
                      Vector prior_precision);

    /// −∞ where some h_i(θ) ≤ 0.
    [[nodiscard]] double value(const Vector& xi) const;
    [[nodiscard]] Vector gradient(const Vector& xi) const;
    [[nodiscard]] Matrix hessian(const Vector& xi) const;

    [[nodiscard]] std::size_t dimension() const { return curve_.parameter_count(); }

private:
    gmrf::SpectralCurve curve_;
    Vector energy_;
    double half_k_;
    Vector prior_mean_;
    Vector prior_precision_;
};

struct LaplaceFit {
    Vector mode;
    Matrix precision;  // negative Hessian at the mode
    bool converged = false;
    int iterations = 0;
    std::string method;  // "newton", "gradient" or "failed"
};

/// MAP by damped Newton; falls back to gradient ascent with backtracking when
/// Newton does not converge within max_newton_iterations.
[[nodiscard]] LaplaceFit fit_laplace(const ThetaLogPosterior& posterior, const Vector& start,
                                     int max_newton_iterations = 100);

}  // namespace issfa::sampler
