#pragma once

#include <memory>

#include "issfa/gmrf/ortho_transform.hpp"
#include "issfa/gmrf/spectral_curve.hpp"
#include "issfa/random.hpp"
#include "issfa/types.hpp"

namespace issfa::gmrf {

/**
 * Precision matrix Q(θ) = U diag(h(θ)) Uᵀ held as (transform, curve, θ).
 *
 * Q is never formed. Every operation costs one or two transforms plus O(V)
 * work in the spectral domain. Operations that need Q positive definite throw
 * std::domain_error when some h_i(θ) ≤ 0.
 */
class SpectralPrecision {
public:
    SpectralPrecision(std::shared_ptr<const OrthoTransform> transform, SpectralCurve curve, Vector theta);

    [[nodiscard]] const OrthoTransform& transform() const { return *transform_; }
    [[nodiscard]] const std::shared_ptr<const OrthoTransform>& shared_transform() const { return transform_; }
    [[nodiscard]] const SpectralCurve& curve() const { return curve_; }
    [[nodiscard]] const Vector& theta() const { return theta_; }
    /// h(θ), the eigenvalues of Q in coefficient order.
    [[nodiscard]] const Vector& eigenvalues() const { return h_; }
    [[nodiscard]] std::size_t size() const { return transform_->size(); }

    [[nodiscard]] SpectralPrecision with_theta(Vector theta) const;

    [[nodiscard]] double logdet() const;
    /// ln N(s; 0, Q⁻¹) including the −(V/2) ln 2π constant.
    [[nodiscard]] double log_density(const Vector& s) const;
    [[nodiscard]] Vector grad_log_density_theta(const Vector& s) const;
    /// sᵀQs.
    [[nodiscard]] double quadratic_form(const Vector& s) const;

    /// Exact draw from N(0, Q⁻¹) as U D^{-1/2} z.
    [[nodiscard]] Vector sample(Rng& rng) const;

    /// (cI + Q)⁻¹ rhs.
    [[nodiscard]] Vector solve_shifted(double c, const Vector& rhs) const;
    /// Draw from N((cI + Q)⁻¹ rhs, (cI + Q)⁻¹).
    [[nodiscard]] Vector sample_shifted(double c, const Vector& rhs, Rng& rng) const;

    void require_positive_definite() const;

private:
    std::shared_ptr<const OrthoTransform> transform_;
    SpectralCurve curve_;
    Vector theta_;
    Vector h_;
};

/// Σ γ_i (Uᵀs)_i², i.e. sᵀLs for the structure with eigenvalues γ.
[[nodiscard]] double base_quadratic_form(const Vector& s, const OrthoTransform& transform, const Vector& gamma);

}  // namespace issfa::gmrf
