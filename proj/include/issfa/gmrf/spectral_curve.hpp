#pragma once

#include <cstddef>
#include <memory>
#include <optional>

#include "issfa/types.hpp"

namespace issfa::gmrf {

/// Values and θ-derivatives of a curve at every spectral index.
/// gradient is V×P; hessian is V×(P·P) with entry (i, p·P + q) = ∂²h_i/∂θ_p∂θ_q.
struct CurveEvaluation {
    Vector value;
    Matrix gradient;
    Matrix hessian;
};

/**
 * Spectral curve θ ↦ h(θ) ∈ ℝ^V mapping precision parameters to the
 * eigenvalues of Q(θ) = U diag(h(θ)) Uᵀ.
 *
 * A curve is an immutable value with shared implementation; combinators build
 * new curves from existing ones without copying the base eigenvalue vector.
 */
class SpectralCurve {
public:
    class Impl;

    /// h_i = θ_1 + θ_2 γ_i.
    static SpectralCurve affine(Vector gamma);
    /// h_i = θ γ_i.
    static SpectralCurve scaled(Vector gamma);
    /// h_i = θ.
    static SpectralCurve isotropic(std::size_t size);
    /// h_i = 1, no parameters.
    static SpectralCurve unit(std::size_t size);

    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] std::size_t size() const;
    /// Base eigenvalue vector γ of the underlying structure.
    [[nodiscard]] const Vector& gamma() const;

    [[nodiscard]] Vector values(const Vector& theta) const;
    [[nodiscard]] Matrix jacobian(const Vector& theta) const;
    /// order 0: value only; 1: plus gradient; 2: plus hessian.
    [[nodiscard]] CurveEvaluation evaluate(const Vector& theta, int order) const;

    [[nodiscard]] double eval(const Vector& theta, std::size_t i) const;
    [[nodiscard]] Vector grad(const Vector& theta, std::size_t i) const;

    /// Throws std::invalid_argument unless theta has P entries, all > 0.
    void check_parameters(const Vector& theta) const;

private:
    explicit SpectralCurve(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    friend SpectralCurve curve_power_sum(const SpectralCurve&, int, std::optional<int>);
    friend SpectralCurve curve_param_mix(const SpectralCurve&);

    std::shared_ptr<const Impl> impl_;
};

/// h'_i = h_i^n + h_i^m (or h_i^n alone when m is omitted).
[[nodiscard]] SpectralCurve curve_power_sum(const SpectralCurve& base, int n, std::optional<int> m = std::nullopt);

/// h'_i(θ') = h_i(θ₍₁₎) + h_i(θ₍₂₎) with θ' = (θ₍₁₎, θ₍₂₎) concatenated, so the
/// mixed curve has 2P parameters.
[[nodiscard]] SpectralCurve curve_param_mix(const SpectralCurve& base);

}  // namespace issfa::gmrf
