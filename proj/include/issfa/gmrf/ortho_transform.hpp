#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "issfa/types.hpp"

namespace issfa::gmrf {

enum class AxisBasis { kDct, kHaar };

enum class TransformKind { kDct1D, kDctKronecker2D, kDctKronecker3D, kHaarDwt, kMixed };

/// Axes longer than this use the O(N log N) DCT kernel instead of a dense
/// per-axis factor.
inline constexpr std::size_t kFastDctThreshold = 64;

/**
 * Orthonormal separable transform U = U_1 ⊗ U_2 ⊗ ... over a regular grid.
 *
 * Vectors are laid out row-major over the axes (axis 0 slowest), and so are
 * the coefficients: coefficient (k_0, k_1, ...) sits at the same flat index as
 * grid point (k_0, k_1, ...). forward() computes Uᵀv, inverse() computes Uc.
 *
 * DCT axes use the orthonormal DCT-II, column k scaled by sqrt(1/N) for k = 0
 * and sqrt(2/N) otherwise. Haar axes require a power-of-two length; their
 * coefficient 0 is the constant vector.
 *
 * Instances are immutable and safe to share between threads.
 */
class OrthoTransform {
public:
    OrthoTransform(std::vector<std::size_t> dims, std::vector<AxisBasis> bases);

    static OrthoTransform dct(std::vector<std::size_t> dims);
    static OrthoTransform haar(std::vector<std::size_t> dims);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }
    [[nodiscard]] const std::vector<AxisBasis>& bases() const { return bases_; }
    [[nodiscard]] TransformKind kind() const;

    void forward(std::span<const double> values, std::span<double> coeffs) const;
    void inverse(std::span<const double> coeffs, std::span<double> values) const;

    [[nodiscard]] Vector forward(const Vector& values) const;
    [[nodiscard]] Vector inverse(const Vector& coeffs) const;

    class AxisKernel;

private:
    void apply(std::span<const double> in, std::span<double> out, bool inverse) const;

    std::vector<std::size_t> dims_;
    std::vector<AxisBasis> bases_;
    std::size_t size_ = 0;
    std::vector<std::shared_ptr<const AxisKernel>> kernels_;
};

/// γ_k = 2 − 2cos(kπ/N), the eigenvalues of the free-boundary path-graph
/// Laplacian in DCT-II order. Throws std::invalid_argument for N = 0.
[[nodiscard]] Vector laplacian_eigenvalues(std::size_t n);

/// out[i*N2 + j] = a[i] + b[j]: eigenvalues of A ⊕ B in the coefficient
/// layout of the composite transform.
[[nodiscard]] Vector kronecker_sum_eigenvalues(const Vector& a, const Vector& b);
[[nodiscard]] Vector kronecker_sum_eigenvalues(const Vector& a, const Vector& b, const Vector& c);

/// Grid-graph Laplacian eigenvalues for a DCT transform over `dims`.
[[nodiscard]] Vector grid_laplacian_eigenvalues(const std::vector<std::size_t>& dims);

}  // namespace issfa::gmrf
