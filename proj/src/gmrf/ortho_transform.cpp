#include "issfa/gmrf/ortho_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "issfa/gmrf/dense_guard.hpp"

namespace issfa::gmrf {

class OrthoTransform::AxisKernel {
public:
    virtual ~AxisKernel() = default;
    // Contiguous line of length n(); `in` and `out` do not alias.
    virtual void forward(const double* in, double* out) const = 0;
    virtual void inverse(const double* in, double* out) const = 0;
    [[nodiscard]] virtual std::size_t n() const = 0;
};

namespace {

using AxisKernel = OrthoTransform::AxisKernel;

double dct_scale(std::size_t k, std::size_t n) {
    return k == 0 ? std::sqrt(1.0 / static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n));
}

class DenseDctKernel final : public AxisKernel {
public:
    explicit DenseDctKernel(std::size_t n) : n_(n), m_(n * n) {
        dense_guard::record(n);
        const double pi = std::numbers::pi;
        for (std::size_t k = 0; k < n; ++k) {
            const double s = dct_scale(k, n);
            for (std::size_t j = 0; j < n; ++j) {
                m_[k * n + j] = s * std::cos((static_cast<double>(j) + 0.5) * static_cast<double>(k) * pi /
                                             static_cast<double>(n));
            }
        }
    }

    void forward(const double* in, double* out) const override {
        for (std::size_t k = 0; k < n_; ++k) {
            const double* row = &m_[k * n_];
            double acc = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                acc += row[j] * in[j];
            }
            out[k] = acc;
        }
    }

    void inverse(const double* in, double* out) const override {
        std::fill(out, out + n_, 0.0);
        for (std::size_t k = 0; k < n_; ++k) {
            const double* row = &m_[k * n_];
            const double c = in[k];
            for (std::size_t j = 0; j < n_; ++j) {
                out[j] += row[j] * c;
            }
        }
    }

    [[nodiscard]] std::size_t n() const override { return n_; }

private:
    std::size_t n_;
    std::vector<double> m_;  // row k = k-th basis vector
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class FastDctKernel final : public AxisKernel {
public:
    explicit FastDctKernel(std::size_t n) : n_(n) {
        std::vector<double> a(n), b(n);
        const int len = static_cast<int>(n);
        std::lock_guard lock(fftw_planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_r2r_1d(len, a.data(), b.data(), FFTW_REDFT10, flags);
        inv_ = fftw_plan_r2r_1d(len, a.data(), b.data(), FFTW_REDFT01, flags);
        if (fwd_ == nullptr || inv_ == nullptr) {
            throw std::runtime_error("FFTW failed to plan a DCT of length " + std::to_string(n));
        }
    }

    ~FastDctKernel() override {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }

    FastDctKernel(const FastDctKernel&) = delete;
    FastDctKernel& operator=(const FastDctKernel&) = delete;

    void forward(const double* in, double* out) const override {
        // REDFT10: Y_k = 2 Σ x_j cos(π(j+½)k/N)
        std::vector<double> tmp(in, in + n_);
        fftw_execute_r2r(fwd_, tmp.data(), out);
        for (std::size_t k = 0; k < n_; ++k) {
            out[k] *= 0.5 * dct_scale(k, n_);
        }
    }

    void inverse(const double* in, double* out) const override {
        // REDFT01: x_j = X_0 + 2 Σ_{k≥1} X_k cos(π(j+½)k/N)
        std::vector<double> tmp(n_);
        tmp[0] = in[0] * dct_scale(0, n_);
        for (std::size_t k = 1; k < n_; ++k) {
            tmp[k] = 0.5 * in[k] * dct_scale(k, n_);
        }
        fftw_execute_r2r(inv_, tmp.data(), out);
    }

    [[nodiscard]] std::size_t n() const override { return n_; }

private:
    std::size_t n_;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

class HaarKernel final : public AxisKernel {
public:
    explicit HaarKernel(std::size_t n) : n_(n) {
        if (!is_power_of_two(n)) {
            throw std::invalid_argument("Haar transform requires a power-of-two axis, got " + std::to_string(n));
        }
    }

    // Output layout: [constant, coarsest detail, ..., finest details].
    void forward(const double* in, double* out) const override {
        std::vector<double> a(in, in + n_), tmp(n_);
        for (std::size_t len = n_; len > 1; len /= 2) {
            const std::size_t half = len / 2;
            for (std::size_t i = 0; i < half; ++i) {
                tmp[i] = (a[2 * i] + a[2 * i + 1]) * std::numbers::sqrt2 / 2.0;
                tmp[half + i] = (a[2 * i] - a[2 * i + 1]) * std::numbers::sqrt2 / 2.0;
            }
            std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), a.begin());
        }
        std::copy(a.begin(), a.end(), out);
    }

    void inverse(const double* in, double* out) const override {
        std::vector<double> a(in, in + n_), tmp(n_);
        for (std::size_t len = 2; len <= n_; len *= 2) {
            const std::size_t half = len / 2;
            for (std::size_t i = 0; i < half; ++i) {
                tmp[2 * i] = (a[i] + a[half + i]) * std::numbers::sqrt2 / 2.0;
                tmp[2 * i + 1] = (a[i] - a[half + i]) * std::numbers::sqrt2 / 2.0;
            }
            std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), a.begin());
        }
        std::copy(a.begin(), a.end(), out);
    }

    [[nodiscard]] std::size_t n() const override { return n_; }

private:
    std::size_t n_;
};

std::shared_ptr<const AxisKernel> make_kernel(std::size_t n, AxisBasis basis) {
    if (basis == AxisBasis::kHaar) {
        return std::make_shared<HaarKernel>(n);
    }
    if (n > kFastDctThreshold) {
        return std::make_shared<FastDctKernel>(n);
    }
    return std::make_shared<DenseDctKernel>(n);
}

}  // namespace

OrthoTransform::OrthoTransform(std::vector<std::size_t> dims, std::vector<AxisBasis> bases)
    : dims_(std::move(dims)), bases_(std::move(bases)) {
    if (dims_.empty()) {
        throw std::invalid_argument("OrthoTransform: at least one axis required");
    }
    if (bases_.size() != dims_.size()) {
        throw std::invalid_argument("OrthoTransform: one basis per axis required");
    }
    size_ = 1;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (dims_[i] == 0) {
            throw std::invalid_argument("OrthoTransform: zero-length axis");
        }
        size_ *= dims_[i];
        kernels_.push_back(make_kernel(dims_[i], bases_[i]));
    }
}

OrthoTransform OrthoTransform::dct(std::vector<std::size_t> dims) {
    std::vector<AxisBasis> bases(dims.size(), AxisBasis::kDct);
    return OrthoTransform(std::move(dims), std::move(bases));
}

OrthoTransform OrthoTransform::haar(std::vector<std::size_t> dims) {
    std::vector<AxisBasis> bases(dims.size(), AxisBasis::kHaar);
    return OrthoTransform(std::move(dims), std::move(bases));
}

TransformKind OrthoTransform::kind() const {
    const bool all_dct = std::all_of(bases_.begin(), bases_.end(), [](AxisBasis b) { return b == AxisBasis::kDct; });
    const bool all_haar =
        std::all_of(bases_.begin(), bases_.end(), [](AxisBasis b) { return b == AxisBasis::kHaar; });
    if (all_haar) {
        return TransformKind::kHaarDwt;
    }
    if (all_dct) {
        switch (dims_.size()) {
            case 1:
                return TransformKind::kDct1D;
            case 2:
                return TransformKind::kDctKronecker2D;
            case 3:
                return TransformKind::kDctKronecker3D;
            default:
                break;
        }
    }
    return TransformKind::kMixed;
}

void OrthoTransform::apply(std::span<const double> in, std::span<double> out, bool inverse) const {
    if (in.size() != size_ || out.size() != size_) {
        throw std::invalid_argument("OrthoTransform: vector length " + std::to_string(in.size()) +
                                    " does not match transform size " + std::to_string(size_));
    }
    std::copy(in.begin(), in.end(), out.begin());
    std::size_t max_axis = *std::max_element(dims_.begin(), dims_.end());
    std::vector<double> line(max_axis), result(max_axis);

    std::size_t outer = 1;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        const std::size_t n = dims_[a];
        const std::size_t stride = size_ / (outer * n);
        const AxisKernel& kernel = *kernels_[a];
        if (n > 1) {
            for (std::size_t o = 0; o < outer; ++o) {
                for (std::size_t i = 0; i < stride; ++i) {
                    double* base = out.data() + o * n * stride + i;
                    for (std::size_t j = 0; j < n; ++j) {
                        line[j] = base[j * stride];
                    }
                    if (inverse) {
                        kernel.inverse(line.data(), result.data());
                    } else {
                        kernel.forward(line.data(), result.data());
                    }
                    for (std::size_t j = 0; j < n; ++j) {
                        base[j * stride] = result[j];
                    }
                }
            }
        }
        outer *= n;
    }
}

void OrthoTransform::forward(std::span<const double> values, std::span<double> coeffs) const {
    apply(values, coeffs, false);
}

void OrthoTransform::inverse(std::span<const double> coeffs, std::span<double> values) const {
    apply(coeffs, values, true);
}

Vector OrthoTransform::forward(const Vector& values) const {
    Vector out(static_cast<Eigen::Index>(size_));
    forward(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())),
            std::span<double>(out.data(), size_));
    return out;
}

Vector OrthoTransform::inverse(const Vector& coeffs) const {
    Vector out(static_cast<Eigen::Index>(size_));
    inverse(std::span<const double>(coeffs.data(), static_cast<std::size_t>(coeffs.size())),
            std::span<double>(out.data(), size_));
    return out;
}

Vector laplacian_eigenvalues(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("laplacian_eigenvalues: axis size must be at least 1");
    }
    Vector gamma(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        gamma[static_cast<Eigen::Index>(k)] =
            2.0 - 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(n));
    }
    gamma[0] = 0.0;
    return gamma;
}

Vector kronecker_sum_eigenvalues(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            out[i * b.size() + j] = a[i] + b[j];
        }
    }
    return out;
}

Vector kronecker_sum_eigenvalues(const Vector& a, const Vector& b, const Vector& c) {
    return kronecker_sum_eigenvalues(kronecker_sum_eigenvalues(a, b), c);
}

Vector grid_laplacian_eigenvalues(const std::vector<std::size_t>& dims) {
    if (dims.empty()) {
        throw std::invalid_argument("grid_laplacian_eigenvalues: no axes");
    }
    Vector out = laplacian_eigenvalues(dims[0]);
    for (std::size_t a = 1; a < dims.size(); ++a) {
        out = kronecker_sum_eigenvalues(out, laplacian_eigenvalues(dims[a]));
    }
    return out;
}

}  // namespace issfa::gmrf
