#include "issfa/gmrf/spectral_curve.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace issfa::gmrf {

class SpectralCurve::Impl {
public:
    virtual ~Impl() = default;
    [[nodiscard]] virtual std::size_t parameters() const = 0;
    [[nodiscard]] virtual const Vector& gamma() const = 0;
    virtual void evaluate(const Vector& theta, int order, CurveEvaluation& out) const = 0;
};

namespace {

using Impl = SpectralCurve::Impl;

void size_outputs(CurveEvaluation& out, Eigen::Index v, Eigen::Index p, int order) {
    out.value.resize(v);
    if (order >= 1) {
        out.gradient.setZero(v, p);
    }
    if (order >= 2) {
        out.hessian.setZero(v, p * p);
    }
}

class AffineCurve final : public Impl {
public:
    explicit AffineCurve(Vector gamma) : gamma_(std::move(gamma)) {}
    [[nodiscard]] std::size_t parameters() const override { return 2; }
    [[nodiscard]] const Vector& gamma() const override { return gamma_; }
    void evaluate(const Vector& theta, int order, CurveEvaluation& out) const override {
        size_outputs(out, gamma_.size(), 2, order);
        out.value = theta[0] + theta[1] * gamma_.array();
        if (order >= 1) {
            out.gradient.col(0).setOnes();
            out.gradient.col(1) = gamma_;
        }
    }

private:
    Vector gamma_;
};

class ScaledCurve final : public Impl {
public:
    explicit ScaledCurve(Vector gamma) : gamma_(std::move(gamma)) {}
    [[nodiscard]] std::size_t parameters() const override { return 1; }
    [[nodiscard]] const Vector& gamma() const override { return gamma_; }
    void evaluate(const Vector& theta, int order, CurveEvaluation& out) const override {
        size_outputs(out, gamma_.size(), 1, order);
        out.value = theta[0] * gamma_;
        if (order >= 1) {
            out.gradient.col(0) = gamma_;
        }
    }

private:
    Vector gamma_;
};

class UnitCurve final : public Impl {
public:
    explicit UnitCurve(std::size_t size) : gamma_(Vector::Zero(static_cast<Eigen::Index>(size))) {}
    [[nodiscard]] std::size_t parameters() const override { return 0; }
    [[nodiscard]] const Vector& gamma() const override { return gamma_; }
    void evaluate(const Vector&, int order, CurveEvaluation& out) const override {
        size_outputs(out, gamma_.size(), 0, order);
        out.value.setOnes();
    }

private:
    Vector gamma_;
};

// d^order/dh^order of h^n, zero where the exponent would go negative.
double power_derivative(double h, int n, int order) {
    if (order == 0) {
        return std::pow(h, n);
    }
    if (order == 1) {
        return n == 0 ? 0.0 : n * std::pow(h, n - 1);
    }
    return n <= 1 ? 0.0 : n * (n - 1) * std::pow(h, n - 2);
}

class PowerSumCurve final : public Impl {
public:
    PowerSumCurve(std::shared_ptr<const Impl> base, int n, std::optional<int> m)
        : base_(std::move(base)), n_(n), m_(m) {}
    [[nodiscard]] std::size_t parameters() const override { return base_->parameters(); }
    [[nodiscard]] const Vector& gamma() const override { return base_->gamma(); }
    void evaluate(const Vector& theta, int order, CurveEvaluation& out) const override {
        CurveEvaluation b;
        base_->evaluate(theta, order, b);
        const Eigen::Index v = b.value.size();
        const auto p = static_cast<Eigen::Index>(parameters());
        size_outputs(out, v, p, order);
        for (Eigen::Index i = 0; i < v; ++i) {
            const double h = b.value[i];
            double d0 = power_derivative(h, n_, 0);
            double d1 = power_derivative(h, n_, 1);
            double d2 = power_derivative(h, n_, 2);
            if (m_) {
                d0 += power_derivative(h, *m_, 0);
                d1 += power_derivative(h, *m_, 1);
                d2 += power_derivative(h, *m_, 2);
            }
            out.value[i] = d0;
            if (order >= 1) {
                out.gradient.row(i) = d1 * b.gradient.row(i);
            }
            if (order >= 2) {
                for (Eigen::Index a = 0; a < p; ++a) {
                    for (Eigen::Index c = 0; c < p; ++c) {
                        out.hessian(i, a * p + c) =
                            d2 * b.gradient(i, a) * b.gradient(i, c) + d1 * b.hessian(i, a * p + c);
                    }
                }
            }
        }
    }

private:
    std::shared_ptr<const Impl> base_;
    int n_;
    std::optional<int> m_;
};

class ParamMixCurve final : public Impl {
public:
    explicit ParamMixCurve(std::shared_ptr<const Impl> base) : base_(std::move(base)) {}
    [[nodiscard]] std::size_t parameters() const override { return 2 * base_->parameters(); }
    [[nodiscard]] const Vector& gamma() const override { return base_->gamma(); }
    void evaluate(const Vector& theta, int order, CurveEvaluation& out) const override {
        const auto p = static_cast<Eigen::Index>(base_->parameters());
        CurveEvaluation first, second;
        base_->evaluate(theta.head(p), order, first);
        base_->evaluate(theta.tail(p), order, second);
        const Eigen::Index v = first.value.size();
        size_outputs(out, v, 2 * p, order);
        out.value = first.value + second.value;
        if (order >= 1) {
            out.gradient.leftCols(p) = first.gradient;
            out.gradient.rightCols(p) = second.gradient;
        }
        if (order >= 2) {
            const Eigen::Index pp = 2 * p;
            for (Eigen::Index a = 0; a < p; ++a) {
                for (Eigen::Index c = 0; c < p; ++c) {
                    out.hessian.col(a * pp + c) = first.hessian.col(a * p + c);
                    out.hessian.col((a + p) * pp + (c + p)) = second.hessian.col(a * p + c);
                }
            }
        }
    }

private:
    std::shared_ptr<const Impl> base_;
};

}  // namespace

SpectralCurve SpectralCurve::affine(Vector gamma) {
    if ((gamma.array() < 0.0).any()) {
        throw std::invalid_argument("SpectralCurve::affine: base eigenvalues must be nonnegative");
    }
    return SpectralCurve(std::make_shared<AffineCurve>(std::move(gamma)));
}

SpectralCurve SpectralCurve::scaled(Vector gamma) {
    if ((gamma.array() < 0.0).any()) {
        throw std::invalid_argument("SpectralCurve::scaled: base eigenvalues must be nonnegative");
    }
    return SpectralCurve(std::make_shared<ScaledCurve>(std::move(gamma)));
}

SpectralCurve SpectralCurve::isotropic(std::size_t size) {
    return scaled(Vector::Ones(static_cast<Eigen::Index>(size)));
}

SpectralCurve SpectralCurve::unit(std::size_t size) { return SpectralCurve(std::make_shared<UnitCurve>(size)); }

std::size_t SpectralCurve::parameter_count() const { return impl_->parameters(); }

std::size_t SpectralCurve::size() const { return static_cast<std::size_t>(impl_->gamma().size()); }

const Vector& SpectralCurve::gamma() const { return impl_->gamma(); }

void SpectralCurve::check_parameters(const Vector& theta) const {
    if (static_cast<std::size_t>(theta.size()) != parameter_count()) {
        throw std::invalid_argument("SpectralCurve: expected " + std::to_string(parameter_count()) +
                                    " parameters, got " + std::to_string(theta.size()));
    }
    if ((theta.array() <= 0.0).any() || !theta.allFinite()) {
        throw std::invalid_argument("SpectralCurve: parameters must be finite and positive");
    }
}

CurveEvaluation SpectralCurve::evaluate(const Vector& theta, int order) const {
    if (static_cast<std::size_t>(theta.size()) != parameter_count()) {
        throw std::invalid_argument("SpectralCurve: expected " + std::to_string(parameter_count()) +
                                    " parameters, got " + std::to_string(theta.size()));
    }
    CurveEvaluation out;
    impl_->evaluate(theta, order, out);
    return out;
}

Vector SpectralCurve::values(const Vector& theta) const { return evaluate(theta, 0).value; }

Matrix SpectralCurve::jacobian(const Vector& theta) const { return evaluate(theta, 1).gradient; }

double SpectralCurve::eval(const Vector& theta, std::size_t i) const {
    return values(theta)[static_cast<Eigen::Index>(i)];
}

Vector SpectralCurve::grad(const Vector& theta, std::size_t i) const {
    return jacobian(theta).row(static_cast<Eigen::Index>(i)).transpose();
}

SpectralCurve curve_power_sum(const SpectralCurve& base, int n, std::optional<int> m) {
    if (n < 0 || (m && *m < 0)) {
        throw std::invalid_argument("curve_power_sum: exponents must be nonnegative");
    }
    return SpectralCurve(std::make_shared<PowerSumCurve>(base.impl_, n, m));
}

SpectralCurve curve_param_mix(const SpectralCurve& base) {
    return SpectralCurve(std::make_shared<ParamMixCurve>(base.impl_));
}

}  // namespace issfa::gmrf
