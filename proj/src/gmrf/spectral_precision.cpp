#include "issfa/gmrf/spectral_precision.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace issfa::gmrf {

SpectralPrecision::SpectralPrecision(std::shared_ptr<const OrthoTransform> transform, SpectralCurve curve,
                                     Vector theta)
    : transform_(std::move(transform)), curve_(std::move(curve)), theta_(std::move(theta)) {
    if (!transform_) {
        throw std::invalid_argument("SpectralPrecision: null transform");
    }
    if (curve_.size() != transform_->size()) {
        throw std::invalid_argument("SpectralPrecision: curve has " + std::to_string(curve_.size()) +
                                    " eigenvalues but transform has size " + std::to_string(transform_->size()));
    }
    curve_.check_parameters(theta_);
    h_ = curve_.values(theta_);
}

SpectralPrecision SpectralPrecision::with_theta(Vector theta) const {
    return SpectralPrecision(transform_, curve_, std::move(theta));
}

void SpectralPrecision::require_positive_definite() const {
    if (!(h_.array() > 0.0).all() || !h_.allFinite()) {
        throw std::domain_error("SpectralPrecision: precision is not positive definite (some h_i(theta) <= 0)");
    }
}

double SpectralPrecision::logdet() const {
    require_positive_definite();
    return h_.array().log().sum();
}

double SpectralPrecision::log_density(const Vector& s) const {
    require_positive_definite();
    const Vector c = transform_->forward(s);
    const double v = static_cast<double>(size());
    return -0.5 * v * std::log(2.0 * std::numbers::pi) + 0.5 * h_.array().log().sum() -
           0.5 * (h_.array() * c.array().square()).sum();
}

Vector SpectralPrecision::grad_log_density_theta(const Vector& s) const {
    require_positive_definite();
    const Vector c = transform_->forward(s);
    const Matrix jac = curve_.jacobian(theta_);
    const Vector weight = 0.5 * (h_.array().inverse() - c.array().square()).matrix();
    return jac.transpose() * weight;
}

double SpectralPrecision::quadratic_form(const Vector& s) const {
    const Vector c = transform_->forward(s);
    return (h_.array() * c.array().square()).sum();
}

Vector SpectralPrecision::sample(Rng& rng) const {
    require_positive_definite();
    Vector z(h_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] = rng.normal() / std::sqrt(h_[i]);
    }
    return transform_->inverse(z);
}

namespace {
Vector shifted_eigenvalues(const Vector& h, double c) {
    Vector shifted = h.array() + c;
    if (!(shifted.array() > 0.0).all()) {
        throw std::domain_error("solve_shifted: cI + Q is singular (c + h_i <= 0)");
    }
    return shifted;
}
}  // namespace

Vector SpectralPrecision::solve_shifted(double c, const Vector& rhs) const {
    const Vector shifted = shifted_eigenvalues(h_, c);
    Vector b = transform_->forward(rhs);
    b.array() /= shifted.array();
    return transform_->inverse(b);
}

Vector SpectralPrecision::sample_shifted(double c, const Vector& rhs, Rng& rng) const {
    const Vector shifted = shifted_eigenvalues(h_, c);
    Vector b = transform_->forward(rhs);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        b[i] = b[i] / shifted[i] + rng.normal() / std::sqrt(shifted[i]);
    }
    return transform_->inverse(b);
}

double base_quadratic_form(const Vector& s, const OrthoTransform& transform, const Vector& gamma) {
    const Vector c = transform.forward(s);
    return (gamma.array() * c.array().square()).sum();
}

}  // namespace issfa::gmrf
