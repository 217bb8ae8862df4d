#include "issfa/sampler/theta_posterior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace issfa::sampler {

Vector spectral_energy(const std::vector<Vector>& features, const gmrf::OrthoTransform& transform) {
    Vector energy = Vector::Zero(static_cast<Eigen::Index>(transform.size()));
    for (const Vector& s : features) {
        energy += transform.forward(s).array().square().matrix();
    }
    return energy;
}

ThetaLogPosterior::ThetaLogPosterior(gmrf::SpectralCurve curve, Vector energy, std::size_t feature_count,
                                     Vector prior_mean, Vector prior_precision)
    : curve_(std::move(curve)),
      energy_(std::move(energy)),
      half_k_(0.5 * static_cast<double>(feature_count)),
      prior_mean_(std::move(prior_mean)),
      prior_precision_(std::move(prior_precision)) {
    const auto p = static_cast<Eigen::Index>(curve_.parameter_count());
    if (prior_mean_.size() != p || prior_precision_.size() != p) {
        throw std::invalid_argument("ThetaLogPosterior: prior dimension does not match the curve");
    }
    if (static_cast<std::size_t>(energy_.size()) != curve_.size()) {
        throw std::invalid_argument("ThetaLogPosterior: energy length does not match the curve");
    }
}

double ThetaLogPosterior::value(const Vector& xi) const {
    const Vector theta = xi.array().exp();
    const Vector h = curve_.values(theta);
    if (!(h.array() > 0.0).all()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double prior = -0.5 * (prior_precision_.array() * (xi - prior_mean_).array().square()).sum();
    return half_k_ * h.array().log().sum() - 0.5 * h.dot(energy_) + prior;
}

Vector ThetaLogPosterior::gradient(const Vector& xi) const {
    const Vector theta = xi.array().exp();
    const gmrf::CurveEvaluation ev = curve_.evaluate(theta, 1);
    const Vector weight = half_k_ * ev.value.array().inverse() - 0.5 * energy_.array();
    const Vector d_theta = ev.gradient.transpose() * weight;
    return theta.cwiseProduct(d_theta) - prior_precision_.cwiseProduct(xi - prior_mean_);
}

Matrix ThetaLogPosterior::hessian(const Vector& xi) const {
    const Vector theta = xi.array().exp();
    const gmrf::CurveEvaluation ev = curve_.evaluate(theta, 2);
    const Eigen::Index p = theta.size();
    const Vector inv_h = ev.value.array().inverse();
    const Vector weight = half_k_ * inv_h.array() - 0.5 * energy_.array();
    const Vector d_theta = ev.gradient.transpose() * weight;

    // ∂²/∂θ_p∂θ_q = Σ_i [−(K/2) g_ip g_iq / h_i² + w_i ∂²h_i/∂θ_p∂θ_q]
    const Matrix scaled_grad = ev.gradient.array().colwise() * inv_h.array();
    Matrix d2_theta = -half_k_ * scaled_grad.transpose() * scaled_grad;
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
            d2_theta(a, b) += ev.hessian.col(a * p + b).dot(weight);
        }
    }
    Matrix out = d2_theta.array() * (theta * theta.transpose()).array();
    out.diagonal() += theta.cwiseProduct(d_theta);
    out.diagonal() -= prior_precision_;
    return out;
}

namespace {

// Backtracking line search along `direction` from xi; returns the accepted step.
bool backtrack(const ThetaLogPosterior& post, const Vector& xi, double f0, const Vector& grad,
               const Vector& direction, Vector& next, double& f_next) {
    const double slope = grad.dot(direction);
    double step = 1.0;
    for (int i = 0; i < 60; ++i) {
        next = xi + step * direction;
        f_next = post.value(next);
        if (std::isfinite(f_next) && f_next >= f0 + 1e-4 * step * slope) {
            return true;
        }
        step *= 0.5;
    }
    return false;
}

bool stationary(const Vector& grad, const Vector& xi) {
    return grad.lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + xi.lpNorm<Eigen::Infinity>());
}

}  // namespace

LaplaceFit fit_laplace(const ThetaLogPosterior& posterior, const Vector& start, int max_newton_iterations) {
    LaplaceFit fit;
    Vector xi = start;
    double f = posterior.value(xi);
    if (!std::isfinite(f)) {
        fit.mode = start;
        fit.method = "failed";
        return fit;
    }

    auto finish = [&](const char* method, int iterations) {
        fit.mode = xi;
        fit.precision = -posterior.hessian(xi);
        Eigen::LLT<Matrix> llt(fit.precision);
        fit.converged = llt.info() == Eigen::Success;
        fit.iterations = iterations;
        fit.method = fit.converged ? method : "failed";
        return fit;
    };

    for (int it = 0; it < max_newton_iterations; ++it) {
        const Vector grad = posterior.gradient(xi);
        if (stationary(grad, xi)) {
            return finish("newton", it);
        }
        const Matrix neg_hess = -posterior.hessian(xi);
        Eigen::LLT<Matrix> llt(neg_hess);
        Vector direction = llt.info() == Eigen::Success ? Vector(llt.solve(grad)) : grad;
        if (!direction.allFinite() || grad.dot(direction) <= 0.0) {
            direction = grad;
        }
        Vector next;
        double f_next = f;
        if (!backtrack(posterior, xi, f, grad, direction, next, f_next)) {
            break;
        }
        const bool tiny = (next - xi).lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + xi.lpNorm<Eigen::Infinity>());
        xi = next;
        f = f_next;
        if (tiny) {
            return finish("newton", it + 1);
        }
    }

    // Gradient ascent fallback.
    for (int it = 0; it < 5000; ++it) {
        const Vector grad = posterior.gradient(xi);
        if (stationary(grad, xi)) {
            return finish("gradient", max_newton_iterations + it);
        }
        Vector next;
        double f_next = f;
        if (!backtrack(posterior, xi, f, grad, grad, next, f_next)) {
            break;
        }
        xi = next;
        f = f_next;
    }
    fit.mode = xi;
    fit.method = "failed";
    fit.converged = false;
    return fit;
}

}  // namespace issfa::sampler
