#include "issfa/sampler/conditionals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace issfa::sampler {

NormalParams weight_posterior(double s_dot_r, double s_norm2, double sigma2, double nu, double tau) {
    const double precision = nu + s_norm2 / sigma2;
    return {(s_dot_r / sigma2 + nu * tau) / precision, 1.0 / precision};
}

InverseGammaParams noise_posterior(double sse, std::size_t count, const Hyperparams& hp) {
    return {0.5 * static_cast<double>(count) + hp.noise_shape, hp.noise_scale + 0.5 * sse};
}

GammaParams alpha_posterior(std::size_t k_plus, double harmonic_t, const Hyperparams& hp) {
    return {static_cast<double>(k_plus) + hp.alpha_shape, hp.alpha_rate + harmonic_t};
}

GammaParams nu_posterior(std::span<const double> active_weights, double tau, const Hyperparams& hp) {
    double ss = 0.0;
    for (double a : active_weights) {
        ss += (a - tau) * (a - tau);
    }
    return {hp.nu_shape + 0.5 * static_cast<double>(active_weights.size()), hp.nu_rate + 0.5 * ss};
}

NormalParams tau_posterior(std::span<const double> active_weights, double nu, const Hyperparams& hp) {
    double sum = 0.0;
    for (double a : active_weights) {
        sum += a;
    }
    const double precision = nu * static_cast<double>(active_weights.size()) + hp.tau_precision;
    return {(nu * sum + hp.tau_precision * hp.tau_mean) / precision, 1.0 / precision};
}

double activation_log_likelihood_ratio(double s_dot_r0, double s_norm2, double tau, double nu, double sigma2) {
    // r₁ = r₀ − τs; r₀ᵀr₀ − r₁ᵀr₁ = 2τ sᵀr₀ − τ²‖s‖², sᵀr₁ = sᵀr₀ − τ‖s‖².
    const double s_dot_r1 = s_dot_r0 - tau * s_norm2;
    const double r0_minus_r1 = 2.0 * tau * s_dot_r0 - tau * tau * s_norm2;
    return -0.5 * std::log1p(s_norm2 / (sigma2 * nu)) + 0.5 * r0_minus_r1 / sigma2 +
           0.5 * s_dot_r1 * s_dot_r1 / (sigma2 * nu * (sigma2 + s_norm2 / nu));
}

double activation_log_odds(double s_dot_r0, double s_norm2, double tau, double nu, double sigma2,
                           std::size_t m_minus_t, double beta, std::size_t rows) {
    if (m_minus_t == 0) {
        throw std::logic_error("activation_log_odds: feature is not shared with respect to this observation");
    }
    return activation_log_likelihood_ratio(s_dot_r0, s_norm2, tau, nu, sigma2) +
           std::log(ibp::shared_prior_odds(m_minus_t, beta, rows));
}

double unique_marginal_log_density(const Vector& coeffs, double weight_sq_sum, double sigma2, const Vector& h) {
    const Eigen::ArrayXd variance = sigma2 + weight_sq_sum / h.array();
    const double v = static_cast<double>(coeffs.size());
    return -0.5 * v * std::log(2.0 * std::numbers::pi) - 0.5 * variance.log().sum() -
           0.5 * (coeffs.array().square() / variance).sum();
}

UniqueFeaturePosterior::UniqueFeaturePosterior(Vector weights, double sigma2)
    : a_(std::move(weights)), sigma2_(sigma2), norm2_(a_.squaredNorm()) {}

Matrix UniqueFeaturePosterior::mean(const Vector& coeffs, const Vector& h) const {
    Matrix out(a_.size(), coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        out.col(i) = a_ * (coeffs[i] / (sigma2_ * h[i] + norm2_));
    }
    return out;
}

Vector UniqueFeaturePosterior::covariance_sqrt_apply(double h_i, const Vector& z) const {
    if (norm2_ == 0.0) {
        return z / std::sqrt(h_i);
    }
    const Vector direction = a_ / std::sqrt(norm2_);
    const double along = direction.dot(z);
    const double lambda = h_i + norm2_ / sigma2_;
    return (z - along * direction) / std::sqrt(h_i) + direction * (along / std::sqrt(lambda));
}

Matrix UniqueFeaturePosterior::draw(const Vector& coeffs, const Vector& h, Rng& rng) const {
    Matrix out = mean(coeffs, h);
    Vector z(a_.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            z[j] = rng.normal();
        }
        out.col(i) += covariance_sqrt_apply(h[i], z);
    }
    return out;
}

double beta_log_likelihood_ratio(const ibp::BinaryFeatureMatrix& z, double alpha, double beta, double beta_star) {
    const auto t = static_cast<double>(z.rows());
    double gamma_terms = 0.0;
    double k_plus = 0.0;
    for (std::size_t k = 0; k < z.cols(); ++k) {
        const auto m = static_cast<double>(z.count(k));
        if (m == 0.0) {
            continue;
        }
        k_plus += 1.0;
        gamma_terms += std::lgamma(t - m + beta_star) - std::lgamma(t - m + beta);
    }
    return k_plus * (std::log(beta_star) - std::log(beta)) + gamma_terms +
           k_plus * (std::lgamma(t + beta) - std::lgamma(t + beta_star)) +
           alpha * (ibp::harmonic(beta, z.rows()) - ibp::harmonic(beta_star, z.rows()));
}

double beta_log_acceptance(double log_likelihood_ratio, double beta, double beta_star, const Hyperparams& hp) {
    return log_likelihood_ratio + hp.beta_shape * (std::log(beta_star) - std::log(beta)) +
           hp.beta_rate * (beta - beta_star);
}

}  // namespace issfa::sampler
