#include "issfa/sampler/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "issfa/ibp/ibp.hpp"
#include "issfa/sampler/conditionals.hpp"
#include "issfa/sampler/theta_posterior.hpp"

namespace issfa::sampler {

namespace {

// Child-stream keys per phase; the low 32 bits carry the observation/column.
constexpr std::uint64_t kPhaseFeatures = 1;
constexpr std::uint64_t kPhaseActivations = 2;
constexpr std::uint64_t kPhaseUnique = 3;
constexpr std::uint64_t kPhaseGlobal = 4;
constexpr std::size_t kOrderStream = 0xffffffffu;

Rng child(const Rng& parent, std::uint64_t phase, std::size_t index) {
    return parent.substream((phase << 32) ^ static_cast<std::uint64_t>(index));
}

// Features are visited in a fresh random order. The unique-feature block
// appends new columns at the end, so column position carries information
// about the activation pattern; a fixed positional scan would make the update
// order depend on the state and break invariance.
std::vector<std::size_t> scan_order(std::size_t count, Rng& rng) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    return order;
}

bool draw_from_log_odds(double log_odds, Rng& rng) {
    // P(1) = 1/(1 + e^{−ℓ}), evaluated without overflow on either tail.
    const double p = log_odds >= 0.0 ? 1.0 / (1.0 + std::exp(-log_odds))
                                     : std::exp(log_odds) / (1.0 + std::exp(log_odds));
    return rng.uniform() <= p && p > 0.0;
}

}  // namespace

GibbsSampler::GibbsSampler(RowMatrix y, std::shared_ptr<const gmrf::OrthoTransform> transform,
                           gmrf::SpectralCurve curve, Hyperparams hp, SamplerOptions options, ModelState initial,
                           std::uint64_t seed)
    : y_(std::move(y)),
      transform_(std::move(transform)),
      curve_(std::move(curve)),
      hp_(std::move(hp)),
      options_(std::move(options)),
      state_(std::move(initial)),
      seed_(seed) {
    if (!transform_) {
        throw std::invalid_argument("GibbsSampler: null transform");
    }
    if (static_cast<std::size_t>(y_.cols()) != transform_->size() || curve_.size() != transform_->size()) {
        throw std::invalid_argument("GibbsSampler: data, transform and curve disagree on V");
    }
    if (static_cast<std::size_t>(y_.rows()) != state_.observations()) {
        throw std::invalid_argument("GibbsSampler: data and state disagree on T");
    }
    if (options_.residual_refresh == 0) {
        throw std::invalid_argument("GibbsSampler: residual_refresh must be positive");
    }
    hp_.validate(curve_.parameter_count());
    state_.check_invariants();
    if (static_cast<std::size_t>(state_.xi.size()) != curve_.parameter_count()) {
        throw std::invalid_argument("GibbsSampler: xi has the wrong dimension for the curve");
    }
    refresh_precision();
    residuals_.refresh(y_, state_);
}

void GibbsSampler::refresh_precision() { precision_.emplace(transform_, curve_, state_.theta()); }

void GibbsSampler::warn(const std::string& message) const {
    if (options_.warn) {
        options_.warn(message);
    } else {
        std::cerr << "issfa: warning: " << message << '\n';
    }
}

void GibbsSampler::set_data(RowMatrix y) {
    if (y.rows() != y_.rows() || y.cols() != y_.cols()) {
        throw std::invalid_argument("GibbsSampler::set_data: shape mismatch");
    }
    y_ = std::move(y);
    residuals_.refresh(y_, state_);
}

void GibbsSampler::set_state(ModelState state) {
    state.check_invariants();
    if (state.observations() != static_cast<std::size_t>(y_.rows())) {
        throw std::invalid_argument("GibbsSampler::set_state: wrong number of observations");
    }
    state_ = std::move(state);
    refresh_precision();
    residuals_.refresh(y_, state_);
}

std::vector<std::size_t> GibbsSampler::unique_features_of(std::size_t t) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < state_.feature_count(); ++k) {
        if (state_.z.count(k) == 1 && state_.z(t, k)) {
            out.push_back(k);
        }
    }
    return out;
}

void GibbsSampler::update_feature_row(std::size_t k, Rng& rng) {
    const Vector& weights = state_.weights[k];
    RowMatrix& r = residuals_.values();
    Vector& s = state_.features[k];
    double c = 0.0;
    Vector rhs = Vector::Zero(s.size());
    for (std::size_t t = 0; t < state_.observations(); ++t) {
        if (!state_.z(t, k)) {
            continue;
        }
        const double a = weights[static_cast<Eigen::Index>(t)];
        c += a * a;
        rhs += a * (r.row(static_cast<Eigen::Index>(t)).transpose() + a * s);
    }
    c /= state_.sigma2;
    rhs /= state_.sigma2;
    const Vector fresh = precision_->sample_shifted(c, rhs, rng);
    const Vector delta = fresh - s;
    for (std::size_t t = 0; t < state_.observations(); ++t) {
        if (state_.z(t, k)) {
            r.row(static_cast<Eigen::Index>(t)) -= weights[static_cast<Eigen::Index>(t)] * delta.transpose();
        }
    }
    s = fresh;
}

void GibbsSampler::update_activations(std::size_t t, Rng& rng) {
    const auto ti = static_cast<Eigen::Index>(t);
    auto r = residuals_.values().row(ti);
    const std::size_t rows = state_.observations();
    for (std::size_t k : scan_order(state_.feature_count(), rng)) {
        const Vector& s = state_.features[k];
        const bool active = state_.z(t, k);
        const double a_old = active ? state_.weights[k][ti] : 0.0;
        const double norm2 = s.squaredNorm();
        const double s_dot_r0 = r.dot(s.transpose()) + a_old * norm2;
        const std::size_t m_minus = state_.z.count(k) - (active ? 1 : 0);

        bool now_active = active;
        if (m_minus > 0) {
            const double log_odds = activation_log_odds(s_dot_r0, norm2, state_.tau[k], state_.nu[k],
                                                        state_.sigma2, m_minus, state_.beta, rows);
            now_active = draw_from_log_odds(log_odds, rng);
            if (now_active != active) {
                ++diagnostics_.activations_flipped;
            }
        }
        double a_new = 0.0;
        if (now_active) {
            const NormalParams post = weight_posterior(s_dot_r0, norm2, state_.sigma2, state_.nu[k], state_.tau[k]);
            a_new = rng.normal(post.mean, std::sqrt(post.variance));
        }
        if (a_new != a_old) {
            r += (a_old - a_new) * s.transpose();
        }
        state_.z.set(t, k, now_active);
        state_.weights[k][ti] = a_new;
    }
}

bool GibbsSampler::update_unique_features(std::size_t t, Rng& rng) {
    const auto ti = static_cast<Eigen::Index>(t);
    const std::size_t rows = state_.observations();
    const Vector& h = precision_->eigenvalues();
    std::vector<std::size_t> owned = unique_features_of(t);

    // d = Y_t − μ where μ excludes the unique features of t.
    Vector d = residuals_.values().row(ti).transpose();
    double w_current = 0.0;
    for (std::size_t k : owned) {
        const double a = state_.weights[k][ti];
        d += a * state_.features[k];
        w_current += a * a;
    }
    const Vector coeffs = transform_->forward(d);

    // Proposal from the priors.
    const double poisson_mean = state_.alpha * state_.beta / (state_.beta + static_cast<double>(rows) - 1.0);
    int n_star = rng.poisson(poisson_mean);
    if (n_star > hp_.max_new_features) {
        n_star = hp_.max_new_features;
        ++diagnostics_.clamped_proposals;
    }
    std::vector<double> tau_star(static_cast<std::size_t>(n_star));
    std::vector<double> nu_star(static_cast<std::size_t>(n_star));
    Vector a_star(n_star);
    for (int j = 0; j < n_star; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        tau_star[ju] = rng.normal(hp_.tau_mean, 1.0 / std::sqrt(hp_.tau_precision));
        nu_star[ju] = rng.gamma(hp_.nu_shape, hp_.nu_rate);
        a_star[j] = rng.normal(tau_star[ju], 1.0 / std::sqrt(nu_star[ju]));
    }
    ++diagnostics_.unique_proposals;

    const double log_psi = unique_marginal_log_density(coeffs, a_star.squaredNorm(), state_.sigma2, h) -
                           unique_marginal_log_density(coeffs, w_current, state_.sigma2, h);
    const bool accept = std::log(rng.uniform()) < log_psi;

    if (accept) {
        ++diagnostics_.unique_accepts;
        std::sort(owned.rbegin(), owned.rend());
        for (std::size_t k : owned) {
            state_.remove_feature(k);
        }
        owned.clear();
        for (int j = 0; j < n_star; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const std::size_t k = state_.append_feature(Vector::Zero(d.size()), nu_star[ju], tau_star[ju]);
            state_.z.set(t, k, true);
            state_.weights[k][ti] = a_star[j];
            owned.push_back(k);
        }
    }

    // Feature vectors of the (possibly new) unique block, drawn jointly.
    auto r = residuals_.values().row(ti);
    r = d.transpose();
    if (!owned.empty()) {
        Vector a(static_cast<Eigen::Index>(owned.size()));
        for (std::size_t j = 0; j < owned.size(); ++j) {
            a[static_cast<Eigen::Index>(j)] = state_.weights[owned[j]][ti];
        }
        const Matrix draws = UniqueFeaturePosterior(a, state_.sigma2).draw(coeffs, h, rng);
        for (std::size_t j = 0; j < owned.size(); ++j) {
            Vector& s = state_.features[owned[j]];
            s = transform_->inverse(Vector(draws.row(static_cast<Eigen::Index>(j)).transpose()));
            r -= a[static_cast<Eigen::Index>(j)] * s.transpose();
        }
    }
    return accept;
}

void GibbsSampler::update_noise(Rng& rng) {
    const InverseGammaParams post =
        noise_posterior(residuals_.sse(), static_cast<std::size_t>(y_.size()), hp_);
    state_.sigma2 = rng.inverse_gamma(post.shape, post.scale);
}

void GibbsSampler::update_theta(Rng& rng) {
    const auto p = static_cast<Eigen::Index>(curve_.parameter_count());
    if (p == 0) {
        return;
    }
    diagnostics_.theta_accepted = false;
    diagnostics_.theta_fit_failed = false;
    if (state_.feature_count() == 0) {
        // ξ | S is the prior when there are no features.
        for (Eigen::Index i = 0; i < p; ++i) {
            state_.xi[i] = rng.normal(hp_.xi_mean[i], 1.0 / std::sqrt(hp_.xi_precision[i]));
        }
        diagnostics_.theta_accepted = true;
        refresh_precision();
        return;
    }

    const ThetaLogPosterior posterior(curve_, spectral_energy(state_.features, *transform_), state_.feature_count(),
                                      hp_.xi_mean, hp_.xi_precision);
    const LaplaceFit fit = fit_laplace(posterior, state_.xi);
    if (!fit.converged) {
        diagnostics_.theta_fit_failed = true;
        warn("theta update: MAP search failed at sweep " + std::to_string(iteration_) + "; keeping current xi");
        return;
    }
    const Eigen::LLT<Matrix> llt(fit.precision);
    Vector z(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        z[i] = rng.normal();
    }
    // ξ* ~ N(ξ̂, H⁻¹) with H = LLᵀ: ξ* = ξ̂ + L⁻ᵀz.
    const Vector proposal = fit.mode + Vector(llt.matrixU().solve(z));

    bool accept = true;
    if (hp_.theta_mh) {
        auto log_q = [&](const Vector& x) {
            const Vector dx = x - fit.mode;
            return -0.5 * dx.dot(fit.precision * dx);
        };
        const double log_ratio = posterior.value(proposal) - posterior.value(state_.xi) + log_q(state_.xi) -
                                 log_q(proposal);
        accept = std::log(rng.uniform()) < log_ratio;
    }
    if (accept) {
        state_.xi = proposal;
        diagnostics_.theta_accepted = true;
        refresh_precision();
    }
}

void GibbsSampler::update_alpha(Rng& rng) {
    const GammaParams post =
        alpha_posterior(state_.feature_count(), ibp::harmonic(state_.beta, state_.observations()), hp_);
    state_.alpha = rng.gamma(post.shape, post.rate);
}

void GibbsSampler::update_beta(Rng& rng) {
    const double beta_star = std::exp(std::log(state_.beta) + hp_.beta_step * rng.normal());
    const double log_a = beta_log_acceptance(beta_log_likelihood_ratio(state_.z, state_.alpha, state_.beta, beta_star),
                                             state_.beta, beta_star, hp_);
    diagnostics_.beta_accepted = std::log(rng.uniform()) < log_a;
    if (diagnostics_.beta_accepted) {
        state_.beta = beta_star;
    }
}

namespace {

std::vector<double> active_weights(const ModelState& state, std::size_t k) {
    std::vector<double> out;
    out.reserve(state.z.count(k));
    for (std::size_t t = 0; t < state.observations(); ++t) {
        if (state.z(t, k)) {
            out.push_back(state.weights[k][static_cast<Eigen::Index>(t)]);
        }
    }
    return out;
}

}  // namespace

void GibbsSampler::update_weight_precisions(Rng& rng) {
    for (std::size_t k = 0; k < state_.feature_count(); ++k) {
        const std::vector<double> a = active_weights(state_, k);
        const GammaParams post = nu_posterior(a, state_.tau[k], hp_);
        state_.nu[k] = rng.gamma(post.shape, post.rate);
    }
}

void GibbsSampler::update_weight_means(Rng& rng) {
    for (std::size_t k = 0; k < state_.feature_count(); ++k) {
        const std::vector<double> a = active_weights(state_, k);
        const NormalParams post = tau_posterior(a, state_.nu[k], hp_);
        state_.tau[k] = rng.normal(post.mean, std::sqrt(post.variance));
    }
}

const SweepDiagnostics& GibbsSampler::sweep() {
    diagnostics_ = SweepDiagnostics{};
    const Rng sweep_rng = Rng(seed_).substream(static_cast<std::uint64_t>(iteration_));

    if (options_.update_features) {
        Rng order_rng = child(sweep_rng, kPhaseFeatures, kOrderStream);
        for (std::size_t k : scan_order(state_.feature_count(), order_rng)) {
            Rng rng = child(sweep_rng, kPhaseFeatures, k);
            update_feature_row(k, rng);
        }
    }
    if (options_.update_activations) {
        for (std::size_t t = 0; t < state_.observations(); ++t) {
            Rng rng = child(sweep_rng, kPhaseActivations, t);
            update_activations(t, rng);
        }
    }
    if (options_.update_unique) {
        for (std::size_t t = 0; t < state_.observations(); ++t) {
            Rng rng = child(sweep_rng, kPhaseUnique, t);
            update_unique_features(t, rng);
        }
    }
    // Columns emptied by the unique block are gone already; anything else
    // empty is dropped before the column-wise hyperparameter updates.
    diagnostics_.pruned = state_.prune();

    Rng rng = child(sweep_rng, kPhaseGlobal, 0);
    if (options_.update_noise) {
        update_noise(rng);
    }
    if (options_.update_theta) {
        update_theta(rng);
    }
    if (options_.update_alpha) {
        update_alpha(rng);
    }
    if (options_.update_beta) {
        update_beta(rng);
    }
    if (options_.update_nu) {
        update_weight_precisions(rng);
    }
    if (options_.update_tau) {
        update_weight_means(rng);
    }

    ++iteration_;
    if (iteration_ % options_.residual_refresh == 0) {
        diagnostics_.residual_drift = residuals_.drift(y_, state_);
        residuals_.refresh(y_, state_);
    }
    return diagnostics_;
}

}  // namespace issfa::sampler
