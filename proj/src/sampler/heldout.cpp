#include "issfa/sampler/heldout.hpp"

#include <cmath>
#include <stdexcept>

#include "issfa/sampler/conditionals.hpp"

namespace issfa::sampler {

HeldoutResult heldout_infer(const RowMatrix& y_holdout, const ModelState& state, std::size_t inner_sweeps,
                            const Rng& rng) {
    const std::size_t k_plus = state.feature_count();
    const auto th = static_cast<std::size_t>(y_holdout.rows());
    if (k_plus > 0 && y_holdout.cols() != state.features.front().size()) {
        throw std::invalid_argument("heldout_infer: holdout data and features disagree on V");
    }
    const std::size_t train_rows = state.observations();

    HeldoutResult out{ibp::BinaryFeatureMatrix(th), RowMatrix::Zero(y_holdout.rows(), static_cast<Eigen::Index>(k_plus)),
                      RowMatrix::Zero(y_holdout.rows(), y_holdout.cols())};
    for (std::size_t k = 0; k < k_plus; ++k) {
        out.z.add_column();
    }

    std::vector<double> norm2(k_plus);
    std::vector<double> log_prior_odds(k_plus);
    for (std::size_t k = 0; k < k_plus; ++k) {
        norm2[k] = state.features[k].squaredNorm();
        log_prior_odds[k] = std::log(ibp::shared_prior_odds(state.z.count(k), state.beta, train_rows + 1));
    }

    for (std::size_t t = 0; t < th; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        Rng row_rng = rng.substream(static_cast<std::uint64_t>(t));
        Vector r = y_holdout.row(ti).transpose();  // residual of row t
        for (std::size_t sweep = 0; sweep < inner_sweeps; ++sweep) {
            for (std::size_t k = 0; k < k_plus; ++k) {
                const Vector& s = state.features[k];
                const double a_old = out.weights(ti, static_cast<Eigen::Index>(k));
                const double s_dot_r0 = s.dot(r) + a_old * norm2[k];
                const double log_odds =
                    activation_log_likelihood_ratio(s_dot_r0, norm2[k], state.tau[k], state.nu[k], state.sigma2) +
                    log_prior_odds[k];
                const double p = log_odds >= 0.0 ? 1.0 / (1.0 + std::exp(-log_odds))
                                                 : std::exp(log_odds) / (1.0 + std::exp(log_odds));
                const bool active = row_rng.uniform() <= p && p > 0.0;
                double a_new = 0.0;
                if (active) {
                    const NormalParams post =
                        weight_posterior(s_dot_r0, norm2[k], state.sigma2, state.nu[k], state.tau[k]);
                    a_new = row_rng.normal(post.mean, std::sqrt(post.variance));
                }
                if (a_new != a_old) {
                    r += (a_old - a_new) * s;
                }
                out.z.set(t, k, active);
                out.weights(ti, static_cast<Eigen::Index>(k)) = a_new;
            }
        }
        out.reconstruction.row(ti) = y_holdout.row(ti) - r.transpose();
    }
    return out;
}

}  // namespace issfa::sampler
