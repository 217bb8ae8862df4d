#include "issfa/sampler/initialise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "issfa/gmrf/spectral_precision.hpp"
#include "issfa/ibp/ibp.hpp"

namespace issfa::sampler {

InitMethod parse_init_method(const std::string& name) {
    if (name == "kmeans") {
        return InitMethod::kKMeans;
    }
    if (name == "prior") {
        return InitMethod::kPrior;
    }
    throw std::invalid_argument("unknown initialisation method '" + name + "' (expected kmeans or prior)");
}

std::string to_string(InitMethod method) { return method == InitMethod::kKMeans ? "kmeans" : "prior"; }

namespace {

// k-means++ seeding followed by Lloyd iterations; returns K×V centroids.
RowMatrix kmeans(const RowMatrix& y, std::size_t clusters, std::size_t iterations, Rng& rng) {
    const Eigen::Index t = y.rows();
    const auto k = static_cast<Eigen::Index>(std::min<std::size_t>(clusters, static_cast<std::size_t>(t)));
    RowMatrix centroids(k, y.cols());
    Vector nearest = Vector::Constant(t, std::numeric_limits<double>::infinity());

    auto first = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(t));
    centroids.row(0) = y.row(std::min(first, t - 1));
    for (Eigen::Index c = 1; c < k; ++c) {
        for (Eigen::Index i = 0; i < t; ++i) {
            nearest[i] = std::min(nearest[i], (y.row(i) - centroids.row(c - 1)).squaredNorm());
        }
        const double total = nearest.sum();
        double target = rng.uniform() * total;
        Eigen::Index pick = t - 1;
        for (Eigen::Index i = 0; i < t; ++i) {
            target -= nearest[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        centroids.row(c) = y.row(pick);
    }

    std::vector<Eigen::Index> label(static_cast<std::size_t>(t), -1);
    for (std::size_t it = 0; it < iterations; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < t; ++i) {
            Eigen::Index best = 0;
            (centroids.rowwise() - y.row(i)).rowwise().squaredNorm().minCoeff(&best);
            if (label[static_cast<std::size_t>(i)] != best) {
                label[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        RowMatrix sums = RowMatrix::Zero(k, y.cols());
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < t; ++i) {
            sums.row(label[static_cast<std::size_t>(i)]) += y.row(i);
            ++counts[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])];
        }
        for (Eigen::Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            }
        }
        if (!changed) {
            break;
        }
    }
    return centroids;
}

}  // namespace

ModelState initialise(const RowMatrix& y, const gmrf::OrthoTransform& transform, const gmrf::SpectralCurve& curve,
                      const Hyperparams& hp, const InitOptions& options, Rng& rng) {
    if (static_cast<std::size_t>(y.cols()) != transform.size()) {
        throw std::invalid_argument("initialise: data and transform disagree on V");
    }
    if (options.method == InitMethod::kPrior) {
        return sample_prior_state(static_cast<std::size_t>(y.rows()), transform, curve, hp, rng);
    }
    if (options.clusters == 0) {
        throw std::invalid_argument("initialise: clusters must be at least 1");
    }

    const RowMatrix centroids = kmeans(y, options.clusters, options.kmeans_iterations, rng);
    const auto rows = static_cast<std::size_t>(y.rows());
    ModelState state;
    state.z = ibp::BinaryFeatureMatrix(rows);
    state.xi = hp.xi_mean;
    state.alpha = 1.0;
    state.beta = 1.0;
    const Vector row_norm = y.rowwise().norm();
    const double nu0 = hp.nu_shape / hp.nu_rate;

    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
        const Vector s = centroids.row(c).transpose();
        const double s_norm = s.norm();
        if (!(s_norm > 0.0)) {
            continue;
        }
        const Vector proj = y * s;
        std::vector<std::size_t> active;
        for (std::size_t t = 0; t < rows; ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            if (row_norm[ti] > 0.0 && proj[ti] / (row_norm[ti] * s_norm) > options.corr_threshold) {
                active.push_back(t);
            }
        }
        if (active.empty()) {
            continue;
        }
        double mean_weight = 0.0;
        for (std::size_t t : active) {
            mean_weight += proj[static_cast<Eigen::Index>(t)] / (s_norm * s_norm);
        }
        mean_weight /= static_cast<double>(active.size());
        const std::size_t k = state.append_feature(s, nu0, mean_weight);
        for (std::size_t t : active) {
            state.z.set(t, k, true);
            state.weights[k][static_cast<Eigen::Index>(t)] = proj[static_cast<Eigen::Index>(t)] / (s_norm * s_norm);
        }
    }

    const RowMatrix residual = y - state.reconstruction(transform.size());
    state.sigma2 = std::max(residual.squaredNorm() / static_cast<double>(y.size()), 1e-6);
    (void)curve;
    return state;
}

ModelState sample_prior_state(std::size_t rows, const gmrf::OrthoTransform& transform,
                              const gmrf::SpectralCurve& curve, const Hyperparams& hp, Rng& rng) {
    ModelState state;
    const auto p = static_cast<Eigen::Index>(curve.parameter_count());
    state.xi = Vector(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        state.xi[i] = rng.normal(hp.xi_mean[i], 1.0 / std::sqrt(hp.xi_precision[i]));
    }
    state.alpha = rng.gamma(hp.alpha_shape, hp.alpha_rate);
    state.beta = rng.gamma(hp.beta_shape, hp.beta_rate);
    state.sigma2 = rng.inverse_gamma(hp.noise_shape, hp.noise_scale);
    state.z = ibp::sample_ibp(state.alpha, state.beta, rows, rng);

    // sample_ibp fills Z; the per-column fields are appended alongside it.
    const ibp::BinaryFeatureMatrix z = state.z;
    state.z = ibp::BinaryFeatureMatrix(rows);
    const gmrf::SpectralPrecision prec(std::make_shared<const gmrf::OrthoTransform>(transform), curve, state.theta());
    for (std::size_t k = 0; k < z.cols(); ++k) {
        const double nu = rng.gamma(hp.nu_shape, hp.nu_rate);
        const double tau = rng.normal(hp.tau_mean, 1.0 / std::sqrt(hp.tau_precision));
        const std::size_t col = state.append_feature(prec.sample(rng), nu, tau);
        for (std::size_t t = 0; t < rows; ++t) {
            if (z(t, k)) {
                state.z.set(t, col, true);
                state.weights[col][static_cast<Eigen::Index>(t)] = rng.normal(tau, 1.0 / std::sqrt(nu));
            }
        }
    }
    return state;
}

RowMatrix sample_data(const ModelState& state, std::size_t dimension, Rng& rng) {
    RowMatrix y = state.reconstruction(dimension);
    const double sd = std::sqrt(state.sigma2);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
            y(i, j) += sd * rng.normal();
        }
    }
    return y;
}

}  // namespace issfa::sampler
