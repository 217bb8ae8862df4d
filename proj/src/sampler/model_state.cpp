#include "issfa/sampler/model_state.hpp"

#include <stdexcept>

namespace issfa::sampler {

std::size_t ModelState::append_feature(Vector feature, double nu_k, double tau_k) {
    const std::size_t k = z.add_column();
    weights.push_back(Vector::Zero(static_cast<Eigen::Index>(z.rows())));
    features.push_back(std::move(feature));
    nu.push_back(nu_k);
    tau.push_back(tau_k);
    return k;
}

void ModelState::remove_feature(std::size_t k) {
    const auto offset = static_cast<std::ptrdiff_t>(k);
    z.remove_column(k);
    weights.erase(weights.begin() + offset);
    features.erase(features.begin() + offset);
    nu.erase(nu.begin() + offset);
    tau.erase(tau.begin() + offset);
}

std::size_t ModelState::prune() {
    std::size_t removed = 0;
    for (std::size_t k = feature_count(); k-- > 0;) {
        if (z.count(k) == 0) {
            remove_feature(k);
            ++removed;
        }
    }
    return removed;
}

RowMatrix ModelState::weight_matrix() const {
    const auto t = static_cast<Eigen::Index>(observations());
    const auto k = static_cast<Eigen::Index>(feature_count());
    RowMatrix w = RowMatrix::Zero(t, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < t; ++i) {
            if (z(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
                w(i, j) = weights[static_cast<std::size_t>(j)][i];
            }
        }
    }
    return w;
}

RowMatrix ModelState::feature_matrix() const {
    if (features.empty()) {
        return RowMatrix(0, 0);
    }
    RowMatrix s(static_cast<Eigen::Index>(features.size()), features.front().size());
    for (std::size_t k = 0; k < features.size(); ++k) {
        s.row(static_cast<Eigen::Index>(k)) = features[k].transpose();
    }
    return s;
}

RowMatrix ModelState::reconstruction(std::size_t dimension) const {
    RowMatrix x = RowMatrix::Zero(static_cast<Eigen::Index>(observations()), static_cast<Eigen::Index>(dimension));
    for (std::size_t k = 0; k < feature_count(); ++k) {
        for (std::size_t t = 0; t < observations(); ++t) {
            if (z(t, k)) {
                x.row(static_cast<Eigen::Index>(t)) +=
                    weights[k][static_cast<Eigen::Index>(t)] * features[k].transpose();
            }
        }
    }
    return x;
}

void ModelState::check_invariants() const {
    z.check_invariants();
    const std::size_t k = feature_count();
    if (weights.size() != k || features.size() != k || nu.size() != k || tau.size() != k) {
        throw std::logic_error("ModelState: per-feature fields disagree on K+");
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (static_cast<std::size_t>(weights[j].size()) != observations()) {
            throw std::logic_error("ModelState: weight column has wrong length");
        }
        if (j > 0 && features[j].size() != features[0].size()) {
            throw std::logic_error("ModelState: feature rows disagree on V");
        }
        if (!(nu[j] > 0.0)) {
            throw std::logic_error("ModelState: nonpositive weight precision");
        }
    }
    if (!(sigma2 > 0.0) || !(alpha > 0.0) || !(beta > 0.0)) {
        throw std::logic_error("ModelState: sigma2, alpha and beta must be positive");
    }
    if (!xi.allFinite()) {
        throw std::logic_error("ModelState: non-finite xi");
    }
}

bool ModelState::operator==(const ModelState& other) const {
    if (!(z == other.z) || nu != other.nu || tau != other.tau || sigma2 != other.sigma2 || alpha != other.alpha ||
        beta != other.beta || xi.size() != other.xi.size() || xi != other.xi ||
        weights.size() != other.weights.size() || features.size() != other.features.size()) {
        return false;
    }
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] != other.weights[k] || features[k].size() != other.features[k].size() ||
            features[k] != other.features[k]) {
            return false;
        }
    }
    return true;
}

void ResidualCache::refresh(const RowMatrix& y, const ModelState& state) {
    r_ = y - state.reconstruction(static_cast<std::size_t>(y.cols()));
}

double ResidualCache::drift(const RowMatrix& y, const ModelState& state) const {
    const RowMatrix fresh = y - state.reconstruction(static_cast<std::size_t>(y.cols()));
    return (fresh - r_).cwiseAbs().maxCoeff();
}

}  // namespace issfa::sampler
