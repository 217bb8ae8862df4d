#pragma once

#include <cstddef>
#include <vector>

#include "issfa/ibp/ibp.hpp"
#include "issfa/types.hpp"

namespace issfa::sampler {

/**
 * Every latent variable of the model, stored per feature column.
 *
 * weights[k] is column k of A (length T). Its entries are meaningful only
 * where z(t, k) = 1; inactive entries are kept at zero and never read.
 * features[k] is row k of S (length V).
 */
struct ModelState {
    ibp::BinaryFeatureMatrix z;
    std::vector<Vector> weights;
    std::vector<Vector> features;
    std::vector<double> nu;
    std::vector<double> tau;
    double sigma2 = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    Vector xi;  // ln θ

    [[nodiscard]] std::size_t feature_count() const { return z.cols(); }
    [[nodiscard]] std::size_t observations() const { return z.rows(); }
    [[nodiscard]] Vector theta() const { return xi.array().exp(); }

    /// Appends an inactive column with the given feature row and returns its index.
    std::size_t append_feature(Vector feature, double nu_k, double tau_k);
    void remove_feature(std::size_t k);
    /// Drops zero columns from every per-feature field; returns the count removed.
    std::size_t prune();

    /// T×K matrix A∘Z.
    [[nodiscard]] RowMatrix weight_matrix() const;
    /// K×V matrix S.
    [[nodiscard]] RowMatrix feature_matrix() const;
    /// (A∘Z)S, computed over the support of Z.
    [[nodiscard]] RowMatrix reconstruction(std::size_t dimension) const;

    /// Throws std::logic_error when per-feature fields disagree in length or
    /// a scalar leaves its support.
    void check_invariants() const;

    [[nodiscard]] bool operator==(const ModelState& other) const;
};

/// Y − (A∘Z)S, maintained incrementally by the sampler.
class ResidualCache {
public:
    ResidualCache() = default;
    ResidualCache(const RowMatrix& y, const ModelState& state) { refresh(y, state); }

    void refresh(const RowMatrix& y, const ModelState& state);

    [[nodiscard]] RowMatrix& values() { return r_; }
    [[nodiscard]] const RowMatrix& values() const { return r_; }
    [[nodiscard]] double sse() const { return r_.squaredNorm(); }

    /// max |R − (Y − (A∘Z)S)| against a fresh recomputation.
    [[nodiscard]] double drift(const RowMatrix& y, const ModelState& state) const;

private:
    RowMatrix r_;
};

}  // namespace issfa::sampler
