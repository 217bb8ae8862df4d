#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "issfa/types.hpp"

namespace issfa::bench {

/**
 * E_r(A, B) = Σ_k min_j ‖a_k − b_j‖² over the rows of A and B after each row
 * is scaled to unit norm and each candidate b_j is sign-flipped to maximise
 * its cosine with a_k; equivalently Σ_k min_j (2 − 2|cos(a_k, b_j)|).
 * Zero rows are compared as-is (distance 1 to a unit row).
 */
[[nodiscard]] double metric_er(const RowMatrix& a, const RowMatrix& b);

/// m₄/m₂² − 3 with biased sample moments. Throws std::invalid_argument for
/// fewer than four values or zero variance.
[[nodiscard]] double excess_kurtosis(std::span<const double> values);

struct FeatureMatch {
    std::size_t truth;
    std::size_t estimate;
    double similarity;  // |cos|
};

/// Greedy assignment: repeatedly takes the unused (truth, estimate) pair with
/// the largest |cosine|. Returns min(K_true, K_est) pairs, in the order chosen.
[[nodiscard]] std::vector<FeatureMatch> match_features(const RowMatrix& truth, const RowMatrix& estimate);

/// Running elementwise mean of per-sample reconstructions (A∘Z)S.
class ReconstructionAverage {
public:
    void add(const RowMatrix& reconstruction);
    [[nodiscard]] std::size_t count() const { return count_; }
    /// Throws std::logic_error when no sample has been added.
    [[nodiscard]] RowMatrix mean() const;

private:
    RowMatrix sum_;
    std::size_t count_ = 0;
};

/// Mean of a nonempty sample set; throws std::invalid_argument when empty.
[[nodiscard]] RowMatrix posterior_mean_reconstruction(const std::vector<RowMatrix>& samples);

}  // namespace issfa::bench
