#pragma once

#include <cstddef>

#include "issfa/types.hpp"

namespace issfa::bench {

/// Rank-K truncated SVD Y ≈ W S with W = U_K Σ_K and S = V_Kᵀ (orthonormal
/// rows). No centering: the model has no intercept.
struct SvdBaseline {
    RowMatrix weights;         // T×K
    RowMatrix features;        // K×V
    RowMatrix reconstruction;  // W S
    Vector singular_values;    // all of them, descending

    /// Projection of new rows onto the K-dimensional row space: Y_h Sᵀ S.
    [[nodiscard]] RowMatrix project(const RowMatrix& y) const;
};

/// Throws std::invalid_argument unless 1 ≤ K ≤ min(T, V).
[[nodiscard]] SvdBaseline svd_baseline(const RowMatrix& y, std::size_t rank);

}  // namespace issfa::bench
