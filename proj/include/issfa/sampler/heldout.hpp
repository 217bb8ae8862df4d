#pragma once

#include <cstddef>

#include "issfa/ibp/ibp.hpp"
#include "issfa/random.hpp"
#include "issfa/sampler/model_state.hpp"
#include "issfa/types.hpp"

namespace issfa::sampler {

struct HeldoutResult {
    ibp::BinaryFeatureMatrix z;
    RowMatrix weights;         // T_h×K, zero where inactive
    RowMatrix reconstruction;  // (A_h∘Z_h)S
};

/**
 * Activations and weights for unseen rows with S, σ², ν, τ, β frozen.
 *
 * Each holdout row is treated as customer T+1 of the training buffet: the
 * prior odds of feature k are m_k/(β + T − m_k) with m_k its training count.
 * Z_h starts empty; every inner sweep applies the collapsed activation draw
 * followed by the conjugate weight draw for each (row, feature). No new
 * features are created. Rows are independent and use per-row substreams.
 */
[[nodiscard]] HeldoutResult heldout_infer(const RowMatrix& y_holdout, const ModelState& state, std::size_t inner_sweeps,
                                          const Rng& rng);

}  // namespace issfa::sampler
