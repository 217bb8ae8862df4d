#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "issfa/bench/config.hpp"
#include "issfa/random.hpp"
#include "issfa/types.hpp"

namespace issfa::bench {

/// Latent truth behind a simulated dataset.
struct GroundTruth {
    RowMatrix features;         // K×V, unit-norm rows
    RowMatrix weights;          // T×K, A∘Z for the training rows
    RowMatrix holdout_weights;  // T_h×K
    RowMatrix latent;           // X = (A∘Z)S, training rows
    RowMatrix holdout_latent;   // X for the holdout rows
};

struct Dataset {
    std::vector<std::size_t> grid;
    RowMatrix y;          // T×V
    RowMatrix y_holdout;  // T_h×V (may have zero rows)
    std::optional<GroundTruth> truth;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(y.cols()); }
};

/**
 * Draws K features from N(0, Q(θ)⁻¹) on the configured DCT grid and
 * unit-normalises them, then T + T_h rows with Z_{t,k} ~ Bern(p),
 * A_{t,k} ~ N(μ_k, v_k) and E ~ N(0, noise_variance). Y = (A∘Z)S + E.
 * The first T rows are the training block.
 */
[[nodiscard]] Dataset simulate(const SimConfig& config, Rng& rng);

/// Writes Y.ismx, Y_holdout.ismx and, when present, S_true, W_true,
/// W_holdout_true, X_true and X_holdout_true, plus dataset.json.
void save_dataset(const Dataset& data, const std::filesystem::path& dir);
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace issfa::bench
