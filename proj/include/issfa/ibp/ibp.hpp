#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "issfa/random.hpp"

namespace issfa::ibp {

/**
 * T×K⁺ binary activation matrix with cached column counts m_k.
 *
 * Columns are kept in insertion order. Zero columns may exist transiently
 * while a sampler sweep is in progress; prune_empty() restores the invariant
 * that every stored column has m_k ≥ 1.
 */
class BinaryFeatureMatrix {
public:
    explicit BinaryFeatureMatrix(std::size_t rows = 0) : rows_(rows) {}

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return columns_.size(); }

    [[nodiscard]] bool operator()(std::size_t t, std::size_t k) const { return columns_[k][t] != 0; }
    void set(std::size_t t, std::size_t k, bool value);

    [[nodiscard]] std::size_t count(std::size_t k) const { return counts_[k]; }
    [[nodiscard]] const std::vector<std::size_t>& counts() const { return counts_; }
    [[nodiscard]] const std::vector<std::uint8_t>& column(std::size_t k) const { return columns_[k]; }

    /// Appends an all-zero column and returns its index.
    std::size_t add_column();
    void remove_column(std::size_t k);
    /// Removes zero columns; returns their former indices in ascending order.
    std::vector<std::size_t> prune_empty();

    [[nodiscard]] bool is_pruned() const;
    [[nodiscard]] bool operator==(const BinaryFeatureMatrix& other) const = default;

    /// Throws std::logic_error if counts disagree with entries.
    void check_invariants() const;

private:
    std::size_t rows_;
    std::vector<std::vector<std::uint8_t>> columns_;
    std::vector<std::size_t> counts_;
};

/// Sequential two-parameter IBP draw: row t activates existing column k with
/// probability m_k/(β+t−1), then opens Poisson(αβ/(β+t−1)) new columns.
[[nodiscard]] BinaryFeatureMatrix sample_ibp(double alpha, double beta, std::size_t rows, Rng& rng);

/// H_T(β) = Σ_{i=1}^{T} β/(i + β − 1).
[[nodiscard]] double harmonic(double beta, std::size_t rows);

/// Prior odds of activating a shared column: m/(β + T − 1 − m).
[[nodiscard]] double shared_prior_odds(std::size_t m_minus_t, double beta, std::size_t rows);

/**
 * Log probability of the left-ordered equivalence class of Z:
 *   K⁺ ln(αβ) − Σ_h ln K_h! − α H_T(β) + Σ_k ln B(m_k, T − m_k + β),
 * where K_h counts columns sharing the same binary pattern h. Zero columns
 * are ignored.
 */
[[nodiscard]] double log_pmf(const BinaryFeatureMatrix& z, double alpha, double beta);

}  // namespace issfa::ibp
