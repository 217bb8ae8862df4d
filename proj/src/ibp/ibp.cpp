#include "issfa/ibp/ibp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace issfa::ibp {

void BinaryFeatureMatrix::set(std::size_t t, std::size_t k, bool value) {
    std::uint8_t& cell = columns_[k][t];
    if ((cell != 0) == value) {
        return;
    }
    cell = value ? 1 : 0;
    if (value) {
        ++counts_[k];
    } else {
        --counts_[k];
    }
}

std::size_t BinaryFeatureMatrix::add_column() {
    columns_.emplace_back(rows_, 0);
    counts_.push_back(0);
    return columns_.size() - 1;
}

void BinaryFeatureMatrix::remove_column(std::size_t k) {
    columns_.erase(columns_.begin() + static_cast<std::ptrdiff_t>(k));
    counts_.erase(counts_.begin() + static_cast<std::ptrdiff_t>(k));
}

std::vector<std::size_t> BinaryFeatureMatrix::prune_empty() {
    std::vector<std::size_t> removed;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        if (counts_[k] == 0) {
            removed.push_back(k);
        }
    }
    for (auto it = removed.rbegin(); it != removed.rend(); ++it) {
        remove_column(*it);
    }
    return removed;
}

bool BinaryFeatureMatrix::is_pruned() const {
    return std::none_of(counts_.begin(), counts_.end(), [](std::size_t m) { return m == 0; });
}

void BinaryFeatureMatrix::check_invariants() const {
    for (std::size_t k = 0; k < columns_.size(); ++k) {
        if (columns_[k].size() != rows_) {
            throw std::logic_error("BinaryFeatureMatrix: column length mismatch");
        }
        const auto m = static_cast<std::size_t>(std::count(columns_[k].begin(), columns_[k].end(), 1));
        if (m != counts_[k]) {
            throw std::logic_error("BinaryFeatureMatrix: column count out of sync");
        }
    }
}

BinaryFeatureMatrix sample_ibp(double alpha, double beta, std::size_t rows, Rng& rng) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("sample_ibp: alpha and beta must be positive");
    }
    BinaryFeatureMatrix z(rows);
    for (std::size_t t = 0; t < rows; ++t) {
        const double denom = beta + static_cast<double>(t);
        const std::size_t existing = z.cols();
        for (std::size_t k = 0; k < existing; ++k) {
            if (rng.bernoulli(static_cast<double>(z.count(k)) / denom)) {
                z.set(t, k, true);
            }
        }
        const int fresh = rng.poisson(alpha * beta / denom);
        for (int j = 0; j < fresh; ++j) {
            z.set(t, z.add_column(), true);
        }
    }
    return z;
}

double harmonic(double beta, std::size_t rows) {
    double sum = 0.0;
    for (std::size_t i = 1; i <= rows; ++i) {
        sum += beta / (static_cast<double>(i) + beta - 1.0);
    }
    return sum;
}

double shared_prior_odds(std::size_t m_minus_t, double beta, std::size_t rows) {
    const double denom = beta + static_cast<double>(rows) - 1.0 - static_cast<double>(m_minus_t);
    if (!(denom > 0.0)) {
        throw std::invalid_argument("shared_prior_odds: beta + T - 1 - m must be positive");
    }
    return static_cast<double>(m_minus_t) / denom;
}

double log_pmf(const BinaryFeatureMatrix& z, double alpha, double beta) {
    const auto t = static_cast<double>(z.rows());
    std::map<std::vector<std::uint8_t>, std::size_t> patterns;
    double sum = 0.0;
    std::size_t k_plus = 0;
    for (std::size_t k = 0; k < z.cols(); ++k) {
        const auto m = static_cast<double>(z.count(k));
        if (m == 0.0) {
            continue;
        }
        ++k_plus;
        ++patterns[z.column(k)];
        sum += std::lgamma(m) + std::lgamma(t - m + beta) - std::lgamma(t + beta);
    }
    double log_multiplicity = 0.0;
    for (const auto& [pattern, multiplicity] : patterns) {
        log_multiplicity += std::lgamma(static_cast<double>(multiplicity) + 1.0);
    }
    return static_cast<double>(k_plus) * std::log(alpha * beta) - log_multiplicity -
           alpha * harmonic(beta, z.rows()) + sum;
}

}  // namespace issfa::ibp
