#include "issfa/bench/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace issfa::bench {

namespace {

RowMatrix unit_rows(const RowMatrix& m) {
    RowMatrix out = m;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double n = out.row(i).norm();
        if (n > 0.0) {
            out.row(i) /= n;
        }
    }
    return out;
}

}  // namespace

double metric_er(const RowMatrix& a, const RowMatrix& b) {
    if (a.rows() == 0 || b.rows() == 0) {
        throw std::invalid_argument("metric_er: both feature sets must be nonempty");
    }
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("metric_er: feature sets disagree on V");
    }
    const RowMatrix ua = unit_rows(a);
    const RowMatrix ub = unit_rows(b);
    double total = 0.0;
    for (Eigen::Index k = 0; k < ua.rows(); ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < ub.rows(); ++j) {
            const double sign = ua.row(k).dot(ub.row(j)) < 0.0 ? -1.0 : 1.0;
            best = std::min(best, (ua.row(k) - sign * ub.row(j)).squaredNorm());
        }
        total += best;
    }
    return total;
}

double excess_kurtosis(std::span<const double> values) {
    if (values.size() < 4) {
        throw std::invalid_argument("excess_kurtosis: need at least four values");
    }
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double x : values) {
        mean += x;
    }
    mean /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : values) {
        const double d2 = (x - mean) * (x - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) {
        throw std::invalid_argument("excess_kurtosis: zero variance");
    }
    return m4 / (m2 * m2) - 3.0;
}

std::vector<FeatureMatch> match_features(const RowMatrix& truth, const RowMatrix& estimate) {
    if (truth.cols() != estimate.cols() && truth.rows() > 0 && estimate.rows() > 0) {
        throw std::invalid_argument("match_features: feature sets disagree on V");
    }
    const Matrix cos = (unit_rows(truth) * unit_rows(estimate).transpose()).cwiseAbs();
    std::vector<bool> used_t(static_cast<std::size_t>(truth.rows()), false);
    std::vector<bool> used_e(static_cast<std::size_t>(estimate.rows()), false);
    std::vector<FeatureMatch> out;
    const auto pairs = static_cast<std::size_t>(std::min(truth.rows(), estimate.rows()));
    while (out.size() < pairs) {
        FeatureMatch best{0, 0, -1.0};
        for (Eigen::Index i = 0; i < cos.rows(); ++i) {
            if (used_t[static_cast<std::size_t>(i)]) {
                continue;
            }
            for (Eigen::Index j = 0; j < cos.cols(); ++j) {
                if (!used_e[static_cast<std::size_t>(j)] && cos(i, j) > best.similarity) {
                    best = {static_cast<std::size_t>(i), static_cast<std::size_t>(j), cos(i, j)};
                }
            }
        }
        used_t[best.truth] = true;
        used_e[best.estimate] = true;
        out.push_back(best);
    }
    return out;
}

void ReconstructionAverage::add(const RowMatrix& reconstruction) {
    if (count_ == 0) {
        sum_ = reconstruction;
    } else {
        if (reconstruction.rows() != sum_.rows() || reconstruction.cols() != sum_.cols()) {
            throw std::invalid_argument("ReconstructionAverage: shape mismatch");
        }
        sum_ += reconstruction;
    }
    ++count_;
}

RowMatrix ReconstructionAverage::mean() const {
    if (count_ == 0) {
        throw std::logic_error("ReconstructionAverage: no samples");
    }
    return sum_ / static_cast<double>(count_);
}

RowMatrix posterior_mean_reconstruction(const std::vector<RowMatrix>& samples) {
    if (samples.empty()) {
        throw std::invalid_argument("posterior_mean_reconstruction: empty sample set");
    }
    ReconstructionAverage avg;
    for (const RowMatrix& s : samples) {
        avg.add(s);
    }
    return avg.mean();
}

}  // namespace issfa::bench
