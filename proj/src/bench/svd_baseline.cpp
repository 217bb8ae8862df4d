#include "issfa/bench/svd_baseline.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace issfa::bench {

RowMatrix SvdBaseline::project(const RowMatrix& y) const { return (y * features.transpose()) * features; }

SvdBaseline svd_baseline(const RowMatrix& y, std::size_t rank) {
    const auto limit = static_cast<std::size_t>(std::min(y.rows(), y.cols()));
    if (rank == 0 || rank > limit) {
        throw std::invalid_argument("svd_baseline: rank " + std::to_string(rank) + " outside [1, " +
                                    std::to_string(limit) + "]");
    }
    const Matrix dense = y;
    const Eigen::BDCSVD<Matrix> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto k = static_cast<Eigen::Index>(rank);
    SvdBaseline out;
    out.singular_values = svd.singularValues();
    out.weights = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal();
    out.features = svd.matrixV().leftCols(k).transpose();
    out.reconstruction = out.weights * out.features;
    return out;
}

}  // namespace issfa::bench
