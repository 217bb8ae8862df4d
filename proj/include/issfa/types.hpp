#pragma once

#include <Eigen/Dense>

namespace issfa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Observations, residuals and feature stacks are stored one row per
// observation / feature so that a row is a contiguous length-V vector.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace issfa
