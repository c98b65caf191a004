#pragma once

#include <Eigen/Core>

namespace catnet {

// Row-major so node rows are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace catnet
