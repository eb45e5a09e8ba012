#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace gnnsteal {

/// Row-major so that a node's feature or hidden vector is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using NodeId = std::size_t;

}  // namespace gnnsteal
