#pragma once

#include "podsurf/snapshots.hpp"

#include <Eigen/Dense>

#include <optional>

namespace podsurf::detail {

/// Checks shapes, finiteness and exact duplicate rows, then maps x into the
/// unit cube of `space` (bounding box of x when absent). Returns the space
/// actually used through `used`.
Eigen::MatrixXd normalized_inputs(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                  const std::optional<ParameterSpace>& space,
                                  ParameterSpace& used);

/// Normalizes one query point and checks its length.
Eigen::VectorXd normalized_query(const ParameterSpace& space, const Eigen::VectorXd& x,
                                 std::size_t expected_dims);

/// Squared Euclidean distances between rows of a and b.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace podsurf::detail
