#pragma once

#include "podsurf/snapshots.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <variant>

namespace podsurf {

struct RankTruncation {
  std::size_t rank;
};
struct EnergyTruncation {
  double fraction;  // in (0, 1]
};
using Truncation = std::variant<RankTruncation, EnergyTruncation>;

struct PodOptions {
  /// Subtract the snapshot mean before decomposing. The mean is stored in
  /// the basis and added back by reconstruct().
  bool center = false;
};

/// Orthonormal spatial modes of a snapshot matrix.
struct PodBasis {
  Eigen::MatrixXd modes;            // N x N_r, orthonormal columns
  Eigen::VectorXd singular_values;  // N_r, non-increasing
  Eigen::VectorXd full_spectrum;    // min(n, N) singular values
  Eigen::VectorXd mean;             // empty unless centered

  std::size_t n_dof() const { return static_cast<std::size_t>(modes.rows()); }
  std::size_t rank() const { return static_cast<std::size_t>(modes.cols()); }
  bool centered() const { return mean.size() > 0; }
};

/// Singular values and left singular vectors of a dense matrix, sorted by
/// decreasing singular value. Householder QR followed by one-sided Jacobi
/// rotations on the small triangular factor.
struct ThinSvd {
  Eigen::MatrixXd left;    // rows x k
  Eigen::VectorXd values;  // k = min(rows, cols)
};
ThinSvd thin_svd(const Eigen::MatrixXd& y);

/// Sign rule shared by every basis: each column is flipped so its entry of
/// largest magnitude is positive (ties go to the lowest index).
void normalize_signs(Eigen::MatrixXd& columns);

PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const Truncation& truncation,
                     const PodOptions& options = {});
PodBasis compute_pod(const SnapshotMatrix& sm, const Truncation& truncation,
                     const PodOptions& options = {});

/// xi = Psi^T (y - mean).
Eigen::VectorXd project(const PodBasis& basis, const Eigen::VectorXd& field);
/// Projects every column of a matrix.
Eigen::MatrixXd project_all(const PodBasis& basis, const Eigen::MatrixXd& fields);

/// mean + sum_i xi_i psi_i.
Eigen::VectorXd reconstruct(const PodBasis& basis, const Eigen::VectorXd& coefficients);

/// Fraction of total squared singular values captured by the first k.
double retained_energy(const PodBasis& basis, std::size_t k);

}  // namespace podsurf
