#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace podsurf {

using ParameterPoint = Eigen::VectorXd;

struct Bound {
  double low;
  double high;
};

/// Box-shaped parameter domain P in R^p.
class ParameterSpace {
 public:
  ParameterSpace() = default;
  /// Throws InvalidArgument unless p >= 1 and every bound is finite with low < high.
  explicit ParameterSpace(std::vector<Bound> bounds);

  std::size_t dims() const { return bounds_.size(); }
  const std::vector<Bound>& bounds() const { return bounds_; }
  const Bound& operator[](std::size_t i) const { return bounds_[i]; }

  /// True when x has p finite entries each within its bound (inclusive).
  bool contains(const ParameterPoint& x) const;
  /// Throws DimensionMismatch / NonFinite / OutOfBounds.
  void check(const ParameterPoint& x) const;

  /// Affine map of each dimension onto [0, 1].
  ParameterPoint normalize(const ParameterPoint& x) const;
  ParameterPoint denormalize(const ParameterPoint& unit) const;

  /// Smallest box containing the given points. Dimensions where all points
  /// coincide are widened by 0.5 on each side.
  static ParameterSpace bounding_box(const std::vector<ParameterPoint>& points);

  friend bool operator==(const ParameterSpace& a, const ParameterSpace& b);

 private:
  std::vector<Bound> bounds_;
};

/// N x n matrix of field snapshots with the parameter point of each column.
struct SnapshotMatrix {
  Eigen::MatrixXd data;                  // column j is snapshot y_j
  std::vector<ParameterPoint> params;    // params[j] produced column j
  std::optional<Eigen::VectorXd> weights;  // quadrature weights, length N

  std::size_t n_dof() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t n_snap() const { return static_cast<std::size_t>(data.cols()); }
  std::size_t n_params() const { return params.empty() ? 0 : params.front().size(); }

  /// Stored weights, or all-ones when none were given.
  Eigen::VectorXd effective_weights() const;
  /// params as an n x p matrix, one row per snapshot.
  Eigen::MatrixXd param_matrix() const;

  friend bool operator==(const SnapshotMatrix& a, const SnapshotMatrix& b);
};

/// Throws the first violated invariant: NonFinite (with row/col),
/// DimensionMismatch, DuplicateParameter or InvalidWeights.
void validate(const SnapshotMatrix& sm);

// Binary store, little-endian:
//   "PSNP" | u32 version=1 | u64 N | u64 n | u64 p | u8 has_weights
//   | p*n f64 params (column-major) | [N f64 weights] | N*n f64 data (column-major)
inline constexpr std::uint32_t kSnapshotFormatVersion = 1;

void write_snapshots(const SnapshotMatrix& sm, const std::filesystem::path& path);
SnapshotMatrix read_snapshots(const std::filesystem::path& path);

struct SnapshotHeader {
  std::uint32_t version;
  std::uint64_t n_dof;
  std::uint64_t n_snap;
  std::uint64_t n_params;
  bool has_weights;
};
/// Reads only the fixed-size header.
SnapshotHeader read_snapshot_header(const std::filesystem::path& path);

/// CSV layout: the first p rows hold parameter values (one column per
/// snapshot), the remaining N rows hold field values.
SnapshotMatrix read_snapshots_csv(const std::filesystem::path& path, std::size_t n_params);
void write_snapshots_csv(const SnapshotMatrix& sm, const std::filesystem::path& path);

}  // namespace podsurf
