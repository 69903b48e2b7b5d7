#pragma once

#include "podsurf/shapeopt.hpp"
#include "podsurf/snapshots.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace podsurf {

enum class FomId { Poiseuille, Heat2d, GaussianBump, FfdDrag };

/// "poiseuille", "heat2d", "gaussian-bump", "ffd-drag". Throws InvalidArgument.
FomId parse_fom_id(std::string_view text);
std::string_view to_string(FomId id);

using FieldMap = std::map<std::string, Eigen::VectorXd>;

// ---------------------------------------------------------------------------
// Heat2d building blocks, exposed for verification.
// ---------------------------------------------------------------------------

/// Gaussian source exp(-((x - cx)^2 + (y - 0.5)^2) / (2 * 0.1^2)) sampled on
/// an n x n node grid of the unit square (row-major, y outer).
Eigen::VectorXd heat2d_source(int grid_n, double centre_x);

struct CgResult {
  Eigen::VectorXd field;  // n*n nodes, zero on the boundary
  int iterations;
};

/// Solves -kappa * Laplace(u) = f with homogeneous Dirichlet data by CG on
/// the 5-point stencil, to relative residual 1e-10. Throws SolverDiverged
/// after 10000 iterations.
CgResult solve_heat2d(int grid_n, double kappa, const Eigen::VectorXd& source);

// ---------------------------------------------------------------------------
// FfdDrag building blocks.
// ---------------------------------------------------------------------------

inline constexpr int kHullPoints = 256;
inline constexpr double kAreaFloorRatio = 0.9;
inline constexpr double kAreaPenalty = 1e3;

/// 2 x 256 reference section polygon, counter-clockwise, s_i = i / 256.
Eigen::MatrixXd reference_hull();
/// 4 x 4 lattice on the unit square, boundary controls fixed, six bound
/// parameters moving the four interior controls.
FfdLattice hull_lattice();
double polygon_area(const Eigen::MatrixXd& polygon);
/// r(s) = kappa(s)^2 (1 + 0.3 sin(4 pi s)) with discrete (Menger) curvature.
Eigen::VectorXd resistance_field(const Eigen::MatrixXd& polygon);
/// Arc-length quadrature weights of the reference polygon.
Eigen::VectorXd hull_weights();
/// kAreaPenalty when the area drops below kAreaFloorRatio of the reference.
double area_penalty(const Eigen::MatrixXd& polygon);

// ---------------------------------------------------------------------------

/// Desk-scale parametric truth solver.
class FomProblem {
 public:
  /// `grid_n` only affects Heat2d (nodes per side, default 64).
  explicit FomProblem(FomId id, int grid_n = 64);

  FomId id() const { return id_; }
  const ParameterSpace& space() const { return space_; }
  std::size_t n_params() const { return space_.dims(); }
  const std::vector<std::string>& field_names() const { return field_names_; }
  /// Field selected when the caller does not name one.
  const std::string& primary_field() const { return field_names_.front(); }
  /// Node coordinates (rows are nodes) and quadrature weights per field.
  const Eigen::MatrixXd& coordinates(const std::string& field) const;
  const Eigen::VectorXd& weights(const std::string& field) const;

  /// Pure function of mu. Throws OutOfBounds / DimensionMismatch.
  FieldMap evaluate(const ParameterPoint& mu) const;

  /// Deformed hull polygon (FfdDrag only).
  Eigen::MatrixXd deformed_hull(const ParameterPoint& mu) const;
  /// Scalar drag plus area penalty at mu (FfdDrag only).
  double drag_objective(const ParameterPoint& mu) const;

 private:
  FomId id_;
  int grid_n_;
  ParameterSpace space_;
  std::vector<std::string> field_names_;
  std::map<std::string, Eigen::MatrixXd> coords_;
  std::map<std::string, Eigen::VectorXd> weights_;
  std::optional<FfdLattice> lattice_;
  Eigen::MatrixXd hull_;
};

/// Evaluates the FOM at every point, one SnapshotMatrix per field, carrying
/// that field's quadrature weights.
std::map<std::string, SnapshotMatrix> generate_snapshots(const FomProblem& fom,
                                                         const std::vector<ParameterPoint>& params);

// ---------------------------------------------------------------------------
// Parameter-space sampling.
// ---------------------------------------------------------------------------

struct RandomSampling {};
/// All 2^p corners first, then uniform interior points.
struct VerticesPlusRandom {};
struct GridSampling {
  std::vector<std::size_t> counts;
};
using SamplingStrategy = std::variant<RandomSampling, VerticesPlusRandom, GridSampling>;

/// "random", "vertices-plus-random" or "grid:3x3".
SamplingStrategy parse_strategy(std::string_view text);

/// Deterministic under seed; never returns exact duplicates. Random draws
/// use the open interval of each bound. Grid requires count equal to the
/// lattice size. Throws CountTooSmall.
std::vector<ParameterPoint> sample_space(const ParameterSpace& space,
                                         const SamplingStrategy& strategy, std::size_t count,
                                         std::uint64_t seed);

}  // namespace podsurf
