#pragma once

#include "podsurf/snapshots.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace podsurf {

/// C(n, i) t^i (1 - t)^(n - i). Throws IndexOutOfRange unless 0 <= i <= n,
/// InvalidArgument unless t is in [0, 1].
double bernstein(int i, int n, double t);

/// Links one parameter component to the motion of one control point along a
/// unit direction: P_c += mu[parameter] * direction.
struct FfdBinding {
  std::size_t control;
  Eigen::VectorXd direction;
  std::size_t parameter;
};

/// Bernstein control lattice over an affine box in 2D or 3D. Control points
/// sit on the regular lattice origin + sum_k (i_k / l_k) axes.col(k).
class FfdLattice {
 public:
  /// counts[k] = l_k + 1 control points along axis k (each >= 2).
  FfdLattice(std::vector<std::size_t> counts, Eigen::VectorXd origin, Eigen::MatrixXd axes);

  std::size_t dim() const { return counts_.size(); }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t n_controls() const;
  std::size_t n_parameters() const;
  const Eigen::VectorXd& origin() const { return origin_; }
  const Eigen::MatrixXd& axes() const { return axes_; }

  std::size_t flat_index(const std::vector<std::size_t>& multi) const;
  std::vector<std::size_t> multi_index(std::size_t flat) const;

  /// Marks a control as immovable. Throws InvalidArgument if already bound.
  void fix(std::size_t control);
  bool is_fixed(std::size_t control) const { return fixed_.at(control); }
  /// Throws InvalidArgument for fixed controls or zero directions.
  void bind(std::size_t control, const Eigen::VectorXd& direction, std::size_t parameter);
  const std::vector<FfdBinding>& bindings() const { return bindings_; }

  Eigen::VectorXd base_point(std::size_t control) const;
  /// dim x n_controls matrix of displaced control points.
  Eigen::MatrixXd control_points(const ParameterPoint& mu) const;
  /// dim x n_controls matrix of displacements only.
  Eigen::MatrixXd displacements(const ParameterPoint& mu) const;

  /// Box-local coordinates in [0,1]^d, or nullopt when x is outside the box
  /// by more than 1e-12.
  std::optional<Eigen::VectorXd> local_coords(const Eigen::VectorXd& x) const;

 private:
  std::vector<std::size_t> counts_;
  Eigen::VectorXd origin_;
  Eigen::MatrixXd axes_;
  Eigen::MatrixXd axes_inverse_;
  std::vector<bool> fixed_;
  std::vector<FfdBinding> bindings_;
};

/// Deforms the columns of `points` (dim x k). In-box points move by the
/// Bernstein-weighted sum of control displacements; others are unchanged.
Eigen::MatrixXd deform(const FfdLattice& lattice, const ParameterPoint& mu,
                       const Eigen::MatrixXd& points);

// ---------------------------------------------------------------------------
// Real-coded generational GA: tournament selection, BLX-0.5 crossover,
// Gaussian mutation clamped to bounds, elitism of one.
// ---------------------------------------------------------------------------

struct GaConfig {
  std::size_t population = 40;
  std::size_t generations = 100;
  std::size_t tournament_size = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  double mutation_sigma = 0.1;  // fraction of each bound range
  std::uint64_t seed = 42;

  /// Throws InvalidArgument unless population >= 4 and even, rates in [0,1].
  void validate() const;
};

struct GaGeneration {
  std::size_t generation;
  double best;  // best value found so far
  double mean;  // mean over the current population
};

struct GaResult {
  ParameterPoint best;
  double best_value = 0.0;
  std::vector<GaGeneration> history;  // generation 0 is the initial population
  std::size_t evaluations = 0;
};

using ObjectiveFn = std::function<double(const ParameterPoint&)>;

/// Minimizes the objective over the box. Throws NonFiniteObjective.
GaResult ga_optimize(const ObjectiveFn& objective, const ParameterSpace& space,
                     const GaConfig& config);

/// `generation,best,mean` CSV.
std::string history_csv(const GaResult& result);

}  // namespace podsurf
