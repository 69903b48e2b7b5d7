#pragma once

#include "podsurf/snapshots.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace podsurf {

// ---------------------------------------------------------------------------
// Gaussian process regression, isotropic squared-exponential kernel
//
//   k(x, x') = sf2 * exp(-|x - x'|^2 / (2 l^2))
//
// on inputs mapped to the unit cube. One independent GP per output column,
// each on standardized (zero-mean, unit-variance) targets.
// ---------------------------------------------------------------------------

/// Hyperparameter search box. Grid over log-spaced values, then Nelder-Mead
/// in log space starting from the best grid point.
struct GprSearch {
  double length_min = 1e-2, length_max = 1e1;
  int length_count = 25;
  double scale_min = 1e-2, scale_max = 1e2;
  int scale_count = 9;
  double noise_min = 1e-12, noise_max = 1e-2;
  int noise_count = 9;
  int max_iterations = 200;
  double simplex_tolerance = 1e-6;
};

struct GprConfig {
  /// Fixed noise variance, or nullopt to optimize it over the search box.
  std::optional<double> noise = 1e-10;
  /// Fixing either hyperparameter removes it from the search.
  std::optional<double> length_scale;
  std::optional<double> output_scale;
  /// Extra Nelder-Mead runs from seeded random starts inside the box.
  int restarts = 0;
  std::uint64_t seed = 42;
  GprSearch search;
};

struct GprOutput {
  double length_scale = 1.0;
  double output_scale = 1.0;  // sf2
  double noise = 0.0;         // sn2
  double jitter = 0.0;        // diagonal shift actually used on top of sn2
  double y_mean = 0.0;
  double y_std = 1.0;
  double log_likelihood = 0.0;
  Eigen::MatrixXd chol;   // lower factor of K + (sn2 + jitter) I
  Eigen::VectorXd alpha;  // solves (K + (sn2 + jitter) I) alpha = standardized y
};

struct GprModel {
  ParameterSpace space;
  Eigen::MatrixXd train_inputs;  // m x p, normalized
  std::vector<GprOutput> outputs;

  std::size_t input_dims() const { return static_cast<std::size_t>(train_inputs.cols()); }
  std::size_t output_dims() const { return outputs.size(); }
};

struct GprPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  bool extrapolated = false;  // query outside the unit cube of the training space
};

/// sf2 * exp(-|a_i - b_j|^2 / (2 l^2)), rows are points.
Eigen::MatrixXd squared_exponential(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                    double length_scale, double output_scale);

/// -1/2 y^T K~^-1 y - 1/2 log|K~| - m/2 log(2 pi), K~ = K + (sn2 + jitter) I,
/// with the jitter ladder starting at 1e-10 trace(K)/m. Inputs are used as
/// given (no normalization or standardization).
double log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               double length_scale, double output_scale, double noise);

/// Trains on raw inputs. `space` fixes the normalization; defaults to the
/// bounding box of x.
GprModel train_gpr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const GprConfig& config,
                   const std::optional<ParameterSpace>& space = std::nullopt);

GprPrediction predict_gpr(const GprModel& model, const Eigen::VectorXd& x);

/// Rebuilds chol and alpha from stored hyperparameters (used after loading).
void refactor_gpr_output(const Eigen::MatrixXd& train_inputs, const Eigen::VectorXd& y,
                         GprOutput& out);

// ---------------------------------------------------------------------------
// Radial basis functions with a smoothing shift: (A - s I) W = Y.
// ---------------------------------------------------------------------------

enum class RbfKernel { Multiquadric, ThinPlateSpline };

struct RbfConfig {
  RbfKernel kernel = RbfKernel::Multiquadric;
  double smoothness = 0.0;
  /// Multiquadric shape; defaults to the mean nearest-neighbour distance.
  std::optional<double> epsilon;
};

struct RbfModel {
  ParameterSpace space;
  Eigen::MatrixXd train_inputs;  // m x p, normalized
  RbfKernel kernel = RbfKernel::Multiquadric;
  double epsilon = 1.0;
  double smoothness = 0.0;
  Eigen::MatrixXd weights;  // m x outputs

  std::size_t input_dims() const { return static_cast<std::size_t>(train_inputs.cols()); }
  std::size_t output_dims() const { return static_cast<std::size_t>(weights.cols()); }
};

double rbf_value(RbfKernel kernel, double r, double epsilon);

RbfModel train_rbf(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const RbfConfig& config,
                   const std::optional<ParameterSpace>& space = std::nullopt);
Eigen::VectorXd predict_rbf(const RbfModel& model, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Piecewise-linear interpolation, p in {1, 2}.
// ---------------------------------------------------------------------------

using Triangle = std::array<int, 3>;

/// Bowyer-Watson Delaunay triangulation; triangles are counter-clockwise.
/// Throws DegenerateGeometry for fewer than 3 points or all-collinear input,
/// DuplicateInput for repeated points.
std::vector<Triangle> delaunay(const std::vector<Eigen::Vector2d>& points);

struct LinearNdModel {
  ParameterSpace space;
  Eigen::MatrixXd train_inputs;   // m x p, normalized
  Eigen::MatrixXd train_outputs;  // m x outputs
  std::vector<Triangle> triangles;  // p == 2
  std::vector<int> order;           // p == 1: indices sorted by abscissa

  std::size_t input_dims() const { return static_cast<std::size_t>(train_inputs.cols()); }
  std::size_t output_dims() const { return static_cast<std::size_t>(train_outputs.cols()); }
};

LinearNdModel train_linear(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           const std::optional<ParameterSpace>& space = std::nullopt);
/// Throws OutOfHull when x lies outside the convex hull of the training inputs.
Eigen::VectorXd predict_linear(const LinearNdModel& model, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------

using Regressor = std::variant<GprModel, RbfModel, LinearNdModel>;

std::string regressor_kind(const Regressor& r);
std::size_t input_dims(const Regressor& r);
std::size_t output_dims(const Regressor& r);
Eigen::VectorXd predict(const Regressor& r, const Eigen::VectorXd& x);

}  // namespace podsurf
