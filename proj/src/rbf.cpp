#include "podsurf/error.hpp"
#include "podsurf/regress.hpp"
#include "regress_detail.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace podsurf {

double rbf_value(RbfKernel kernel, double r, double epsilon) {
  switch (kernel) {
    case RbfKernel::Multiquadric: {
      const double q = r / epsilon;
      return std::sqrt(q * q + 1.0);
    }
    case RbfKernel::ThinPlateSpline:
      return r > 0.0 ? r * r * std::log(r) : 0.0;
  }
  return 0.0;
}

RbfModel train_rbf(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const RbfConfig& config,
                   const std::optional<ParameterSpace>& space) {
  if (!(config.smoothness >= 0.0) || !std::isfinite(config.smoothness))
    fail(ErrorCode::InvalidArgument, "smoothness must be finite and >= 0");
  if (x.rows() < 1) fail(ErrorCode::TooFewPoints, "RBF needs training points");
  if (config.kernel == RbfKernel::ThinPlateSpline && x.rows() < x.cols() + 1)
    fail(ErrorCode::TooFewPoints, "thin-plate spline needs m >= p + 1");

  RbfModel model;
  model.kernel = config.kernel;
  model.smoothness = config.smoothness;
  model.train_inputs = detail::normalized_inputs(x, y, space, model.space);
  const auto m = model.train_inputs.rows();
  const Eigen::MatrixXd dist =
      detail::squared_distances(model.train_inputs, model.train_inputs).array().sqrt().matrix();

  if (config.epsilon) {
    model.epsilon = *config.epsilon;
  } else if (m > 1) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < m; ++j)
        if (j != i) nearest = std::min(nearest, dist(i, j));
      total += nearest;
    }
    model.epsilon = total / static_cast<double>(m);
  } else {
    model.epsilon = 1.0;
  }
  if (!(model.epsilon > 0.0) || !std::isfinite(model.epsilon))
    fail(ErrorCode::InvalidArgument, "RBF epsilon must be positive");

  Eigen::MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = rbf_value(model.kernel, dist(i, j), model.epsilon);
  a.diagonal().array() -= model.smoothness;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) fail(ErrorCode::SingularSystem, "RBF system matrix is singular");
  model.weights = lu.solve(y);
  const double scale = std::max(y.norm(), std::numeric_limits<double>::min());
  if (!model.weights.allFinite() || (a * model.weights - y).norm() > 1e-8 * scale)
    fail(ErrorCode::SingularSystem, "RBF system is numerically singular");
  return model;
}

Eigen::VectorXd predict_rbf(const RbfModel& model, const Eigen::VectorXd& x) {
  const auto u = detail::normalized_query(model.space, x, model.input_dims());
  const auto m = model.train_inputs.rows();
  Eigen::VectorXd phi(m);
  for (Eigen::Index i = 0; i < m; ++i)
    phi[i] = rbf_value(model.kernel, (model.train_inputs.row(i).transpose() - u).norm(),
                       model.epsilon);
  return model.weights.transpose() * phi;
}

}  // namespace podsurf
