#include "podsurf/error.hpp"
#include "podsurf/regress.hpp"
#include "regress_detail.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace podsurf {

namespace detail {

Eigen::MatrixXd normalized_inputs(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                  const std::optional<ParameterSpace>& space,
                                  ParameterSpace& used) {
  if (x.rows() != y.rows())
    fail(ErrorCode::DimensionMismatch, std::to_string(x.rows()) + " inputs but " +
                                           std::to_string(y.rows()) + " targets");
  if (x.cols() < 1 || y.cols() < 1) fail(ErrorCode::DimensionMismatch, "empty input or output");
  if (!x.allFinite() || !y.allFinite())
    fail(ErrorCode::NonFinite, "training data contains non-finite values");

  const auto m = x.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index d = 0; d < x.cols(); ++d) {
      if (x(a, d) != x(b, d)) return x(a, d) < x(b, d);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (x.row(order[k - 1]) == x.row(order[k]))
      fail(ErrorCode::DuplicateInput, "training inputs " + std::to_string(order[k - 1]) + " and " +
                                          std::to_string(order[k]) + " coincide");
  }

  if (space) {
    if (space->dims() != static_cast<std::size_t>(x.cols()))
      fail(ErrorCode::DimensionMismatch, "parameter space dimension differs from inputs");
    used = *space;
  } else {
    std::vector<ParameterPoint> pts;
    pts.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) pts.emplace_back(x.row(i).transpose());
    used = ParameterSpace::bounding_box(pts);
  }
  Eigen::MatrixXd u(m, x.cols());
  for (Eigen::Index i = 0; i < m; ++i) u.row(i) = used.normalize(x.row(i).transpose()).transpose();
  return u;
}

Eigen::VectorXd normalized_query(const ParameterSpace& space, const Eigen::VectorXd& x,
                                 std::size_t expected_dims) {
  if (static_cast<std::size_t>(x.size()) != expected_dims)
    fail(ErrorCode::DimensionMismatch, "query has " + std::to_string(x.size()) +
                                           " entries, model expects " +
                                           std::to_string(expected_dims));
  if (!x.allFinite()) fail(ErrorCode::NonFinite, "query contains non-finite values");
  return space.normalize(x);
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d;
}

}  // namespace detail

std::string regressor_kind(const Regressor& r) {
  struct {
    std::string operator()(const GprModel&) const { return "gpr"; }
    std::string operator()(const RbfModel&) const { return "rbf"; }
    std::string operator()(const LinearNdModel&) const { return "linear"; }
  } visitor;
  return std::visit(visitor, r);
}

std::size_t input_dims(const Regressor& r) {
  return std::visit([](const auto& m) { return m.input_dims(); }, r);
}

std::size_t output_dims(const Regressor& r) {
  return std::visit([](const auto& m) { return m.output_dims(); }, r);
}

Eigen::VectorXd predict(const Regressor& r, const Eigen::VectorXd& x) {
  struct {
    const Eigen::VectorXd& x;
    Eigen::VectorXd operator()(const GprModel& m) const { return predict_gpr(m, x).mean; }
    Eigen::VectorXd operator()(const RbfModel& m) const { return predict_rbf(m, x); }
    Eigen::VectorXd operator()(const LinearNdModel& m) const { return predict_linear(m, x); }
  } visitor{x};
  return std::visit(visitor, r);
}

}  // namespace podsurf
