#include "podsurf/error.hpp"
#include "podsurf/regress.hpp"
#include "regress_detail.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace podsurf {

namespace {
constexpr double kHullTolerance = 1e-12;
}

LinearNdModel train_linear(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           const std::optional<ParameterSpace>& space) {
  const auto p = x.cols();
  if (p > 2) fail(ErrorCode::UnsupportedDimension, "linear interpolation supports p <= 2");
  if (p < 1) fail(ErrorCode::DimensionMismatch, "empty inputs");
  if (x.rows() < p + 1)
    fail(ErrorCode::TooFewPoints, "linear interpolation needs m >= p + 1 points");

  LinearNdModel model;
  model.train_inputs = detail::normalized_inputs(x, y, space, model.space);
  model.train_outputs = y;
  const auto m = model.train_inputs.rows();
  if (p == 1) {
    model.order.resize(static_cast<std::size_t>(m));
    std::iota(model.order.begin(), model.order.end(), 0);
    std::sort(model.order.begin(), model.order.end(), [&](int a, int b) {
      return model.train_inputs(a, 0) < model.train_inputs(b, 0);
    });
  } else {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) pts.emplace_back(model.train_inputs(i, 0), model.train_inputs(i, 1));
    model.triangles = delaunay(pts);
  }
  return model;
}

Eigen::VectorXd predict_linear(const LinearNdModel& model, const Eigen::VectorXd& x) {
  const auto u = detail::normalized_query(model.space, x, model.input_dims());
  const auto& xi = model.train_inputs;
  const auto& yi = model.train_outputs;

  if (model.input_dims() == 1) {
    const auto& ord = model.order;
    const double lo = xi(ord.front(), 0), hi = xi(ord.back(), 0);
    const double t = u[0];
    if (t < lo - kHullTolerance || t > hi + kHullTolerance)
      fail(ErrorCode::OutOfHull, "query outside the training range");
    // First segment whose right end is >= t.
    std::size_t k = 1;
    while (k + 1 < ord.size() && xi(ord[k], 0) < t) ++k;
    const int a = ord[k - 1], b = ord[k];
    const double w = std::clamp((t - xi(a, 0)) / (xi(b, 0) - xi(a, 0)), 0.0, 1.0);
    return (1.0 - w) * yi.row(a).transpose() + w * yi.row(b).transpose();
  }

  for (const auto& tri : model.triangles) {
    const Eigen::Vector2d a = xi.row(tri[0]).transpose();
    const Eigen::Vector2d b = xi.row(tri[1]).transpose();
    const Eigen::Vector2d c = xi.row(tri[2]).transpose();
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    const double l1 = ((b.x() - u[0]) * (c.y() - u[1]) - (c.x() - u[0]) * (b.y() - u[1])) / det;
    const double l2 = ((c.x() - u[0]) * (a.y() - u[1]) - (a.x() - u[0]) * (c.y() - u[1])) / det;
    const double l3 = 1.0 - l1 - l2;
    if (l1 < -kHullTolerance || l2 < -kHullTolerance || l3 < -kHullTolerance) continue;
    return l1 * yi.row(tri[0]).transpose() + l2 * yi.row(tri[1]).transpose() +
           l3 * yi.row(tri[2]).transpose();
  }
  fail(ErrorCode::OutOfHull, "query outside the convex hull of the training inputs");
}

}  // namespace podsurf
