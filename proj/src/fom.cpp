#include "podsurf/fom.hpp"

#include "podsurf/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace podsurf {

namespace {

constexpr int kPoiseuilleNodes = 101;
constexpr int kBumpNodes = 200;
constexpr double kSourceWidth = 0.1;
constexpr double kCgTolerance = 1e-10;
constexpr int kCgMaxIterations = 10000;

// Reference section: superellipse |x/a|^e + |y/b|^e = 1 centred in the unit square.
constexpr double kHullA = 0.38;
constexpr double kHullB = 0.22;
constexpr double kHullExponent = 2.5;
constexpr double kHullRange = 0.15;  // bound on every shape parameter

Eigen::VectorXd trapezoid_weights(int n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w[0] = w[n - 1] = 0.5 * h;
  return w;
}

Eigen::VectorXd uniform_nodes(int n) {
  return Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
}

// y = A x for the interior unknowns of the 5-point stencil, scaled by kappa/h^2.
void apply_laplacian(int m, double scale, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int k = j * m + i;
      double v = 4.0 * x[k];
      if (i > 0) v -= x[k - 1];
      if (i + 1 < m) v -= x[k + 1];
      if (j > 0) v -= x[k - m];
      if (j + 1 < m) v -= x[k + m];
      y[k] = scale * v;
    }
  }
}

}  // namespace

FomId parse_fom_id(std::string_view text) {
  if (text == "poiseuille") return FomId::Poiseuille;
  if (text == "heat2d") return FomId::Heat2d;
  if (text == "gaussian-bump") return FomId::GaussianBump;
  if (text == "ffd-drag") return FomId::FfdDrag;
  fail(ErrorCode::InvalidArgument, "unknown FOM '" + std::string(text) +
                                       "' (expected poiseuille, heat2d, gaussian-bump or ffd-drag)");
}

std::string_view to_string(FomId id) {
  switch (id) {
    case FomId::Poiseuille: return "poiseuille";
    case FomId::Heat2d: return "heat2d";
    case FomId::GaussianBump: return "gaussian-bump";
    case FomId::FfdDrag: return "ffd-drag";
  }
  return "unknown";
}

Eigen::VectorXd heat2d_source(int grid_n, double centre_x) {
  const double h = 1.0 / (grid_n - 1);
  Eigen::VectorXd f(grid_n * grid_n);
  for (int j = 0; j < grid_n; ++j) {
    for (int i = 0; i < grid_n; ++i) {
      const double dx = i * h - centre_x, dy = j * h - 0.5;
      f[j * grid_n + i] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSourceWidth * kSourceWidth));
    }
  }
  return f;
}

CgResult solve_heat2d(int grid_n, double kappa, const Eigen::VectorXd& source) {
  if (grid_n < 3) fail(ErrorCode::InvalidArgument, "Heat2d grid needs at least 3 nodes per side");
  if (source.size() != grid_n * grid_n) fail(ErrorCode::DimensionMismatch, "source has wrong size");
  if (!(kappa > 0.0)) fail(ErrorCode::InvalidArgument, "conductivity must be positive");
  const int m = grid_n - 2;
  const double h = 1.0 / (grid_n - 1);
  const double scale = kappa / (h * h);

  Eigen::VectorXd b(m * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) b[j * m + i] = source[(j + 1) * grid_n + (i + 1)];

  Eigen::VectorXd x = Eigen::VectorXd::Zero(m * m);
  Eigen::VectorXd r = b, p = b, ap(m * m);
  const double b_norm = b.norm();
  double rr = r.squaredNorm();
  int it = 0;
  if (b_norm > 0.0) {
    while (std::sqrt(rr) > kCgTolerance * b_norm) {
      if (it == kCgMaxIterations)
        fail(ErrorCode::SolverDiverged, "CG did not converge in " + std::to_string(kCgMaxIterations) +
                                            " iterations");
      apply_laplacian(m, scale, p, ap);
      const double alpha = rr / p.dot(ap);
      x += alpha * p;
      r -= alpha * ap;
      const double rr_next = r.squaredNorm();
      p = r + (rr_next / rr) * p;
      rr = rr_next;
      ++it;
    }
  }

  CgResult out{Eigen::VectorXd::Zero(grid_n * grid_n), it};
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) out.field[(j + 1) * grid_n + (i + 1)] = x[j * m + i];
  return out;
}

Eigen::MatrixXd reference_hull() {
  Eigen::MatrixXd poly(2, kHullPoints);
  for (int i = 0; i < kHullPoints; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / kHullPoints;
    const double c = std::cos(theta), s = std::sin(theta);
    poly(0, i) = 0.5 + kHullA * std::copysign(std::pow(std::abs(c), 2.0 / kHullExponent), c);
    poly(1, i) = 0.5 + kHullB * std::copysign(std::pow(std::abs(s), 2.0 / kHullExponent), s);
  }
  return poly;
}

FfdLattice hull_lattice() {
  FfdLattice lat({4, 4}, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity());
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 4; ++i)
      if (i == 0 || i == 3 || j == 0 || j == 3) lat.fix(lat.flat_index({i, j}));
  const Eigen::Vector2d ex(1.0, 0.0), ey(0.0, 1.0);
  lat.bind(lat.flat_index({1, 1}), ey, 0);
  lat.bind(lat.flat_index({2, 1}), ey, 1);
  lat.bind(lat.flat_index({1, 2}), ey, 2);
  lat.bind(lat.flat_index({2, 2}), ey, 3);
  lat.bind(lat.flat_index({1, 1}), ex, 4);
  lat.bind(lat.flat_index({1, 2}), ex, 4);
  lat.bind(lat.flat_index({2, 1}), ex, 5);
  lat.bind(lat.flat_index({2, 2}), ex, 5);
  return lat;
}

double polygon_area(const Eigen::MatrixXd& polygon) {
  const auto n = polygon.cols();
  double twice = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = (i + 1) % n;
    twice += polygon(0, i) * polygon(1, k) - polygon(0, k) * polygon(1, i);
  }
  return 0.5 * twice;
}

Eigen::VectorXd resistance_field(const Eigen::MatrixXd& polygon) {
  const auto n = polygon.cols();
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d a = polygon.col((i + n - 1) % n);
    const Eigen::Vector2d b = polygon.col(i);
    const Eigen::Vector2d c = polygon.col((i + 1) % n);
    const Eigen::Vector2d u = b - a, v = c - b, w = c - a;
    const double cross = u.x() * v.y() - u.y() * v.x();
    const double kappa = 2.0 * std::abs(cross) / (u.norm() * v.norm() * w.norm());
    const double s = static_cast<double>(i) / static_cast<double>(n);
    r[i] = kappa * kappa * (1.0 + 0.3 * std::sin(4.0 * std::numbers::pi * s));
  }
  return r;
}

Eigen::VectorXd hull_weights() {
  const auto poly = reference_hull();
  const auto n = poly.cols();
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double back = (poly.col(i) - poly.col((i + n - 1) % n)).norm();
    const double fwd = (poly.col((i + 1) % n) - poly.col(i)).norm();
    w[i] = 0.5 * (back + fwd);
  }
  return w;
}

double area_penalty(const Eigen::MatrixXd& polygon) {
  static const double reference = polygon_area(reference_hull());
  return polygon_area(polygon) < kAreaFloorRatio * reference ? kAreaPenalty : 0.0;
}

FomProblem::FomProblem(FomId id, int grid_n) : id_(id), grid_n_(grid_n) {
  switch (id) {
    case FomId::Poiseuille: {
      space_ = ParameterSpace({{0.1, 10.0}, {0.1, 10.0}});
      field_names_ = {"u_x"};
      coords_["u_x"] = uniform_nodes(kPoiseuilleNodes);
      weights_["u_x"] = trapezoid_weights(kPoiseuilleNodes, 1.0 / (kPoiseuilleNodes - 1));
      break;
    }
    case FomId::Heat2d: {
      if (grid_n < 3) fail(ErrorCode::InvalidArgument, "Heat2d grid needs at least 3 nodes per side");
      space_ = ParameterSpace({{0.5, 2.0}, {0.3, 0.7}});
      field_names_ = {"u"};
      const double h = 1.0 / (grid_n - 1);
      Eigen::MatrixXd xy(grid_n * grid_n, 2);
      const Eigen::VectorXd w1 = trapezoid_weights(grid_n, h);
      Eigen::VectorXd w(grid_n * grid_n);
      for (int j = 0; j < grid_n; ++j)
        for (int i = 0; i < grid_n; ++i) {
          xy.row(j * grid_n + i) << i * h, j * h;
          w[j * grid_n + i] = w1[i] * w1[j];
        }
      coords_["u"] = xy;
      weights_["u"] = w;
      break;
    }
    case FomId::GaussianBump: {
      space_ = ParameterSpace({{0.3, 0.7}, {0.05, 0.2}});
      field_names_ = {"u"};
      coords_["u"] = uniform_nodes(kBumpNodes);
      weights_["u"] = trapezoid_weights(kBumpNodes, 1.0 / (kBumpNodes - 1));
      break;
    }
    case FomId::FfdDrag: {
      space_ = ParameterSpace(std::vector<Bound>(6, Bound{-kHullRange, kHullRange}));
      field_names_ = {"resistance", "drag"};
      lattice_ = hull_lattice();
      hull_ = reference_hull();
      coords_["resistance"] = hull_.transpose();
      weights_["resistance"] = hull_weights();
      coords_["drag"] = Eigen::MatrixXd::Zero(1, 2);
      weights_["drag"] = Eigen::VectorXd::Ones(1);
      break;
    }
  }
}

const Eigen::MatrixXd& FomProblem::coordinates(const std::string& field) const {
  const auto it = coords_.find(field);
  if (it == coords_.end()) fail(ErrorCode::InvalidArgument, "unknown field '" + field + "'");
  return it->second;
}

const Eigen::VectorXd& FomProblem::weights(const std::string& field) const {
  const auto it = weights_.find(field);
  if (it == weights_.end()) fail(ErrorCode::InvalidArgument, "unknown field '" + field + "'");
  return it->second;
}

FieldMap FomProblem::evaluate(const ParameterPoint& mu) const {
  space_.check(mu);
  FieldMap out;
  switch (id_) {
    case FomId::Poiseuille: {
      const Eigen::VectorXd y = uniform_nodes(kPoiseuilleNodes);
      out["u_x"] = (mu[1] / (2.0 * mu[0])) * (y.array() * (1.0 - y.array())).matrix();
      break;
    }
    case FomId::Heat2d:
      out["u"] = solve_heat2d(grid_n_, mu[0], heat2d_source(grid_n_, mu[1])).field;
      break;
    case FomId::GaussianBump: {
      const Eigen::VectorXd x = uniform_nodes(kBumpNodes);
      out["u"] = (-(x.array() - mu[0]).square() / (2.0 * mu[1] * mu[1])).exp().matrix();
      break;
    }
    case FomId::FfdDrag: {
      const Eigen::VectorXd r = resistance_field(deformed_hull(mu));
      out["drag"] = Eigen::VectorXd::Constant(1, weights_.at("resistance").dot(r));
      out["resistance"] = r;
      break;
    }
  }
  return out;
}

Eigen::MatrixXd FomProblem::deformed_hull(const ParameterPoint& mu) const {
  if (id_ != FomId::FfdDrag) fail(ErrorCode::InvalidArgument, "only ffd-drag has a hull");
  return deform(*lattice_, mu, hull_);
}

double FomProblem::drag_objective(const ParameterPoint& mu) const {
  space_.check(mu);
  const auto poly = deformed_hull(mu);
  return weights_.at("resistance").dot(resistance_field(poly)) + area_penalty(poly);
}

std::map<std::string, SnapshotMatrix> generate_snapshots(const FomProblem& fom,
                                                         const std::vector<ParameterPoint>& params) {
  if (params.empty()) fail(ErrorCode::CountTooSmall, "no parameter points");
  std::map<std::string, SnapshotMatrix> out;
  const auto n = static_cast<Eigen::Index>(params.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    auto fields = fom.evaluate(params[static_cast<std::size_t>(j)]);
    for (auto& [name, values] : fields) {
      auto& sm = out[name];
      if (sm.data.size() == 0) {
        sm.data.resize(values.size(), n);
        sm.params = params;
        sm.weights = fom.weights(name);
      }
      sm.data.col(j) = values;
    }
  }
  for (auto& [name, sm] : out) validate(sm);
  return out;
}

}  // namespace podsurf
