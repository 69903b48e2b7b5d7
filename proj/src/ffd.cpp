#include "podsurf/error.hpp"
#include "podsurf/shapeopt.hpp"

#include <cmath>
#include <string>

namespace podsurf {

double bernstein(int i, int n, double t) {
  if (n < 0 || i < 0 || i > n)
    fail(ErrorCode::IndexOutOfRange, "Bernstein index " + std::to_string(i) + " of degree " +
                                         std::to_string(n));
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::InvalidArgument, "Bernstein argument outside [0, 1]");
  double binom = 1.0;
  for (int k = 1; k <= i; ++k) binom = binom * (n - i + k) / k;
  return binom * std::pow(t, i) * std::pow(1.0 - t, n - i);
}

FfdLattice::FfdLattice(std::vector<std::size_t> counts, Eigen::VectorXd origin, Eigen::MatrixXd axes)
    : counts_(std::move(counts)), origin_(std::move(origin)), axes_(std::move(axes)) {
  const auto d = counts_.size();
  if (d != 2 && d != 3) fail(ErrorCode::UnsupportedDimension, "FFD lattices are 2D or 3D");
  for (auto c : counts_)
    if (c < 2) fail(ErrorCode::InvalidArgument, "each lattice axis needs at least 2 controls");
  if (static_cast<std::size_t>(origin_.size()) != d || static_cast<std::size_t>(axes_.rows()) != d ||
      static_cast<std::size_t>(axes_.cols()) != d)
    fail(ErrorCode::DimensionMismatch, "origin/axes do not match the lattice dimension");
  const double det = axes_.determinant();
  const double scale = axes_.colwise().norm().prod();
  if (!std::isfinite(det) || std::abs(det) <= 1e-12 * scale || !(scale > 0.0))
    fail(ErrorCode::DegenerateGeometry, "embedding box is degenerate");
  axes_inverse_ = axes_.inverse();
  fixed_.assign(n_controls(), false);
}

std::size_t FfdLattice::n_controls() const {
  std::size_t n = 1;
  for (auto c : counts_) n *= c;
  return n;
}

std::size_t FfdLattice::n_parameters() const {
  std::size_t n = 0;
  for (const auto& b : bindings_) n = std::max(n, b.parameter + 1);
  return n;
}

// Axis 0 varies fastest.
std::size_t FfdLattice::flat_index(const std::vector<std::size_t>& multi) const {
  if (multi.size() != dim()) fail(ErrorCode::DimensionMismatch, "lattice index has wrong arity");
  std::size_t flat = 0, stride = 1;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (multi[k] >= counts_[k]) fail(ErrorCode::IndexOutOfRange, "lattice index out of range");
    flat += multi[k] * stride;
    stride *= counts_[k];
  }
  return flat;
}

std::vector<std::size_t> FfdLattice::multi_index(std::size_t flat) const {
  if (flat >= n_controls()) fail(ErrorCode::IndexOutOfRange, "control index out of range");
  std::vector<std::size_t> multi(dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    multi[k] = flat % counts_[k];
    flat /= counts_[k];
  }
  return multi;
}

void FfdLattice::fix(std::size_t control) {
  if (control >= n_controls()) fail(ErrorCode::IndexOutOfRange, "control index out of range");
  for (const auto& b : bindings_)
    if (b.control == control) fail(ErrorCode::InvalidArgument, "cannot fix a bound control");
  fixed_[control] = true;
}

void FfdLattice::bind(std::size_t control, const Eigen::VectorXd& direction, std::size_t parameter) {
  if (control >= n_controls()) fail(ErrorCode::IndexOutOfRange, "control index out of range");
  if (fixed_[control]) fail(ErrorCode::InvalidArgument, "cannot bind a fixed control");
  if (static_cast<std::size_t>(direction.size()) != dim())
    fail(ErrorCode::DimensionMismatch, "direction has wrong dimension");
  const double norm = direction.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) fail(ErrorCode::InvalidArgument, "zero direction");
  bindings_.push_back({control, direction / norm, parameter});
}

Eigen::VectorXd FfdLattice::base_point(std::size_t control) const {
  const auto multi = multi_index(control);
  Eigen::VectorXd p = origin_;
  for (std::size_t k = 0; k < dim(); ++k)
    p += (static_cast<double>(multi[k]) / static_cast<double>(counts_[k] - 1)) *
         axes_.col(static_cast<Eigen::Index>(k));
  return p;
}

Eigen::MatrixXd FfdLattice::displacements(const ParameterPoint& mu) const {
  if (static_cast<std::size_t>(mu.size()) < n_parameters())
    fail(ErrorCode::DimensionMismatch, "mu has fewer entries than bound parameters");
  Eigen::MatrixXd disp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim()),
                                               static_cast<Eigen::Index>(n_controls()));
  for (const auto& b : bindings_)
    disp.col(static_cast<Eigen::Index>(b.control)) +=
        mu[static_cast<Eigen::Index>(b.parameter)] * b.direction;
  return disp;
}

Eigen::MatrixXd FfdLattice::control_points(const ParameterPoint& mu) const {
  Eigen::MatrixXd pts = displacements(mu);
  for (std::size_t c = 0; c < n_controls(); ++c) pts.col(static_cast<Eigen::Index>(c)) += base_point(c);
  return pts;
}

std::optional<Eigen::VectorXd> FfdLattice::local_coords(const Eigen::VectorXd& x) const {
  Eigen::VectorXd s = axes_inverse_ * (x - origin_);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] < -1e-12 || s[k] > 1.0 + 1e-12) return std::nullopt;
    s[k] = std::clamp(s[k], 0.0, 1.0);
  }
  return s;
}

Eigen::MatrixXd deform(const FfdLattice& lattice, const ParameterPoint& mu,
                       const Eigen::MatrixXd& points) {
  const auto d = lattice.dim();
  if (static_cast<std::size_t>(points.rows()) != d)
    fail(ErrorCode::DimensionMismatch, "points have the wrong dimension");
  if (!mu.allFinite()) fail(ErrorCode::NonFinite, "mu contains non-finite values");
  const Eigen::MatrixXd disp = lattice.displacements(mu);
  const auto& counts = lattice.counts();

  // Only controls that actually move contribute.
  std::vector<std::size_t> moving;
  for (std::size_t c = 0; c < lattice.n_controls(); ++c)
    if (disp.col(static_cast<Eigen::Index>(c)).squaredNorm() > 0.0) moving.push_back(c);
  std::vector<std::vector<std::size_t>> moving_multi;
  for (auto c : moving) moving_multi.push_back(lattice.multi_index(c));

  Eigen::MatrixXd out = points;
  if (moving.empty()) return out;
  std::vector<std::vector<double>> basis(d);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const auto s = lattice.local_coords(points.col(j));
    if (!s) continue;
    for (std::size_t k = 0; k < d; ++k) {
      const int degree = static_cast<int>(counts[k]) - 1;
      basis[k].resize(counts[k]);
      for (int i = 0; i <= degree; ++i)
        basis[k][static_cast<std::size_t>(i)] = bernstein(i, degree, (*s)[static_cast<Eigen::Index>(k)]);
    }
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t m = 0; m < moving.size(); ++m) {
      double w = 1.0;
      for (std::size_t k = 0; k < d; ++k) w *= basis[k][moving_multi[m][k]];
      shift += w * disp.col(static_cast<Eigen::Index>(moving[m]));
    }
    out.col(j) += shift;
  }
  return out;
}

}  // namespace podsurf
