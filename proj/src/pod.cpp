#include "podsurf/pod.hpp"

#include "podsurf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace podsurf {

namespace {

constexpr double kZeroSigmaRatio = 1e-12;
constexpr double kDegenerateFloor = 1e-14;
constexpr int kMaxSweeps = 80;

// One-sided (Hestenes) Jacobi: rotate column pairs of a square matrix until
// all pairs are numerically orthogonal. On return a = U * diag(sigma).
void orthogonalize_columns(Eigen::MatrixXd& a) {
  const auto k = a.cols();
  const double tol = 4.0 * std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        const double alpha = a.col(i).squaredNorm();
        const double beta = a.col(j).squaredNorm();
        const double gamma = a.col(i).dot(a.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          const double ai = a(r, i);
          const double aj = a(r, j);
          a(r, i) = c * ai - s * aj;
          a(r, j) = s * ai + c * aj;
        }
      }
    }
    if (!rotated) return;
  }
}

void require_finite(const Eigen::MatrixXd& y) {
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      if (!std::isfinite(y(i, j)))
        throw Error(ErrorCode::NonFinite,
                    "non-finite entry at (" + std::to_string(i) + "," + std::to_string(j) + ")",
                    static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

}  // namespace

ThinSvd thin_svd(const Eigen::MatrixXd& y) {
  const auto rows = y.rows();
  const auto cols = y.cols();
  const auto k = std::min(rows, cols);

  Eigen::MatrixXd a;
  Eigen::MatrixXd q;
  if (rows >= cols) {
    // y = Q R; the left singular vectors of y are Q times those of R.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    a = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  } else {
    // y^T = Q R, so y = R^T Q^T and y shares left singular vectors with R^T.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y.transpose());
    a = qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
    a.transposeInPlace();
  }
  orthogonalize_columns(a);

  Eigen::VectorXd sigma(k);
  for (Eigen::Index i = 0; i < k; ++i) sigma[i] = a.col(i).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return sigma[l] > sigma[r]; });

  Eigen::MatrixXd u(a.rows(), k);
  ThinSvd out;
  out.values.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto src = order[static_cast<std::size_t>(c)];
    out.values[c] = sigma[src];
    if (sigma[src] > 0.0)
      u.col(c) = a.col(src) / sigma[src];
    else
      u.col(c).setZero();
  }
  out.left = rows >= cols ? Eigen::MatrixXd(q * u) : u;
  return out;
}

void normalize_signs(Eigen::MatrixXd& columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
      const double v = std::abs(columns(r, c));
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    if (columns.rows() > 0 && columns(arg, c) < 0.0) columns.col(c) *= -1.0;
  }
}

PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const Truncation& truncation,
                     const PodOptions& options) {
  if (snapshots.rows() < 1 || snapshots.cols() < 1)
    fail(ErrorCode::DimensionMismatch, "empty snapshot matrix");
  require_finite(snapshots);

  PodBasis basis;
  Eigen::MatrixXd y = snapshots;
  if (options.center) {
    basis.mean = y.rowwise().mean();
    y.colwise() -= basis.mean;
  }
  const auto max_rank = static_cast<std::size_t>(std::min(y.rows(), y.cols()));

  std::size_t requested = 0;
  if (const auto* r = std::get_if<RankTruncation>(&truncation)) {
    if (r->rank < 1) fail(ErrorCode::InvalidArgument, "rank must be >= 1");
    if (r->rank > max_rank)
      fail(ErrorCode::RankTooLarge, "rank " + std::to_string(r->rank) + " exceeds min(n, N) = " +
                                        std::to_string(max_rank));
    requested = r->rank;
  } else {
    const double f = std::get<EnergyTruncation>(truncation).fraction;
    if (!(f > 0.0 && f <= 1.0)) fail(ErrorCode::InvalidArgument, "energy fraction must be in (0, 1]");
  }

  const double max_entry = y.cwiseAbs().maxCoeff();
  auto svd = thin_svd(y);
  if (max_entry == 0.0 || svd.values[0] <= kDegenerateFloor * max_entry)
    fail(ErrorCode::DegenerateMatrix, "snapshot matrix has no significant singular value");

  basis.full_spectrum = svd.values;
  if (requested == 0) {
    const double f = std::get<EnergyTruncation>(truncation).fraction;
    const double total = svd.values.squaredNorm();
    double acc = 0.0;
    requested = max_rank;
    for (std::size_t k = 0; k < max_rank; ++k) {
      acc += svd.values[static_cast<Eigen::Index>(k)] * svd.values[static_cast<Eigen::Index>(k)];
      if (acc / total >= f) {
        requested = k + 1;
        break;
      }
    }
  }

  std::size_t rank = 0;
  const double floor = kZeroSigmaRatio * svd.values[0];
  while (rank < requested && svd.values[static_cast<Eigen::Index>(rank)] > floor) ++rank;

  const auto r = static_cast<Eigen::Index>(rank);
  basis.modes = svd.left.leftCols(r);
  normalize_signs(basis.modes);
  basis.singular_values = svd.values.head(r);
  return basis;
}

PodBasis compute_pod(const SnapshotMatrix& sm, const Truncation& truncation,
                     const PodOptions& options) {
  validate(sm);
  return compute_pod(sm.data, truncation, options);
}

Eigen::VectorXd project(const PodBasis& basis, const Eigen::VectorXd& field) {
  if (static_cast<std::size_t>(field.size()) != basis.n_dof())
    fail(ErrorCode::DimensionMismatch, "field length " + std::to_string(field.size()) +
                                           " differs from N = " + std::to_string(basis.n_dof()));
  if (!field.allFinite()) fail(ErrorCode::NonFinite, "field contains non-finite values");
  if (basis.centered()) return basis.modes.transpose() * (field - basis.mean);
  return basis.modes.transpose() * field;
}

Eigen::MatrixXd project_all(const PodBasis& basis, const Eigen::MatrixXd& fields) {
  if (static_cast<std::size_t>(fields.rows()) != basis.n_dof())
    fail(ErrorCode::DimensionMismatch, "field length differs from N");
  if (basis.centered()) return basis.modes.transpose() * (fields.colwise() - basis.mean);
  return basis.modes.transpose() * fields;
}

Eigen::VectorXd reconstruct(const PodBasis& basis, const Eigen::VectorXd& coefficients) {
  if (static_cast<std::size_t>(coefficients.size()) != basis.rank())
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(basis.rank()) +
                                           " coefficients, got " +
                                           std::to_string(coefficients.size()));
  if (!coefficients.allFinite()) fail(ErrorCode::NonFinite, "coefficients contain non-finite values");
  Eigen::VectorXd field = basis.modes * coefficients;
  if (basis.centered()) field += basis.mean;
  return field;
}

double retained_energy(const PodBasis& basis, std::size_t k) {
  const auto len = static_cast<std::size_t>(basis.full_spectrum.size());
  if (k < 1 || k > len)
    fail(ErrorCode::IndexOutOfRange, "k must lie in [1, " + std::to_string(len) + "]");
  const double total = basis.full_spectrum.squaredNorm();
  if (k == len) return 1.0;
  return basis.full_spectrum.head(static_cast<Eigen::Index>(k)).squaredNorm() / total;
}

}  // namespace podsurf
