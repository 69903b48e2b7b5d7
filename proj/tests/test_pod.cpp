#include "helpers.hpp"
#include "podsurf/pod.hpp"

#include <doctest.h>

#include <cmath>

using namespace podsurf;

namespace {

// Two-sided Jacobi SVD, used only as a reference.
Eigen::JacobiSVD<Eigen::MatrixXd> oracle(const Eigen::MatrixXd& y) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(y, Eigen::ComputeThinU);
}

double orthonormality_error(const PodBasis& b) {
  const auto r = static_cast<Eigen::Index>(b.rank());
  return (b.modes.transpose() * b.modes - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("repeated snapshot gives one mode") {
  Eigen::MatrixXd y(3, 3);
  for (int j = 0; j < 3; ++j) y.col(j) = Eigen::Vector3d(3, 4, 0);
  const auto b = compute_pod(y, RankTruncation{3});
  REQUIRE(b.rank() == 1);
  CHECK(b.modes(0, 0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(b.modes(1, 0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(std::abs(b.modes(2, 0)) < 1e-15);
  CHECK(b.singular_values[0] == doctest::Approx(5.0 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(retained_energy(b, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identity columns give canonical modes") {
  Eigen::MatrixXd y(3, 2);
  y << 1, 0, 0, 1, 0, 0;
  const auto b = compute_pod(y, RankTruncation{2});
  REQUIRE(b.rank() == 2);
  CHECK(b.singular_values[0] == doctest::Approx(1.0));
  CHECK(b.singular_values[1] == doctest::Approx(1.0));
  // Sign-normalized: each mode's largest entry is +1.
  for (Eigen::Index j = 0; j < 2; ++j) CHECK(b.modes.col(j).maxCoeff() == doctest::Approx(1.0));
  CHECK((b.modes.transpose() * b.modes - Eigen::Matrix2d::Identity()).norm() < 1e-14);
}

TEST_CASE("rank and argument errors") {
  const auto y = testing::random_matrix(6, 4, 1);
  CHECK_CODE(compute_pod(y, RankTruncation{5}), ErrorCode::RankTooLarge);
  CHECK_CODE(compute_pod(y, RankTruncation{0}), ErrorCode::InvalidArgument);
  CHECK_CODE(compute_pod(y, EnergyTruncation{0.0}), ErrorCode::InvalidArgument);
  CHECK_CODE(compute_pod(y, EnergyTruncation{1.5}), ErrorCode::InvalidArgument);
  CHECK_CODE(compute_pod(Eigen::MatrixXd::Zero(4, 3), RankTruncation{1}), ErrorCode::DegenerateMatrix);
}

TEST_CASE("seeded 6x4 matrix matches the oracle") {
  const auto y = testing::random_matrix(6, 4, 2024);
  const auto b = compute_pod(y, RankTruncation{4});
  const auto svd = oracle(y);
  REQUIRE(b.rank() == 4);
  CHECK((b.singular_values - svd.singularValues()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(testing::max_diff_up_to_sign(b.modes, svd.matrixU()) < 1e-8);

  // Truncated projection residual equals the discarded energy.
  const auto b2 = compute_pod(y, RankTruncation{2});
  const Eigen::MatrixXd rec = b2.modes * project_all(b2, y);
  const double resid = (y - rec).squaredNorm();
  const double tail = svd.singularValues().tail(2).squaredNorm();
  CHECK(std::abs(resid - tail) <= 1e-8 * tail);
}

TEST_CASE("project and reconstruct on a canonical basis") {
  PodBasis b;
  b.modes = Eigen::MatrixXd::Zero(3, 2);
  b.modes(0, 0) = 1;
  b.modes(1, 1) = 1;
  b.singular_values = Eigen::Vector2d(1, 1);
  b.full_spectrum = b.singular_values;
  CHECK(project(b, Eigen::Vector3d(2, 5, 9)) == Eigen::Vector2d(2, 5));
  CHECK(project(b, Eigen::Vector3d(0, 0, 7)) == Eigen::Vector2d(0, 0));
  CHECK(reconstruct(b, Eigen::Vector2d(2, 5)) == Eigen::Vector3d(2, 5, 0));
  CHECK(reconstruct(b, Eigen::Vector2d::Zero()) == Eigen::Vector3d::Zero());
}

TEST_CASE("full-rank projection reproduces training columns") {
  const auto y = testing::random_matrix(10, 5, 77);
  const auto b = compute_pod(y, RankTruncation{5});
  for (Eigen::Index j = 0; j < 5; ++j) {
    const Eigen::VectorXd r = reconstruct(b, project(b, y.col(j)));
    CHECK((r - y.col(j)).norm() <= 1e-9 * y.col(j).norm());
  }
}

TEST_CASE("retained energy") {
  PodBasis b;
  b.full_spectrum = Eigen::Vector2d(2, 1);
  b.singular_values = b.full_spectrum;
  b.modes = Eigen::MatrixXd::Identity(2, 2);
  CHECK(retained_energy(b, 1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(retained_energy(b, 2) == 1.0);
  CHECK_CODE(retained_energy(b, 0), ErrorCode::IndexOutOfRange);
  CHECK_CODE(retained_energy(b, 3), ErrorCode::IndexOutOfRange);
}

TEST_CASE("energy truncation picks the smallest sufficient rank") {
  const auto y = testing::random_matrix(12, 6, 9);
  const auto full = compute_pod(y, RankTruncation{6});
  for (double f : {0.3, 0.6, 0.9, 0.99, 1.0}) {
    const auto b = compute_pod(y, EnergyTruncation{f});
    const auto k = b.rank();
    CHECK(retained_energy(full, k) >= f - 1e-15);
    if (k > 1) CHECK(retained_energy(full, k - 1) < f);
  }
}

TEST_CASE("rank-deficient input drops null modes") {
  const auto a = testing::random_matrix(20, 2, 5);
  const auto c = testing::random_matrix(2, 6, 6);
  const Eigen::MatrixXd y = a * c;  // rank 2
  const auto b = compute_pod(y, RankTruncation{6});
  CHECK(b.rank() == 2);
  CHECK(b.full_spectrum.size() == 6);
  CHECK(orthonormality_error(b) <= 1e-10);
}

TEST_CASE("centering stores and restores the mean") {
  const auto y = testing::random_matrix(8, 5, 31);
  PodOptions opt;
  opt.center = true;
  const auto b = compute_pod(y, RankTruncation{4}, opt);
  CHECK(b.centered());
  CHECK((b.mean - y.rowwise().mean()).norm() < 1e-15);
  // n centered columns have rank n-1, so 4 modes reproduce them.
  for (Eigen::Index j = 0; j < 5; ++j)
    CHECK((reconstruct(b, project(b, y.col(j))) - y.col(j)).norm() < 1e-12);
}

TEST_CASE("property: orthonormality, ordering, Eckart-Young and oracle agreement") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    SplitMix64 rng(seed);
    const auto N = static_cast<Eigen::Index>(2 + rng.below(49));
    const auto n = static_cast<Eigen::Index>(1 + rng.below(20));
    const auto y = testing::random_matrix(N, n, seed);
    const auto kmax = static_cast<std::size_t>(std::min(N, n));
    const auto r = 1 + static_cast<std::size_t>(rng.below(kmax));
    const auto b = compute_pod(y, RankTruncation{r});
    const auto svd = oracle(y);

    CHECK(orthonormality_error(b) <= 1e-10);
    for (Eigen::Index i = 1; i < b.singular_values.size(); ++i)
      CHECK(b.singular_values[i] <= b.singular_values[i - 1]);
    CHECK((b.full_spectrum - svd.singularValues()).cwiseAbs().maxCoeff() <=
          1e-12 * svd.singularValues()[0]);

    const double resid = (y - b.modes * (b.modes.transpose() * y)).squaredNorm();
    const double tail = svd.singularValues().tail(static_cast<Eigen::Index>(kmax - b.rank())).squaredNorm();
    CHECK(std::abs(resid - tail) <= 1e-8 * std::max(tail, 1e-300) + 1e-24 * y.squaredNorm());

    CHECK(testing::max_diff_up_to_sign(b.modes, svd.matrixU().leftCols(b.modes.cols())) <= 1e-8);
  }
}

TEST_CASE("sign rule and determinism") {
  const auto y = testing::random_matrix(15, 7, 3);
  const auto a = compute_pod(y, RankTruncation{7});
  const auto b = compute_pod(y, RankTruncation{7});
  CHECK(a.modes == b.modes);
  CHECK(a.singular_values == b.singular_values);
  for (Eigen::Index j = 0; j < a.modes.cols(); ++j) {
    Eigen::Index at = 0;
    a.modes.col(j).cwiseAbs().maxCoeff(&at);
    CHECK(a.modes(at, j) > 0.0);
  }

  Eigen::MatrixXd tie(2, 1);
  tie << -1.0, 1.0;
  normalize_signs(tie);
  CHECK(tie(0, 0) == 1.0);  // tie goes to the first index
}
