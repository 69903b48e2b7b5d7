#include "helpers.hpp"
#include "podsurf/fom.hpp"
#include "podsurf/pod.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace podsurf;

namespace {

// Dense assembly of -kappa * Laplace on the interior nodes, solved by LU.
Eigen::VectorXd heat_oracle(int n, double kappa, const Eigen::VectorXd& f) {
  const int m = n - 2;
  const double h = 1.0 / (n - 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m * m, m * m);
  Eigen::VectorXd b(m * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int k = j * m + i;
      a(k, k) = 4.0;
      if (i > 0) a(k, k - 1) = -1.0;
      if (i + 1 < m) a(k, k + 1) = -1.0;
      if (j > 0) a(k, k - m) = -1.0;
      if (j + 1 < m) a(k, k + m) = -1.0;
      b[k] = f[(j + 1) * n + i + 1];
    }
  a *= kappa / (h * h);
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n * n);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) u[(j + 1) * n + i + 1] = x[j * m + i];
  return u;
}

struct LexLess {
  bool operator()(const ParameterPoint& a, const ParameterPoint& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

}  // namespace

TEST_CASE("fom ids") {
  for (auto id : {FomId::Poiseuille, FomId::Heat2d, FomId::GaussianBump, FomId::FfdDrag})
    CHECK(parse_fom_id(to_string(id)) == id);
  CHECK_CODE(parse_fom_id("stokes"), ErrorCode::InvalidArgument);
}

TEST_CASE("poiseuille closed form") {
  const FomProblem fom(FomId::Poiseuille);
  const auto u = fom.evaluate(Eigen::Vector2d(1.0, 2.0)).at("u_x");
  REQUIRE(u.size() == 101);
  CHECK(u[50] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(u[0] == 0.0);
  CHECK(u[100] == 0.0);
  CHECK(fom.weights("u_x").sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_CODE(fom.evaluate(Eigen::Vector2d(0.01, 2.0)), ErrorCode::OutOfBounds);
  CHECK_CODE(fom.evaluate(Eigen::Vector3d(1, 1, 1)), ErrorCode::DimensionMismatch);
}

TEST_CASE("poiseuille snapshots are exactly rank one") {
  const FomProblem fom(FomId::Poiseuille);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto params = sample_space(fom.space(), RandomSampling{}, 20, seed);
    const auto sm = generate_snapshots(fom, params).at("u_x");
    const auto b = compute_pod(sm, RankTruncation{1});
    CHECK(b.full_spectrum[1] / b.full_spectrum[0] <= 1e-12);
  }
}

TEST_CASE("gaussian bump peak") {
  const FomProblem fom(FomId::GaussianBump);
  for (double s : {0.05, 0.1, 0.2}) {
    const auto u = fom.evaluate(Eigen::Vector2d(0.5, s)).at("u");
    // x = 0.5 is not a node of the 200-point grid; the nearest ones bracket it.
    CHECK(u.maxCoeff() <= 1.0);
    CHECK(std::exp(-std::pow(0.5 / 199, 2) / (2 * s * s)) == doctest::Approx(u[99]).epsilon(1e-14));
  }
  // With the centre on a node the peak is exactly 1.
  const double node = 60.0 / 199.0;
  CHECK(fom.evaluate(Eigen::Vector2d(node, 0.1)).at("u")[60] == 1.0);
}

TEST_CASE("heat2d matches a dense direct solve on a 16x16 grid") {
  const FomProblem fom(FomId::Heat2d, 16);
  SplitMix64 rng(123);
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector2d mu(rng.uniform(0.5, 2.0), rng.uniform(0.3, 0.7));
    const auto u = fom.evaluate(mu).at("u");
    const auto expect = heat_oracle(16, mu[0], heat2d_source(16, mu[1]));
    CHECK((u - expect).cwiseAbs().maxCoeff() <= 1e-8 * expect.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("heat2d is linear in the source") {
  const auto f = heat2d_source(32, 0.45);
  const auto a = solve_heat2d(32, 1.3, f).field;
  const auto b = solve_heat2d(32, 1.3, 3.0 * f).field;
  CHECK((b - 3.0 * a).norm() <= 1e-9 * b.norm());
  const auto c = solve_heat2d(32, 2.6, f).field;
  CHECK((2.0 * c - a).norm() <= 1e-9 * a.norm());
  CHECK(solve_heat2d(8, 1.0, Eigen::VectorXd::Zero(64)).field.isZero());
  CHECK_CODE(solve_heat2d(8, 0.0, Eigen::VectorXd::Zero(64)), ErrorCode::InvalidArgument);
  CHECK_CODE(solve_heat2d(8, 1.0, Eigen::VectorXd::Zero(63)), ErrorCode::DimensionMismatch);
}

TEST_CASE("evaluate is pure") {
  for (auto id : {FomId::Poiseuille, FomId::Heat2d, FomId::GaussianBump, FomId::FfdDrag}) {
    const FomProblem fom(id, 24);
    const auto mu = sample_space(fom.space(), RandomSampling{}, 1, 5).front();
    CHECK(fom.evaluate(mu) == fom.evaluate(mu));
  }
}

TEST_CASE("ffd-drag fields") {
  const FomProblem fom(FomId::FfdDrag);
  CHECK(fom.n_params() == 6);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(6);
  const auto f = fom.evaluate(zero);
  CHECK(f.at("resistance").size() == kHullPoints);
  CHECK(f.at("drag")[0] == doctest::Approx(fom.weights("resistance").dot(f.at("resistance"))));
  CHECK(fom.drag_objective(zero) == f.at("drag")[0]);
  CHECK(fom.deformed_hull(zero) == reference_hull());
  CHECK(polygon_area(reference_hull()) > 0.0);
  CHECK(area_penalty(reference_hull()) == 0.0);
  CHECK(area_penalty(0.9 * (reference_hull().array() - 0.5).matrix()) == kAreaPenalty);
  CHECK_CODE(FomProblem(FomId::Heat2d).deformed_hull(Eigen::Vector2d(1, 0.5)), ErrorCode::InvalidArgument);

  // A circle of radius R has Menger curvature 1/R at every vertex.
  Eigen::MatrixXd circle(2, 64);
  for (int i = 0; i < 64; ++i)
    circle.col(i) << 2.0 * std::cos(2 * std::numbers::pi * i / 64), 2.0 * std::sin(2 * std::numbers::pi * i / 64);
  const auto r = resistance_field(circle);
  CHECK(r[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r[8] == doctest::Approx(0.25 * 1.3).epsilon(1e-12));  // s = 1/8
}

TEST_CASE("generate snapshots carries weights") {
  const FomProblem fom(FomId::FfdDrag);
  const auto params = sample_space(fom.space(), VerticesPlusRandom{}, 70, 1);
  const auto snaps = generate_snapshots(fom, params);
  CHECK(snaps.size() == 2);
  CHECK(snaps.at("resistance").n_snap() == 70);
  CHECK(*snaps.at("resistance").weights == fom.weights("resistance"));
  CHECK(snaps.at("drag").n_dof() == 1);
  CHECK_CODE(generate_snapshots(fom, {}), ErrorCode::CountTooSmall);
}

TEST_CASE("sampling strategies") {
  const ParameterSpace six(std::vector<Bound>(6, Bound{-1.0, 1.0}));
  const auto v = sample_space(six, VerticesPlusRandom{}, 100, 3);
  REQUIRE(v.size() == 100);
  std::set<ParameterPoint, LexLess> corners;
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(v[i].cwiseAbs() == Eigen::VectorXd::Ones(6));
    corners.insert(v[i]);
  }
  CHECK(corners.size() == 64);
  for (std::size_t i = 64; i < 100; ++i) CHECK(v[i].cwiseAbs().maxCoeff() < 1.0);
  CHECK_CODE(sample_space(six, VerticesPlusRandom{}, 63, 3), ErrorCode::CountTooSmall);

  const ParameterSpace two({{0.0, 1.0}, {2.0, 4.0}});
  const auto g = sample_space(two, parse_strategy("grid:3x3"), 9, 0);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == Eigen::Vector2d(0.0, 2.0));
  CHECK(g.back() == Eigen::Vector2d(1.0, 4.0));
  CHECK(g[4] == Eigen::Vector2d(0.5, 3.0));
  CHECK_CODE(sample_space(two, GridSampling{{3, 3}}, 8, 0), ErrorCode::CountTooSmall);
  CHECK_CODE(sample_space(two, GridSampling{{3}}, 3, 0), ErrorCode::DimensionMismatch);

  const auto r1 = sample_space(two, RandomSampling{}, 50, 7);
  CHECK(r1 == sample_space(two, RandomSampling{}, 50, 7));
  CHECK(r1 != sample_space(two, RandomSampling{}, 50, 8));
  CHECK(std::set<ParameterPoint, LexLess>(r1.begin(), r1.end()).size() == 50);
  for (const auto& x : r1) {
    CHECK(x[0] > 0.0);
    CHECK(x[0] < 1.0);
    CHECK(x[1] > 2.0);
    CHECK(x[1] < 4.0);
  }
  CHECK_CODE(sample_space(two, RandomSampling{}, 0, 7), ErrorCode::CountTooSmall);
  CHECK_CODE(parse_strategy("sobol"), ErrorCode::InvalidArgument);
  CHECK_CODE(parse_strategy("grid:3xq"), ErrorCode::InvalidArgument);
}

TEST_CASE("rng is bit exact") {
  // Reference outputs of the published SplitMix64 for seed 1234567.
  SplitMix64 g(1234567);
  CHECK(g.next() == 6457827717110365317ULL);
  CHECK(g.next() == 3203168211198807973ULL);
  CHECK(g.next() == 9817491932198370423ULL);
  SplitMix64 u(0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform_open();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
}
