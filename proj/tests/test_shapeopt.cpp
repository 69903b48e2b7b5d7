#include "helpers.hpp"
#include "podsurf/study.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace podsurf;

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

FfdLattice square_lattice(std::size_t l) {
  return FfdLattice({l, l}, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity());
}

Eigen::MatrixXd random_points_in_box(int k, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::MatrixXd p(2, k);
  for (int i = 0; i < k; ++i) p.col(i) << rng.uniform(), rng.uniform();
  return p;
}

}  // namespace

TEST_CASE("bernstein polynomials") {
  CHECK(bernstein(0, 2, 0.5) == 0.25);
  CHECK(bernstein(1, 3, 0.3) == doctest::Approx(3 * 0.3 * 0.49).epsilon(1e-15));
  CHECK(bernstein(3, 3, 1.0) == 1.0);
  CHECK(bernstein(0, 3, 1.0) == 0.0);
  for (int n : {1, 2, 3, 5, 9})
    for (double t : {0.0, 0.17, 0.5, 0.83, 1.0}) {
      double s = 0.0;
      for (int i = 0; i <= n; ++i) s += bernstein(i, n, t);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
  CHECK_CODE(bernstein(4, 3, 0.5), ErrorCode::IndexOutOfRange);
  CHECK_CODE(bernstein(-1, 3, 0.5), ErrorCode::IndexOutOfRange);
  CHECK_CODE(bernstein(1, 3, 1.5), ErrorCode::InvalidArgument);
}

TEST_CASE("lattice indexing and constraints") {
  FfdLattice lat({3, 4, 2}, Eigen::Vector3d(1, 2, 3), Eigen::Matrix3d::Identity() * 2.0);
  CHECK(lat.n_controls() == 24);
  for (std::size_t k = 0; k < 24; ++k) CHECK(lat.flat_index(lat.multi_index(k)) == k);
  CHECK(lat.flat_index({1, 0, 0}) == 1);  // axis 0 runs fastest
  CHECK((lat.base_point(lat.flat_index({2, 3, 1})) - Eigen::Vector3d(3, 4, 5)).norm() < 1e-15);

  lat.fix(0);
  CHECK_CODE(lat.bind(0, Eigen::Vector3d::UnitX(), 0), ErrorCode::InvalidArgument);
  lat.bind(1, Eigen::Vector3d::UnitX(), 0);
  CHECK_CODE(lat.fix(1), ErrorCode::InvalidArgument);
  CHECK_CODE(lat.bind(2, Eigen::Vector3d::Zero(), 0), ErrorCode::InvalidArgument);
  CHECK(lat.n_parameters() == 1);
  CHECK_CODE(FfdLattice({1, 3}, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()),
             ErrorCode::InvalidArgument);
}

TEST_CASE("zero displacement is the exact identity") {
  auto lat = square_lattice(4);
  lat.bind(5, Eigen::Vector2d(0.3, 0.4).normalized(), 0);
  lat.bind(10, Eigen::Vector2d::UnitY(), 1);
  Eigen::MatrixXd pts = random_points_in_box(30, 1);
  pts.col(0) << 2.0, -1.0;  // outside the box
  CHECK(deform(lat, Eigen::Vector2d::Zero(), pts) == pts);
  const auto moved = deform(lat, Eigen::Vector2d(0.1, -0.2), pts);
  CHECK(moved.col(0) == pts.col(0));
}

TEST_CASE("corner control moves its corner by exactly the displacement") {
  auto lat = square_lattice(3);
  const Eigen::Vector2d dir(0.6, 0.8);
  lat.bind(lat.flat_index({2, 2}), dir, 0);
  Eigen::MatrixXd corner(2, 1);
  corner << 1.0, 1.0;
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, 0.25);
  const Eigen::Vector2d v = lat.displacements(mu).col(static_cast<Eigen::Index>(lat.flat_index({2, 2})));
  CHECK((v - 0.25 * dir).norm() <= 1e-16);
  const auto out = deform(lat, mu, corner);
  CHECK(out(0, 0) == 1.0 + v[0]);
  CHECK(out(1, 0) == 1.0 + v[1]);
}

TEST_CASE("deform matches the tensor-sum oracle") {
  auto lat = square_lattice(4);
  const std::size_t c = lat.flat_index({1, 2});
  const Eigen::Vector2d dir = Eigen::Vector2d(-0.3, 1.0).normalized();
  lat.bind(c, dir, 0);
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, 0.17);
  const auto pts = random_points_in_box(20, 77);
  const auto out = deform(lat, mu, pts);
  for (int k = 0; k < 20; ++k) {
    Eigen::Vector2d expect = Eigen::Vector2d::Zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const Eigen::Vector2d base(i / 3.0, j / 3.0);
        const Eigen::Vector2d ctrl = (i == 1 && j == 2) ? Eigen::Vector2d(base + 0.17 * dir) : base;
        const double w = binom(3, i) * std::pow(pts(0, k), i) * std::pow(1 - pts(0, k), 3 - i) *
                         binom(3, j) * std::pow(pts(1, k), j) * std::pow(1 - pts(1, k), 3 - j);
        expect += w * ctrl;
      }
    CHECK((out.col(k) - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("deform is linear in the displacements") {
  const auto lat = hull_lattice();
  const auto pts = reference_hull();
  SplitMix64 rng(5);
  Eigen::VectorXd mu(6);
  for (int i = 0; i < 6; ++i) mu[i] = std::ldexp(std::round(rng.uniform(-0.15, 0.15) * 1024), -10);
  const Eigen::MatrixXd d1 = deform(lat, mu, pts) - pts;
  const Eigen::MatrixXd d2 = deform(lat, 2.0 * mu, pts) - pts;
  CHECK((d2 - 2.0 * d1).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("points on fully fixed faces do not move") {
  const auto lat = hull_lattice();
  Eigen::MatrixXd face(2, 40);
  for (int k = 0; k < 10; ++k) {
    const double t = k / 9.0;
    face.col(k) << 0.0, t;
    face.col(10 + k) << 1.0, t;
    face.col(20 + k) << t, 0.0;
    face.col(30 + k) << t, 1.0;
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SplitMix64 rng(seed);
    Eigen::VectorXd mu(6);
    for (int i = 0; i < 6; ++i) mu[i] = rng.uniform(-0.15, 0.15);
    CHECK(deform(lat, mu, face) == face);
  }
  CHECK(lat.n_parameters() == 6);
}

TEST_CASE("ga sphere and history") {
  const ParameterSpace cube(std::vector<Bound>(6, Bound{-1.0, 1.0}));
  GaConfig cfg;
  const auto r = ga_optimize([](const ParameterPoint& x) { return x.squaredNorm(); }, cube, cfg);
  CHECK(r.best_value <= 1e-2);
  CHECK(r.best.squaredNorm() == r.best_value);
  REQUIRE(r.history.size() == cfg.generations + 1);
  for (std::size_t g = 1; g < r.history.size(); ++g) {
    CHECK(r.history[g].best <= r.history[g - 1].best);
    CHECK(r.history[g].generation == g);
  }
  CHECK(r.history.back().best == r.best_value);
  CHECK(r.evaluations > cfg.population * cfg.generations / 2);

  const auto again = ga_optimize([](const ParameterPoint& x) { return x.squaredNorm(); }, cube, cfg);
  CHECK(again.best == r.best);
  CHECK(history_csv(again) == history_csv(r));
  CHECK(history_csv(r).rfind("generation,best,mean\n0,", 0) == 0);
}

TEST_CASE("ga constant objective and vertex optimum") {
  const ParameterSpace box({{-1.0, 2.0}, {0.0, 1.0}, {3.0, 4.0}});
  const auto flat = ga_optimize([](const ParameterPoint&) { return 7.0; }, box, GaConfig{});
  CHECK(box.contains(flat.best));
  for (const auto& h : flat.history) {
    CHECK(h.best == 7.0);
    CHECK(h.mean == 7.0);
  }

  const Eigen::Vector3d vertex(2.0, 0.0, 4.0);
  const auto r = ga_optimize([&](const ParameterPoint& x) { return (x - vertex).norm(); }, box, GaConfig{});
  CHECK((r.best - vertex).cwiseAbs().maxCoeff() <= 1e-2);
}

TEST_CASE("ga errors") {
  const ParameterSpace box({{0.0, 1.0}});
  CHECK_CODE(ga_optimize([](const ParameterPoint& x) { return x[0] > 0.5 ? std::nan("") : 0.0; }, box,
                         GaConfig{}),
             ErrorCode::NonFiniteObjective);
  GaConfig odd;
  odd.population = 5;
  CHECK_CODE(odd.validate(), ErrorCode::InvalidArgument);
  GaConfig rate;
  rate.crossover_rate = 1.5;
  CHECK_CODE(rate.validate(), ErrorCode::InvalidArgument);
}

TEST_CASE("rom over a dense grid tracks the FOM objective") {
  const FomProblem fom(FomId::FfdDrag);
  const auto params = sample_space(fom.space(), GridSampling{{3, 3, 3, 3, 3, 3}}, 729, 0);
  const auto sm = generate_snapshots(fom, params).at("resistance");
  FitConfig cfg;
  cfg.regressor = RbfConfig{};
  const auto rom = fit(sm, fom.space(), RankTruncation{256}, cfg);
  GaConfig ga;
  ga.generations = 40;
  const auto r = optimize_shape(fom, rom, ga);
  CHECK(std::abs(r.fom_value - r.rom_value) / r.fom_value <= 0.05);
  CHECK(r.fom_value == fom.drag_objective(r.best));
  CHECK(r.rom_value == doctest::Approx(rom_drag_objective(fom, rom, r.best)));
}

TEST_CASE("degenerate two-snapshot rom still runs the pipeline") {
  const FomProblem fom(FomId::FfdDrag);
  const auto params = sample_space(fom.space(), RandomSampling{}, 2, 3);
  const auto rom = fit(generate_snapshots(fom, params).at("resistance"), fom.space(), RankTruncation{1});
  GaConfig ga;
  ga.generations = 5;
  const auto r = optimize_shape(fom, rom, ga);
  CHECK(std::isfinite(r.rom_value));
  CHECK(std::isfinite(r.fom_value));
  MESSAGE("degenerate ROM discrepancy: rom " << r.rom_value << " fom " << r.fom_value);

  const auto drag = fit(generate_snapshots(fom, params).at("drag"), fom.space(), RankTruncation{1});
  CHECK_CODE(optimize_shape(fom, drag, ga), ErrorCode::DimensionMismatch);
  CHECK_CODE(rom_drag_objective(FomProblem(FomId::Heat2d), rom, params[0]), ErrorCode::InvalidArgument);
}
