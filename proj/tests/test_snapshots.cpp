#include "helpers.hpp"
#include "podsurf/snapshots.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace podsurf;

namespace {

SnapshotMatrix small_matrix(Eigen::Index N, Eigen::Index n, std::uint64_t seed, bool weights) {
  SnapshotMatrix sm;
  sm.data = testing::random_matrix(N, n, seed);
  SplitMix64 rng(seed + 1);
  for (Eigen::Index j = 0; j < n; ++j) sm.params.push_back(Eigen::Vector2d(rng.uniform(), rng.uniform()));
  if (weights) sm.weights = Eigen::VectorXd::LinSpaced(N, 0.5, 2.0);
  return sm;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST_CASE("parameter space bounds") {
  const ParameterSpace s({{0.0, 1.0}, {-2.0, 2.0}});
  CHECK(s.contains(Eigen::Vector2d(1.0, -2.0)));
  CHECK_FALSE(s.contains(Eigen::Vector2d(1.5, 0.0)));
  CHECK_FALSE(s.contains(Eigen::Vector3d(0.5, 0.0, 0.0)));
  CHECK_CODE(s.check(Eigen::Vector2d(0.5, 3.0)), ErrorCode::OutOfBounds);
  CHECK_CODE(s.check(Eigen::Vector3d(0.5, 0.0, 0.0)), ErrorCode::DimensionMismatch);
  CHECK_CODE(s.check(Eigen::Vector2d(std::nan(""), 0.0)), ErrorCode::NonFinite);
  CHECK_CODE(ParameterSpace({{1.0, 1.0}}), ErrorCode::InvalidArgument);
  CHECK_CODE(ParameterSpace(std::vector<Bound>{}), ErrorCode::InvalidArgument);

  const Eigen::Vector2d x(0.25, 1.0);
  CHECK((s.normalize(x) - Eigen::Vector2d(0.25, 0.75)).norm() == doctest::Approx(0.0));
  CHECK((s.denormalize(s.normalize(x)) - x).norm() < 1e-15);
}

TEST_CASE("validate accepts a well-formed matrix") {
  SnapshotMatrix sm;
  sm.data = Eigen::MatrixXd::Ones(3, 2);
  sm.params = {Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 0.0)};
  CHECK_NOTHROW(validate(sm));
}

TEST_CASE("validate reports the NaN position") {
  SnapshotMatrix sm;
  sm.data = Eigen::MatrixXd::Ones(3, 2);
  sm.data(1, 0) = std::nan("");
  sm.params = {Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 0.0)};
  try {
    validate(sm);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
    CHECK(e.row() == std::optional<std::size_t>(1));
    CHECK(e.col() == std::optional<std::size_t>(0));
  }
}

TEST_CASE("validate rejects exact duplicate parameters only") {
  SnapshotMatrix sm;
  sm.data = Eigen::MatrixXd::Ones(3, 2);
  sm.params = {Eigen::Vector2d(0.5, 2.0), Eigen::Vector2d(0.5, 2.0)};
  CHECK_CODE(validate(sm), ErrorCode::DuplicateParameter);
  sm.params[1][1] = std::nextafter(2.0, 3.0);
  CHECK_NOTHROW(validate(sm));
}

TEST_CASE("validate property: injected defects are caught, clean matrices pass") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto clean = small_matrix(5, 4, seed, seed % 2 == 0);
    CHECK_NOTHROW(validate(clean));
    SplitMix64 rng(seed);
    const auto i = static_cast<Eigen::Index>(rng.below(5));
    const auto j = static_cast<Eigen::Index>(rng.below(4));

    auto inf = clean;
    inf.data(i, j) = std::numeric_limits<double>::infinity();
    CHECK_CODE(validate(inf), ErrorCode::NonFinite);

    auto nan_param = clean;
    nan_param.params[static_cast<std::size_t>(j)][0] = std::nan("");
    CHECK_CODE(validate(nan_param), ErrorCode::NonFinite);

    auto dup = clean;
    dup.params[static_cast<std::size_t>((j + 1) % 4)] = dup.params[static_cast<std::size_t>(j)];
    CHECK_CODE(validate(dup), ErrorCode::DuplicateParameter);

    auto short_w = clean;
    short_w.weights = Eigen::VectorXd::Ones(4);
    CHECK_CODE(validate(short_w), ErrorCode::DimensionMismatch);

    auto zero_w = clean;
    zero_w.weights = Eigen::VectorXd::Zero(5);
    CHECK_CODE(validate(zero_w), ErrorCode::InvalidWeights);

    auto neg_w = clean;
    neg_w.weights = Eigen::VectorXd::Ones(5);
    (*neg_w.weights)[i] = -1.0;
    CHECK_CODE(validate(neg_w), ErrorCode::InvalidWeights);

    auto ragged = clean;
    ragged.params.pop_back();
    CHECK_CODE(validate(ragged), ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("binary round trip is exact") {
  const auto dir = testing::scratch_dir("snap_rt");
  for (bool w : {false, true}) {
    auto sm = small_matrix(4, 3, 11, w);
    sm.data(0, 0) = 0.1;  // not exactly representable in short decimal
    sm.data(1, 2) = -0.0;
    sm.data(2, 1) = std::numeric_limits<double>::denorm_min();
    const auto path = dir / (w ? "w.psnp" : "nw.psnp");
    write_snapshots(sm, path);
    const auto back = read_snapshots(path);
    CHECK(back == sm);
    CHECK(std::signbit(back.data(1, 2)));
    const auto h = read_snapshot_header(path);
    CHECK(h.version == kSnapshotFormatVersion);
    CHECK(h.n_dof == 4);
    CHECK(h.n_snap == 3);
    CHECK(h.n_params == 2);
    CHECK(h.has_weights == w);
    CHECK(std::filesystem::file_size(path) ==
          4 + 4 + 24 + 1 + 8 * (2 * 3 + (w ? 4 : 0) + 4 * 3));
  }
}

TEST_CASE("binary layout is little-endian as documented") {
  const auto dir = testing::scratch_dir("snap_layout");
  SnapshotMatrix sm;
  sm.data = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sm.params = {Eigen::VectorXd::Constant(1, 2.0)};
  write_snapshots(sm, dir / "a.psnp");
  std::ifstream in(dir / "a.psnp", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  REQUIRE(bytes.size() == 4 + 4 + 24 + 1 + 16);
  CHECK(bytes.substr(0, 4) == "PSNP");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 1);   // N
  CHECK(bytes[16] == 1);  // n
  CHECK(bytes[24] == 1);  // p
  CHECK(bytes[32] == 0);  // no weights
  // 2.0 = 0x4000000000000000, 1.0 = 0x3FF0000000000000
  CHECK(static_cast<unsigned char>(bytes[40]) == 0x40);
  CHECK(static_cast<unsigned char>(bytes[48]) == 0x3F);
  CHECK(static_cast<unsigned char>(bytes[47]) == 0xF0);
}

TEST_CASE("corrupt files") {
  const auto dir = testing::scratch_dir("snap_bad");
  const auto sm = small_matrix(4, 3, 5, true);
  write_snapshots(sm, dir / "good.psnp");
  std::ifstream in(dir / "good.psnp", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});

  write_text(dir / "magic.psnp", "XSNP" + bytes.substr(4));
  CHECK_CODE(read_snapshots(dir / "magic.psnp"), ErrorCode::BadMagic);

  std::string v2 = bytes;
  v2[4] = 2;
  write_text(dir / "v2.psnp", v2);
  CHECK_CODE(read_snapshots(dir / "v2.psnp"), ErrorCode::VersionUnsupported);

  write_text(dir / "short.psnp", bytes.substr(0, bytes.size() - 3));
  CHECK_CODE(read_snapshots(dir / "short.psnp"), ErrorCode::TruncatedFile);

  write_text(dir / "long.psnp", bytes + "x");
  CHECK_CODE(read_snapshots(dir / "long.psnp"), ErrorCode::SchemaMismatch);

  CHECK_CODE(read_snapshots(dir / "missing.psnp"), ErrorCode::IoFailure);
}

TEST_CASE("CSV import matches an independent text parse") {
  const std::filesystem::path fixture = std::filesystem::path(__FILE__).parent_path() / "fixtures" / "snap3x2.csv";
  const auto sm = read_snapshots_csv(fixture, 1);
  CHECK(sm.n_dof() == 3);
  CHECK(sm.n_snap() == 2);
  CHECK(sm.n_params() == 1);

  std::ifstream in(fixture);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(r);
  }
  REQUIRE(rows.size() == 4);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(sm.params[j][0] == rows[0][j]);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(sm.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == rows[i + 1][j]);
  }

  const auto dir = testing::scratch_dir("snap_csv");
  write_snapshots_csv(sm, dir / "out.csv");
  CHECK(read_snapshots_csv(dir / "out.csv", 1) == sm);

  write_text(dir / "ragged.csv", "1,2\n3\n");
  CHECK_CODE(read_snapshots_csv(dir / "ragged.csv", 1), ErrorCode::DimensionMismatch);
  write_text(dir / "bad.csv", "1,2\n3,abc\n");
  CHECK_CODE(read_snapshots_csv(dir / "bad.csv", 1), ErrorCode::InvalidArgument);
}

TEST_CASE("effective weights default to ones") {
  const auto sm = small_matrix(4, 2, 3, false);
  CHECK(sm.effective_weights() == Eigen::VectorXd::Ones(4));
  const auto pm = sm.param_matrix();
  CHECK(pm.rows() == 2);
  CHECK(pm.row(1).transpose() == sm.params[1]);
}
