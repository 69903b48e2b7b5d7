#include "podsurf/snapshots.hpp"

#include "podsurf/error.hpp"
#include "podsurf/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <string>

namespace podsurf {

ParameterSpace::ParameterSpace(std::vector<Bound> bounds) : bounds_(std::move(bounds)) {
  if (bounds_.empty()) fail(ErrorCode::InvalidArgument, "parameter space needs p >= 1");
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const auto& b = bounds_[i];
    if (!std::isfinite(b.low) || !std::isfinite(b.high) || !(b.low < b.high))
      fail(ErrorCode::InvalidArgument,
           "bound " + std::to_string(i) + " must be finite with low < high");
  }
}

bool ParameterSpace::contains(const ParameterPoint& x) const {
  if (static_cast<std::size_t>(x.size()) != dims()) return false;
  for (std::size_t i = 0; i < dims(); ++i) {
    if (!std::isfinite(x[i]) || x[i] < bounds_[i].low || x[i] > bounds_[i].high) return false;
  }
  return true;
}

void ParameterSpace::check(const ParameterPoint& x) const {
  if (static_cast<std::size_t>(x.size()) != dims())
    fail(ErrorCode::DimensionMismatch, "parameter has " + std::to_string(x.size()) +
                                           " entries, space has p=" + std::to_string(dims()));
  for (std::size_t i = 0; i < dims(); ++i) {
    if (!std::isfinite(x[i])) fail(ErrorCode::NonFinite, "parameter entry is not finite");
    if (x[i] < bounds_[i].low || x[i] > bounds_[i].high)
      fail(ErrorCode::OutOfBounds, "parameter " + std::to_string(i) + " outside its bounds");
  }
}

ParameterPoint ParameterSpace::normalize(const ParameterPoint& x) const {
  ParameterPoint u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    u[i] = (x[i] - bounds_[i].low) / (bounds_[i].high - bounds_[i].low);
  return u;
}

ParameterPoint ParameterSpace::denormalize(const ParameterPoint& unit) const {
  ParameterPoint x(unit.size());
  for (Eigen::Index i = 0; i < unit.size(); ++i)
    x[i] = bounds_[i].low + unit[i] * (bounds_[i].high - bounds_[i].low);
  return x;
}

ParameterSpace ParameterSpace::bounding_box(const std::vector<ParameterPoint>& points) {
  if (points.empty()) fail(ErrorCode::InvalidArgument, "bounding box of an empty set");
  const auto p = points.front().size();
  std::vector<Bound> bounds(static_cast<std::size_t>(p));
  for (Eigen::Index d = 0; d < p; ++d) {
    double lo = points.front()[d], hi = lo;
    for (const auto& x : points) {
      if (x.size() != p) fail(ErrorCode::DimensionMismatch, "inconsistent parameter lengths");
      lo = std::min(lo, x[d]);
      hi = std::max(hi, x[d]);
    }
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
    bounds[static_cast<std::size_t>(d)] = {lo, hi};
  }
  return ParameterSpace(std::move(bounds));
}

bool operator==(const ParameterSpace& a, const ParameterSpace& b) {
  return std::equal(a.bounds_.begin(), a.bounds_.end(), b.bounds_.begin(), b.bounds_.end(),
                    [](const Bound& x, const Bound& y) {
                      return x.low == y.low && x.high == y.high;
                    });
}

Eigen::VectorXd SnapshotMatrix::effective_weights() const {
  if (weights) return *weights;
  return Eigen::VectorXd::Ones(data.rows());
}

Eigen::MatrixXd SnapshotMatrix::param_matrix() const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(params.size()),
                    static_cast<Eigen::Index>(n_params()));
  for (std::size_t j = 0; j < params.size(); ++j) x.row(static_cast<Eigen::Index>(j)) = params[j];
  return x;
}

bool operator==(const SnapshotMatrix& a, const SnapshotMatrix& b) {
  if (a.data.rows() != b.data.rows() || a.data.cols() != b.data.cols()) return false;
  if (a.data != b.data) return false;
  if (a.params.size() != b.params.size()) return false;
  for (std::size_t j = 0; j < a.params.size(); ++j) {
    if (a.params[j].size() != b.params[j].size() || a.params[j] != b.params[j]) return false;
  }
  if (a.weights.has_value() != b.weights.has_value()) return false;
  if (a.weights && (a.weights->size() != b.weights->size() || *a.weights != *b.weights))
    return false;
  return true;
}

void validate(const SnapshotMatrix& sm) {
  const auto N = sm.data.rows();
  const auto n = sm.data.cols();
  if (N < 1 || n < 1) fail(ErrorCode::DimensionMismatch, "snapshot matrix is empty");
  if (sm.params.size() != static_cast<std::size_t>(n))
    fail(ErrorCode::DimensionMismatch, std::to_string(sm.params.size()) + " parameter points for " +
                                           std::to_string(n) + " snapshots");
  const auto p = sm.params.front().size();
  if (p < 1) fail(ErrorCode::DimensionMismatch, "parameter points are empty");
  for (const auto& mu : sm.params) {
    if (mu.size() != p) fail(ErrorCode::DimensionMismatch, "inconsistent parameter lengths");
  }
  if (sm.weights && sm.weights->size() != N)
    fail(ErrorCode::DimensionMismatch, "weights length differs from N");

  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < N; ++i) {
      if (!std::isfinite(sm.data(i, j)))
        throw Error(ErrorCode::NonFinite,
                    "non-finite entry at (" + std::to_string(i) + "," + std::to_string(j) + ")",
                    static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  for (std::size_t j = 0; j < sm.params.size(); ++j) {
    for (Eigen::Index d = 0; d < p; ++d) {
      if (!std::isfinite(sm.params[j][d]))
        throw Error(ErrorCode::NonFinite,
                    "non-finite parameter " + std::to_string(d) + " of snapshot " +
                        std::to_string(j),
                    static_cast<std::size_t>(d), j);
    }
  }

  std::vector<std::size_t> order(sm.params.size());
  std::iota(order.begin(), order.end(), 0);
  auto lex_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(sm.params[a].begin(), sm.params[a].end(),
                                        sm.params[b].begin(), sm.params[b].end());
  };
  std::sort(order.begin(), order.end(), lex_less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (sm.params[order[k - 1]] == sm.params[order[k]])
      fail(ErrorCode::DuplicateParameter,
           "snapshots " + std::to_string(std::min(order[k - 1], order[k])) + " and " +
               std::to_string(std::max(order[k - 1], order[k])) + " share a parameter point");
  }

  if (sm.weights) {
    bool positive = false;
    for (Eigen::Index i = 0; i < N; ++i) {
      const double w = (*sm.weights)[i];
      if (!std::isfinite(w))
        throw Error(ErrorCode::NonFinite, "non-finite weight " + std::to_string(i),
                    static_cast<std::size_t>(i), 0);
      if (w < 0.0) fail(ErrorCode::InvalidWeights, "negative weight " + std::to_string(i));
      positive = positive || w > 0.0;
    }
    if (!positive) fail(ErrorCode::InvalidWeights, "weights need a strictly positive entry");
  }
}

namespace {

constexpr char kMagic[4] = {'P', 'S', 'N', 'P'};
constexpr std::size_t kHeaderSize = 4 + 4 + 8 + 8 + 8 + 1;

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b)
    out.push_back(static_cast<char>((value >> (8 * b)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename U>
  U le() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b)
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += sizeof(U);
    return v;
  }

  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }

  void need(std::size_t count) const {
    if (bytes_.size() - pos_ < count)
      fail(ErrorCode::TruncatedFile, "snapshot file ends early");
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

SnapshotHeader parse_header(Reader& in, std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    fail(ErrorCode::BadMagic, "not a snapshot file (bad magic)");
  in.le<std::uint32_t>();  // magic
  SnapshotHeader h{};
  h.version = in.le<std::uint32_t>();
  if (h.version != kSnapshotFormatVersion)
    fail(ErrorCode::VersionUnsupported, "snapshot format version " + std::to_string(h.version));
  h.n_dof = in.le<std::uint64_t>();
  h.n_snap = in.le<std::uint64_t>();
  h.n_params = in.le<std::uint64_t>();
  const auto flag = in.le<std::uint8_t>();
  if (flag > 1) fail(ErrorCode::SchemaMismatch, "has_weights flag must be 0 or 1");
  h.has_weights = flag == 1;
  return h;
}

}  // namespace

void write_snapshots(const SnapshotMatrix& sm, const std::filesystem::path& path) {
  validate(sm);
  const auto N = static_cast<std::uint64_t>(sm.n_dof());
  const auto n = static_cast<std::uint64_t>(sm.n_snap());
  const auto p = static_cast<std::uint64_t>(sm.n_params());
  std::string out;
  out.reserve(kHeaderSize + 8 * (p * n + N * n + (sm.weights ? N : 0)));
  out.append(kMagic, 4);
  put_le(out, kSnapshotFormatVersion);
  put_le(out, N);
  put_le(out, n);
  put_le(out, p);
  out.push_back(sm.weights ? 1 : 0);
  for (const auto& mu : sm.params)
    for (Eigen::Index d = 0; d < mu.size(); ++d) put_f64(out, mu[d]);
  if (sm.weights)
    for (Eigen::Index i = 0; i < sm.weights->size(); ++i) put_f64(out, (*sm.weights)[i]);
  for (Eigen::Index j = 0; j < sm.data.cols(); ++j)
    for (Eigen::Index i = 0; i < sm.data.rows(); ++i) put_f64(out, sm.data(i, j));
  io::write_file_atomic(path, out);
}

SnapshotHeader read_snapshot_header(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  Reader in(bytes);
  return parse_header(in, bytes);
}

SnapshotMatrix read_snapshots(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  Reader in(bytes);
  const auto h = parse_header(in, bytes);
  // Guard the allocation against absurd header values before reading.
  const unsigned __int128 values =
      static_cast<unsigned __int128>(h.n_params) * h.n_snap +
      static_cast<unsigned __int128>(h.n_dof) * h.n_snap + (h.has_weights ? h.n_dof : 0);
  if (values * 8 > in.remaining()) fail(ErrorCode::TruncatedFile, "snapshot file ends early");
  if (values * 8 < in.remaining()) fail(ErrorCode::SchemaMismatch, "trailing bytes after data");

  SnapshotMatrix sm;
  const auto N = static_cast<Eigen::Index>(h.n_dof);
  const auto n = static_cast<Eigen::Index>(h.n_snap);
  const auto p = static_cast<Eigen::Index>(h.n_params);
  sm.params.assign(static_cast<std::size_t>(n), ParameterPoint(p));
  for (auto& mu : sm.params)
    for (Eigen::Index d = 0; d < p; ++d) mu[d] = in.f64();
  if (h.has_weights) {
    Eigen::VectorXd w(N);
    for (Eigen::Index i = 0; i < N; ++i) w[i] = in.f64();
    sm.weights = std::move(w);
  }
  sm.data.resize(N, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < N; ++i) sm.data(i, j) = in.f64();
  validate(sm);
  return sm;
}

SnapshotMatrix read_snapshots_csv(const std::filesystem::path& path, std::size_t n_params) {
  if (n_params < 1) fail(ErrorCode::InvalidArgument, "CSV import needs p >= 1");
  const auto text = io::read_file(path);
  std::vector<std::vector<double>> rows;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(io::parse_csv_row(line));
  }
  if (rows.size() <= n_params)
    fail(ErrorCode::DimensionMismatch, "CSV has no field rows after the parameter rows");
  const auto n = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != n) fail(ErrorCode::DimensionMismatch, "ragged CSV rows");
  }
  SnapshotMatrix sm;
  sm.params.assign(n, ParameterPoint(static_cast<Eigen::Index>(n_params)));
  for (std::size_t d = 0; d < n_params; ++d)
    for (std::size_t j = 0; j < n; ++j) sm.params[j][static_cast<Eigen::Index>(d)] = rows[d][j];
  const auto N = rows.size() - n_params;
  sm.data.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sm.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[n_params + i][j];
  validate(sm);
  return sm;
}

void write_snapshots_csv(const SnapshotMatrix& sm, const std::filesystem::path& path) {
  validate(sm);
  std::string out;
  auto emit_row = [&](auto&& value_at) {
    for (std::size_t j = 0; j < sm.n_snap(); ++j) {
      if (j) out.push_back(',');
      out += io::format_double(value_at(j));
    }
    out.push_back('\n');
  };
  for (std::size_t d = 0; d < sm.n_params(); ++d)
    emit_row([&](std::size_t j) { return sm.params[j][static_cast<Eigen::Index>(d)]; });
  for (std::size_t i = 0; i < sm.n_dof(); ++i)
    emit_row([&](std::size_t j) {
      return sm.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
  io::write_file_atomic(path, out);
}

}  // namespace podsurf
