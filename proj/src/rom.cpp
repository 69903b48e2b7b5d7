#include "podsurf/rom.hpp"

#include "podsurf/error.hpp"
#include "podsurf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace podsurf {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    fail(ErrorCode::InvalidArgument, "bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

}  // namespace

RegressorSpec parse_regressor_spec(std::string_view text) {
  if (text == "gpr") return GprConfig{};
  if (text == "gpr:optimized-noise") {
    GprConfig cfg;
    cfg.noise = std::nullopt;
    return cfg;
  }
  if (text == "linear") return LinearConfig{};
  for (auto [prefix, kernel] : {std::pair{std::string_view("rbf"), RbfKernel::Multiquadric},
                                std::pair{std::string_view("rbf-tps"), RbfKernel::ThinPlateSpline}}) {
    if (text == prefix) return RbfConfig{kernel, 0.0, std::nullopt};
    if (text.size() > prefix.size() && text.substr(0, prefix.size()) == prefix &&
        text[prefix.size()] == ':') {
      const double s = parse_number(text.substr(prefix.size() + 1), "smoothness");
      if (s < 0.0) fail(ErrorCode::InvalidArgument, "smoothness must be >= 0");
      return RbfConfig{kernel, s, std::nullopt};
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown regressor '" + std::string(text) +
                                       "' (expected gpr, rbf:SMOOTH, rbf-tps:SMOOTH or linear)");
}

std::string regressor_label(const RegressorSpec& spec) {
  struct {
    std::string operator()(const GprConfig& c) const {
      return c.noise ? "gpr" : "gpr:optimized-noise";
    }
    std::string operator()(const RbfConfig& c) const {
      return std::string(c.kernel == RbfKernel::Multiquadric ? "rbf:" : "rbf-tps:") +
             io::format_double(c.smoothness);
    }
    std::string operator()(const LinearConfig&) const { return "linear"; }
  } visitor;
  return std::visit(visitor, spec);
}

RomModel fit(const SnapshotMatrix& sm, const ParameterSpace& space, const Truncation& truncation,
             const FitConfig& config) {
  validate(sm);
  if (sm.n_snap() < 2) fail(ErrorCode::TooFewPoints, "fitting a ROM needs at least 2 snapshots");
  if (sm.n_params() != space.dims())
    fail(ErrorCode::DimensionMismatch, "snapshot parameters have p=" +
                                           std::to_string(sm.n_params()) + ", space has p=" +
                                           std::to_string(space.dims()));
  for (const auto& mu : sm.params) space.check(mu);

  Truncation effective = truncation;
  if (auto* r = std::get_if<RankTruncation>(&effective))
    r->rank = std::min(r->rank, std::min(sm.n_snap(), sm.n_dof()));

  RomModel rom;
  rom.space = space;
  rom.weights = sm.weights;
  rom.basis = compute_pod(sm.data, effective, config.pod);
  rom.provenance.n_train = sm.n_snap();
  rom.provenance.truncation = truncation;
  rom.provenance.regressor_kind = regressor_label(config.regressor);
  rom.provenance.seed = config.seed;

  const Eigen::MatrixXd targets = project_all(rom.basis, sm.data).transpose();  // n x rank
  const Eigen::MatrixXd x = sm.param_matrix();

  struct {
    const Eigen::MatrixXd& x;
    const Eigen::MatrixXd& y;
    const ParameterSpace& space;
    std::uint64_t seed;
    Regressor operator()(const GprConfig& c) const {
      GprConfig cfg = c;
      cfg.seed = seed;
      return train_gpr(x, y, cfg, space);
    }
    Regressor operator()(const RbfConfig& c) const { return train_rbf(x, y, c, space); }
    Regressor operator()(const LinearConfig&) const { return train_linear(x, y, space); }
  } trainer{x, targets, space, config.seed};
  rom.regressor = std::visit(trainer, config.regressor);
  return rom;
}

Inference infer(const RomModel& rom, const ParameterPoint& mu) {
  if (static_cast<std::size_t>(mu.size()) != rom.n_params())
    fail(ErrorCode::DimensionMismatch, "mu has " + std::to_string(mu.size()) +
                                           " entries, model expects p=" +
                                           std::to_string(rom.n_params()));
  if (!mu.allFinite()) fail(ErrorCode::NonFinite, "mu contains non-finite values");
  Inference out;
  out.extrapolated = !rom.space.contains(mu);
  out.field = reconstruct(rom.basis, predict(rom.regressor, mu));
  return out;
}

double relative_l2_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx,
                         const Eigen::VectorXd& weights) {
  if (truth.size() != approx.size() || truth.size() != weights.size())
    fail(ErrorCode::DimensionMismatch, "error operands differ in length");
  if ((weights.array() < 0.0).any()) fail(ErrorCode::InvalidWeights, "negative weights");
  const double den = (weights.array() * truth.array().square()).sum();
  if (!(den > 0.0)) fail(ErrorCode::ZeroTruthNorm, "truth field has zero weighted norm");
  const double num = (weights.array() * (truth - approx).array().square()).sum();
  return std::sqrt(num / den);
}

double relative_l2_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx) {
  return relative_l2_error(truth, approx, Eigen::VectorXd::Ones(truth.size()));
}

std::map<std::string, Eigen::VectorXd> MultiFieldRom::infer(const ParameterPoint& mu) const {
  std::map<std::string, Eigen::VectorXd> out;
  for (const auto& [name, rom] : fields) out.emplace(name, podsurf::infer(rom, mu).field);
  return out;
}

MultiFieldRom fit_fields(const std::map<std::string, SnapshotMatrix>& snapshots,
                         const ParameterSpace& space, const Truncation& truncation,
                         const FitConfig& config) {
  MultiFieldRom out;
  for (const auto& [name, sm] : snapshots) out.fields.emplace(name, fit(sm, space, truncation, config));
  return out;
}

}  // namespace podsurf
