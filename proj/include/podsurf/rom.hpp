#pragma once

#include "podsurf/pod.hpp"
#include "podsurf/regress.hpp"
#include "podsurf/snapshots.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace podsurf {

inline constexpr int kModelFormatVersion = 1;

struct LinearConfig {};

/// What regressor fit() trains for the modal coefficients.
using RegressorSpec = std::variant<GprConfig, RbfConfig, LinearConfig>;

/// "gpr", "gpr:optimized-noise", "rbf:<smoothness>", "rbf-tps:<smoothness>" or "linear".
RegressorSpec parse_regressor_spec(std::string_view text);
std::string regressor_label(const RegressorSpec& spec);

struct Provenance {
  std::size_t n_train = 0;
  Truncation truncation = RankTruncation{1};  // as requested, before clamping
  std::string regressor_kind;                 // label of the spec that trained it
  std::uint64_t seed = 0;
  int format_version = kModelFormatVersion;
};

/// Deployable online-phase object: basis + coefficient regressor.
struct RomModel {
  PodBasis basis;
  Regressor regressor;
  ParameterSpace space;
  std::optional<Eigen::VectorXd> weights;
  Provenance provenance;

  std::size_t n_dof() const { return basis.n_dof(); }
  std::size_t rank() const { return basis.rank(); }
  std::size_t n_params() const { return space.dims(); }
};

struct FitConfig {
  RegressorSpec regressor = GprConfig{};
  PodOptions pod;
  std::uint64_t seed = 42;
};

/// Offline phase. A requested rank above min(n, N) is clamped and the
/// effective rank is whatever the basis reports.
RomModel fit(const SnapshotMatrix& sm, const ParameterSpace& space, const Truncation& truncation,
             const FitConfig& config = {});

struct Inference {
  Eigen::VectorXd field;
  bool extrapolated = false;  // mu outside the model's parameter space
};

/// Online phase: reconstruct(basis, regressor(mu)).
Inference infer(const RomModel& rom, const ParameterPoint& mu);

/// ( sum w (t - a)^2 / sum w t^2 )^(1/2)
double relative_l2_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx,
                         const Eigen::VectorXd& weights);
double relative_l2_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx);

std::string model_to_json(const RomModel& rom);
RomModel model_from_json(std::string_view text);
void save_model(const RomModel& rom, const std::filesystem::path& path);
RomModel load_model(const std::filesystem::path& path);

/// One independent RomModel per named field.
struct MultiFieldRom {
  std::map<std::string, RomModel> fields;

  std::map<std::string, Eigen::VectorXd> infer(const ParameterPoint& mu) const;
};

MultiFieldRom fit_fields(const std::map<std::string, SnapshotMatrix>& snapshots,
                         const ParameterSpace& space, const Truncation& truncation,
                         const FitConfig& config = {});

}  // namespace podsurf
