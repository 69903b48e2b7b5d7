#pragma once

#include "podsurf/fom.hpp"
#include "podsurf/rom.hpp"
#include "podsurf/shapeopt.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace podsurf {

struct StudyConfig {
  std::vector<std::size_t> snapshot_counts;
  Truncation truncation = RankTruncation{12};
  std::vector<RegressorSpec> regressors{GprConfig{}};
  std::size_t n_test = 20;
  std::uint64_t seed = 42;
  SamplingStrategy strategy = RandomSampling{};
  /// Defaults to the FOM's own parameter space.
  std::optional<ParameterSpace> space;
  PodOptions pod;
};

struct StudyRow {
  std::size_t n_snapshots;
  std::size_t n_modes;
  std::string regressor;
  std::string field;
  double mean_rel_l2;  // mean over test points of the per-point relative L2 error
};

struct StudyReport {
  std::vector<StudyRow> rows;

  /// `n_snapshots,n_modes,regressor,field,mean_rel_l2`
  std::string to_csv() const;
  /// First row matching all three keys; throws InvalidArgument otherwise.
  const StudyRow& find(std::size_t n_snapshots, const std::string& regressor,
                       const std::string& field) const;
};

/// Test set shared by every row of a study: n_test uniform interior draws.
std::vector<ParameterPoint> study_test_set(const ParameterSpace& space, std::size_t n_test,
                                           std::uint64_t seed);
/// Training set for one snapshot count, disjoint from `test`.
std::vector<ParameterPoint> study_training_set(const ParameterSpace& space,
                                               const SamplingStrategy& strategy, std::size_t count,
                                               std::uint64_t seed,
                                               const std::vector<ParameterPoint>& test);

/// Error of `rom` averaged over test fields (columns of `truth`).
double mean_relative_error(const RomModel& rom, const SnapshotMatrix& truth);

/// For each (count, regressor): sample, solve, fit, evaluate on the fixed
/// test set. Multi-field FOMs get one ROM per field.
StudyReport convergence_study(const FomProblem& fom, const StudyConfig& config);

// ---------------------------------------------------------------------------

struct ShapeOptResult {
  ParameterPoint best;
  double rom_value;  // ROM-predicted objective at best
  double fom_value;  // true objective at best
  GaResult ga;
};

/// Objective from a ROM over the ffd-drag resistance field: the drag is the
/// model's quadrature weights dotted with the inferred field, plus the area
/// penalty of the deformed hull.
double rom_drag_objective(const FomProblem& fom, const RomModel& rom, const ParameterPoint& mu);

/// GA over the ROM objective, then one FOM solve at the optimum.
ShapeOptResult optimize_shape(const FomProblem& fom, const RomModel& rom, const GaConfig& config);

}  // namespace podsurf
