#include "podsurf/study.hpp"

#include "podsurf/error.hpp"
#include "podsurf/io.hpp"
#include "podsurf/rng.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace podsurf {

namespace {

constexpr std::uint64_t kTestStream = 0x7E57;
constexpr std::uint64_t kTrainStream = 0x7A11;

struct LexLess {
  bool operator()(const ParameterPoint& a, const ParameterPoint& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

}  // namespace

std::string StudyReport::to_csv() const {
  std::string out = "n_snapshots,n_modes,regressor,field,mean_rel_l2\n";
  for (const auto& r : rows)
    out += std::to_string(r.n_snapshots) + "," + std::to_string(r.n_modes) + "," + r.regressor +
           "," + r.field + "," + io::format_double(r.mean_rel_l2) + "\n";
  return out;
}

const StudyRow& StudyReport::find(std::size_t n_snapshots, const std::string& regressor,
                                  const std::string& field) const {
  for (const auto& r : rows)
    if (r.n_snapshots == n_snapshots && r.regressor == regressor && r.field == field) return r;
  fail(ErrorCode::InvalidArgument, "no study row for n=" + std::to_string(n_snapshots) + " " +
                                       regressor + " " + field);
}

std::vector<ParameterPoint> study_test_set(const ParameterSpace& space, std::size_t n_test,
                                           std::uint64_t seed) {
  return sample_space(space, RandomSampling{}, n_test, derive_seed(seed, kTestStream));
}

std::vector<ParameterPoint> study_training_set(const ParameterSpace& space,
                                               const SamplingStrategy& strategy, std::size_t count,
                                               std::uint64_t seed,
                                               const std::vector<ParameterPoint>& test) {
  const std::set<ParameterPoint, LexLess> forbidden(test.begin(), test.end());
  // Redraw the whole set on an exact collision with a test point.
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto train = sample_space(space, strategy, count,
                              derive_seed(seed, kTrainStream + 1000003 * count + attempt));
    const bool clash = std::any_of(train.begin(), train.end(),
                                   [&](const ParameterPoint& x) { return forbidden.count(x) > 0; });
    if (!clash) return train;
  }
}

double mean_relative_error(const RomModel& rom, const SnapshotMatrix& truth) {
  const Eigen::VectorXd w = truth.effective_weights();
  double total = 0.0;
  for (std::size_t j = 0; j < truth.n_snap(); ++j) {
    const auto approx = infer(rom, truth.params[j]).field;
    total += relative_l2_error(truth.data.col(static_cast<Eigen::Index>(j)), approx, w);
  }
  return total / static_cast<double>(truth.n_snap());
}

StudyReport convergence_study(const FomProblem& fom, const StudyConfig& config) {
  if (config.n_test < 1) fail(ErrorCode::CountTooSmall, "n_test must be >= 1");
  if (config.snapshot_counts.empty()) fail(ErrorCode::InvalidArgument, "no snapshot counts");
  for (auto c : config.snapshot_counts)
    if (c < 2) fail(ErrorCode::CountTooSmall, "snapshot counts must be >= 2");
  const ParameterSpace space = config.space.value_or(fom.space());

  const auto test_params = study_test_set(space, config.n_test, config.seed);
  const auto test = generate_snapshots(fom, test_params);

  StudyReport report;
  for (auto count : config.snapshot_counts) {
    const auto train_params = study_training_set(space, config.strategy, count, config.seed, test_params);
    const auto train = generate_snapshots(fom, train_params);
    for (const auto& spec : config.regressors) {
      for (const auto& field : fom.field_names()) {
        FitConfig fit_cfg;
        fit_cfg.regressor = spec;
        fit_cfg.pod = config.pod;
        fit_cfg.seed = config.seed;
        const auto rom = fit(train.at(field), space, config.truncation, fit_cfg);
        report.rows.push_back({count, rom.rank(), regressor_label(spec), field,
                               mean_relative_error(rom, test.at(field))});
      }
    }
  }
  return report;
}

}  // namespace podsurf
