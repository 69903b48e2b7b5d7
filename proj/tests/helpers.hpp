#pragma once

#include "podsurf/error.hpp"
#include "podsurf/rng.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  podsurf::SplitMix64 rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("podsurf_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Largest |a - b| over columns matched up to sign.
inline double max_diff_up_to_sign(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double plus = (a.col(j) - b.col(j)).cwiseAbs().maxCoeff();
    const double minus = (a.col(j) + b.col(j)).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::min(plus, minus));
  }
  return worst;
}

}  // namespace testing

#define CHECK_CODE(expr, ecode)                              \
  do {                                                       \
    bool thrown_ = false;                                    \
    try {                                                    \
      (void)(expr);                                          \
    } catch (const podsurf::Error& e_) {                     \
      thrown_ = true;                                        \
      CHECK_MESSAGE(e_.code() == (ecode), e_.what());        \
    }                                                        \
    CHECK_MESSAGE(thrown_, "expected " #ecode);              \
  } while (0)
