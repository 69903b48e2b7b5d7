#include "podsurf/error.hpp"
#include "podsurf/regress.hpp"
#include "podsurf/rng.hpp"
#include "regress_detail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace podsurf {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterStop = 1e-4;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Factor {
  Eigen::MatrixXd lower;
  double jitter;
};

// Cholesky of K + (noise + jitter) I, raising the jitter tenfold per failure.
std::optional<Factor> factorize(const Eigen::MatrixXd& k, double noise) {
  const auto m = k.rows();
  double base = k.trace() / static_cast<double>(m);
  if (!(base > 0.0)) base = 1.0;
  for (double scale = kJitterStart; scale <= kJitterStop * (1.0 + 1e-9); scale *= 10.0) {
    const double jitter = scale * base;
    Eigen::MatrixXd a = k;
    a.diagonal().array() += noise + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd lower = llt.matrixL();
      if (lower.allFinite()) return Factor{std::move(lower), jitter};
    }
  }
  return std::nullopt;
}

double lml_from_factor(const Eigen::MatrixXd& lower, const Eigen::VectorXd& y) {
  const Eigen::VectorXd w = lower.triangularView<Eigen::Lower>().solve(y);
  const double log_det = 2.0 * lower.diagonal().array().log().sum();
  const auto m = static_cast<double>(y.size());
  return -0.5 * w.squaredNorm() - 0.5 * log_det - 0.5 * m * std::log(2.0 * std::numbers::pi);
}

Eigen::MatrixXd kernel_from_distances(const Eigen::MatrixXd& d2, double ell, double sf2) {
  return sf2 * (-d2.array() / (2.0 * ell * ell)).exp().matrix();
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = std::log(lo);
    return v;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (count - 1);
  return v;
}

// Which hyperparameters are searched, in log space, and their boxes.
struct SearchSpace {
  std::vector<int> free;  // 0 = length, 1 = scale, 2 = noise
  double fixed[3];
  double lo[3], hi[3], step[3];

  std::array<double, 3> expand(const Eigen::VectorXd& theta) const {
    std::array<double, 3> h{fixed[0], fixed[1], fixed[2]};
    for (std::size_t k = 0; k < free.size(); ++k) h[static_cast<std::size_t>(free[k])] =
        std::exp(theta[static_cast<Eigen::Index>(k)]);
    return h;
  }
  bool inside(const Eigen::VectorXd& theta) const {
    for (std::size_t k = 0; k < free.size(); ++k) {
      const auto f = static_cast<std::size_t>(free[k]);
      const double t = theta[static_cast<Eigen::Index>(k)];
      if (t < lo[f] - 1e-12 || t > hi[f] + 1e-12) return false;
    }
    return true;
  }
};

struct Objective {
  const Eigen::MatrixXd& d2;
  const Eigen::VectorXd& y;
  const SearchSpace& space;

  double operator()(const Eigen::VectorXd& theta) const {
    if (!space.inside(theta)) return kInf;
    const auto h = space.expand(theta);
    const auto f = factorize(kernel_from_distances(d2, h[0], h[1]), h[2]);
    if (!f) return kInf;
    const double nll = -lml_from_factor(f->lower, y);
    return std::isfinite(nll) ? nll : kInf;
  }
};

// Nelder-Mead with standard coefficients; stops when every vertex lies within
// `tolerance` (max-norm) of the best one.
Eigen::VectorXd nelder_mead(const Objective& f, Eigen::VectorXd start, const Eigen::VectorXd& step,
                            int max_iterations, double tolerance, double& best_value) {
  const auto n = start.size();
  std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(n + 1), start);
  std::vector<double> fx(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& v = x[static_cast<std::size_t>(i + 1)];
    v[i] += step[i];
    if (!f.space.inside(v)) v[i] -= 2.0 * step[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) fx[i] = f(x[i]);

  std::vector<std::size_t> idx(x.size());
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
    const auto best = idx.front(), worst = idx.back(), second = idx[idx.size() - 2];

    double size = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      size = std::max(size, (x[i] - x[best]).cwiseAbs().maxCoeff());
    if (size < tolerance) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) centroid += x[idx[i]];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - x[worst]);
    const double fr = f(reflected);
    if (fr < fx[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - x[worst]);
      const double fe = f(expanded);
      if (fe < fr) {
        x[worst] = expanded;
        fx[worst] = fe;
      } else {
        x[worst] = reflected;
        fx[worst] = fr;
      }
    } else if (fr < fx[second]) {
      x[worst] = reflected;
      fx[worst] = fr;
    } else {
      const bool outside = fr < fx[worst];
      const Eigen::VectorXd contracted =
          outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                  : Eigen::VectorXd(centroid + 0.5 * (x[worst] - centroid));
      const double fc = f(contracted);
      if (fc < (outside ? fr : fx[worst])) {
        x[worst] = contracted;
        fx[worst] = fc;
      } else {
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (i == best) continue;
          x[i] = x[best] + 0.5 * (x[i] - x[best]);
          fx[i] = f(x[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (fx[i] < fx[best]) best = i;
  best_value = fx[best];
  return x[best];
}

GprOutput fit_output(const Eigen::MatrixXd& u, const Eigen::MatrixXd& d2,
                     const Eigen::VectorXd& raw, const GprConfig& cfg, std::uint64_t seed) {
  GprOutput out;
  const auto m = static_cast<double>(raw.size());
  out.y_mean = raw.mean();
  const double var = (raw.array() - out.y_mean).square().sum() / m;
  out.y_std = var > 0.0 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd y = (raw.array() - out.y_mean) / out.y_std;

  const auto& s = cfg.search;
  SearchSpace space{};
  const double fixed_values[3] = {cfg.length_scale.value_or(1.0), cfg.output_scale.value_or(1.0),
                                  cfg.noise.value_or(0.0)};
  const std::vector<double> grids[3] = {
      log_grid(s.length_min, s.length_max, s.length_count),
      log_grid(s.scale_min, s.scale_max, s.scale_count),
      log_grid(s.noise_min, s.noise_max, s.noise_count)};
  const bool is_free[3] = {!cfg.length_scale, !cfg.output_scale, !cfg.noise};
  for (int k = 0; k < 3; ++k) {
    space.fixed[k] = fixed_values[k];
    space.lo[k] = grids[k].front();
    space.hi[k] = grids[k].back();
    space.step[k] = grids[k].size() > 1 ? grids[k][1] - grids[k][0] : 0.1;
    if (is_free[k]) space.free.push_back(k);
  }

  Objective objective{d2, y, space};
  const auto nfree = static_cast<Eigen::Index>(space.free.size());
  Eigen::VectorXd theta(nfree);
  double best = kInf;

  if (nfree > 0) {
    // Exhaustive log grid over the free hyperparameters.
    std::vector<std::size_t> counter(space.free.size(), 0);
    Eigen::VectorXd trial(nfree);
    while (true) {
      for (std::size_t k = 0; k < counter.size(); ++k)
        trial[static_cast<Eigen::Index>(k)] =
            grids[space.free[k]][counter[k]];
      const double v = objective(trial);
      if (v < best) {
        best = v;
        theta = trial;
      }
      std::size_t k = 0;
      while (k < counter.size() && ++counter[k] == grids[space.free[k]].size()) counter[k++] = 0;
      if (k == counter.size()) break;
    }
    if (!std::isfinite(best))
      fail(ErrorCode::CholeskyFailure, "kernel matrix not positive definite for any grid point");

    Eigen::VectorXd step(nfree);
    for (Eigen::Index k = 0; k < nfree; ++k) step[k] = space.step[space.free[static_cast<std::size_t>(k)]];

    double refined = kInf;
    Eigen::VectorXd candidate =
        nelder_mead(objective, theta, step, s.max_iterations, s.simplex_tolerance, refined);
    if (refined < best) {
      best = refined;
      theta = candidate;
    }
    SplitMix64 rng(seed);
    for (int r = 0; r < cfg.restarts; ++r) {
      Eigen::VectorXd start(nfree);
      for (Eigen::Index k = 0; k < nfree; ++k) {
        const auto f = static_cast<std::size_t>(space.free[static_cast<std::size_t>(k)]);
        start[k] = rng.uniform(space.lo[f], space.hi[f]);
      }
      candidate = nelder_mead(objective, start, step, s.max_iterations, s.simplex_tolerance, refined);
      if (refined < best) {
        best = refined;
        theta = candidate;
      }
    }
  }

  const auto h = space.expand(theta);
  out.length_scale = h[0];
  out.output_scale = h[1];
  out.noise = h[2];
  if (!(out.length_scale > 0.0) || !(out.output_scale > 0.0) || !(out.noise >= 0.0))
    fail(ErrorCode::InvalidArgument, "GPR hyperparameters must be positive (noise >= 0)");
  refactor_gpr_output(u, y, out);
  return out;
}

}  // namespace

Eigen::MatrixXd squared_exponential(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                    double length_scale, double output_scale) {
  return kernel_from_distances(detail::squared_distances(a, b), length_scale, output_scale);
}

double log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               double length_scale, double output_scale, double noise) {
  if (x.rows() != y.size()) fail(ErrorCode::DimensionMismatch, "inputs and targets differ in length");
  if (x.rows() < 2) fail(ErrorCode::TooFewPoints, "need at least 2 training points");
  const auto f = factorize(squared_exponential(x, x, length_scale, output_scale), noise);
  if (!f) fail(ErrorCode::CholeskyFailure, "kernel matrix not positive definite after max jitter");
  return lml_from_factor(f->lower, y);
}

void refactor_gpr_output(const Eigen::MatrixXd& train_inputs, const Eigen::VectorXd& y,
                         GprOutput& out) {
  const auto k = squared_exponential(train_inputs, train_inputs, out.length_scale, out.output_scale);
  auto f = factorize(k, out.noise);
  if (!f) fail(ErrorCode::CholeskyFailure, "kernel matrix not positive definite after max jitter");
  out.jitter = f->jitter;
  out.log_likelihood = lml_from_factor(f->lower, y);
  out.chol = std::move(f->lower);
  const Eigen::VectorXd w = out.chol.triangularView<Eigen::Lower>().solve(y);
  out.alpha = out.chol.transpose().triangularView<Eigen::Upper>().solve(w);
}

GprModel train_gpr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const GprConfig& config,
                   const std::optional<ParameterSpace>& space) {
  if (x.rows() < 2) fail(ErrorCode::TooFewPoints, "GPR needs at least 2 training points");
  if (config.noise && !(*config.noise >= 0.0))
    fail(ErrorCode::InvalidArgument, "noise variance must be >= 0");
  GprModel model;
  model.train_inputs = detail::normalized_inputs(x, y, space, model.space);
  const auto d2 = detail::squared_distances(model.train_inputs, model.train_inputs);
  model.outputs.reserve(static_cast<std::size_t>(y.cols()));
  for (Eigen::Index c = 0; c < y.cols(); ++c)
    model.outputs.push_back(fit_output(model.train_inputs, d2, y.col(c), config,
                                       derive_seed(config.seed, static_cast<std::uint64_t>(c))));
  return model;
}

GprPrediction predict_gpr(const GprModel& model, const Eigen::VectorXd& x) {
  const auto u = detail::normalized_query(model.space, x, model.input_dims());
  GprPrediction pred;
  pred.extrapolated = (u.array() < 0.0).any() || (u.array() > 1.0).any();
  const auto r = static_cast<Eigen::Index>(model.outputs.size());
  pred.mean.resize(r);
  pred.variance.resize(r);
  const Eigen::VectorXd d2 =
      (model.train_inputs.rowwise() - u.transpose()).rowwise().squaredNorm();
  for (Eigen::Index c = 0; c < r; ++c) {
    const auto& o = model.outputs[static_cast<std::size_t>(c)];
    const Eigen::VectorXd ks =
        o.output_scale * (-d2.array() / (2.0 * o.length_scale * o.length_scale)).exp().matrix();
    const Eigen::VectorXd v = o.chol.triangularView<Eigen::Lower>().solve(ks);
    double var = o.output_scale - v.squaredNorm();
    if (var < 0.0) var = 0.0;
    pred.mean[c] = o.y_mean + o.y_std * ks.dot(o.alpha);
    pred.variance[c] = o.y_std * o.y_std * var;
  }
  return pred;
}

}  // namespace podsurf
