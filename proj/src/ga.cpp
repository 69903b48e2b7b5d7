#include "podsurf/error.hpp"
#include "podsurf/io.hpp"
#include "podsurf/rng.hpp"
#include "podsurf/shapeopt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace podsurf {

namespace {

constexpr double kBlendAlpha = 0.5;

struct Individual {
  ParameterPoint genes;
  double value;
};

double evaluate(const ObjectiveFn& objective, const ParameterPoint& x, std::size_t& evaluations) {
  const double v = objective(x);
  ++evaluations;
  if (!std::isfinite(v)) fail(ErrorCode::NonFiniteObjective, "objective returned a non-finite value");
  return v;
}

const Individual& tournament(const std::vector<Individual>& pop, std::size_t size, SplitMix64& rng) {
  const Individual* winner = &pop[rng.below(pop.size())];
  for (std::size_t k = 1; k < size; ++k) {
    const auto& challenger = pop[rng.below(pop.size())];
    if (challenger.value < winner->value) winner = &challenger;
  }
  return *winner;
}

}  // namespace

void GaConfig::validate() const {
  if (population < 4 || population % 2 != 0)
    fail(ErrorCode::InvalidArgument, "population must be even and >= 4");
  if (tournament_size < 1) fail(ErrorCode::InvalidArgument, "tournament size must be >= 1");
  for (double r : {crossover_rate, mutation_rate})
    if (!(r >= 0.0 && r <= 1.0)) fail(ErrorCode::InvalidArgument, "rates must lie in [0, 1]");
  if (!(mutation_sigma >= 0.0) || !std::isfinite(mutation_sigma))
    fail(ErrorCode::InvalidArgument, "mutation sigma must be finite and >= 0");
}

GaResult ga_optimize(const ObjectiveFn& objective, const ParameterSpace& space,
                     const GaConfig& config) {
  config.validate();
  const auto p = static_cast<Eigen::Index>(space.dims());
  SplitMix64 rng(config.seed);
  GaResult result;

  auto clamp = [&](ParameterPoint& x) {
    for (Eigen::Index d = 0; d < p; ++d) x[d] = std::clamp(x[d], space[d].low, space[d].high);
  };
  auto record = [&](std::size_t generation, const std::vector<Individual>& pop) {
    double sum = 0.0;
    const Individual* best = &pop.front();
    for (const auto& ind : pop) {
      sum += ind.value;
      if (ind.value < best->value) best = &ind;
    }
    if (result.history.empty() || best->value < result.best_value) {
      result.best = best->genes;
      result.best_value = best->value;
    }
    result.history.push_back({generation, result.best_value, sum / static_cast<double>(pop.size())});
  };

  std::vector<Individual> pop;
  pop.reserve(config.population);
  for (std::size_t i = 0; i < config.population; ++i) {
    ParameterPoint x(p);
    for (Eigen::Index d = 0; d < p; ++d) x[d] = rng.uniform(space[d].low, space[d].high);
    pop.push_back({x, 0.0});
  }
  for (auto& ind : pop) ind.value = evaluate(objective, ind.genes, result.evaluations);
  record(0, pop);

  for (std::size_t gen = 1; gen <= config.generations; ++gen) {
    std::vector<Individual> next;
    next.reserve(config.population);
    next.push_back({result.best, result.best_value});  // elite

    std::vector<ParameterPoint> children;
    while (next.size() + children.size() < config.population) {
      ParameterPoint a = tournament(pop, config.tournament_size, rng).genes;
      ParameterPoint b = tournament(pop, config.tournament_size, rng).genes;
      if (rng.uniform() < config.crossover_rate) {
        for (Eigen::Index d = 0; d < p; ++d) {
          const double lo = std::min(a[d], b[d]), hi = std::max(a[d], b[d]);
          const double spread = kBlendAlpha * (hi - lo);
          const double ca = rng.uniform(lo - spread, hi + spread);
          const double cb = rng.uniform(lo - spread, hi + spread);
          a[d] = ca;
          b[d] = cb;
        }
      }
      for (auto* child : {&a, &b}) {
        for (Eigen::Index d = 0; d < p; ++d) {
          if (rng.uniform() < config.mutation_rate)
            (*child)[d] += config.mutation_sigma * (space[d].high - space[d].low) * rng.normal();
        }
        clamp(*child);
      }
      children.push_back(std::move(a));
      if (next.size() + children.size() < config.population) children.push_back(std::move(b));
    }
    for (auto& child : children) {
      const double v = evaluate(objective, child, result.evaluations);
      next.push_back({std::move(child), v});
    }
    pop = std::move(next);
    record(gen, pop);
  }
  return result;
}

std::string history_csv(const GaResult& result) {
  std::string out = "generation,best,mean\n";
  for (const auto& g : result.history)
    out += std::to_string(g.generation) + "," + io::format_double(g.best) + "," +
           io::format_double(g.mean) + "\n";
  return out;
}

}  // namespace podsurf
