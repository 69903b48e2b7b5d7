#include "podsurf/error.hpp"
#include "podsurf/fom.hpp"
#include "podsurf/rng.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <string>
#include <vector>

namespace podsurf {

namespace {

struct LexLess {
  bool operator()(const ParameterPoint& a, const ParameterPoint& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

ParameterPoint random_interior(const ParameterSpace& space, SplitMix64& rng) {
  ParameterPoint x(static_cast<Eigen::Index>(space.dims()));
  for (std::size_t d = 0; d < space.dims(); ++d)
    x[static_cast<Eigen::Index>(d)] = rng.uniform_open(space[d].low, space[d].high);
  return x;
}

}  // namespace

SamplingStrategy parse_strategy(std::string_view text) {
  if (text == "random") return RandomSampling{};
  if (text == "vertices-plus-random") return VerticesPlusRandom{};
  if (text.substr(0, 5) == "grid:") {
    GridSampling g;
    auto rest = text.substr(5);
    while (!rest.empty()) {
      const auto x = rest.find('x');
      const auto part = rest.substr(0, x);
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size() || v < 1)
        fail(ErrorCode::InvalidArgument, "bad grid spec '" + std::string(text) + "'");
      g.counts.push_back(v);
      if (x == std::string_view::npos) break;
      rest = rest.substr(x + 1);
    }
    if (g.counts.empty()) fail(ErrorCode::InvalidArgument, "empty grid spec");
    return g;
  }
  fail(ErrorCode::InvalidArgument, "unknown sampling strategy '" + std::string(text) +
                                       "' (expected random, vertices-plus-random or grid:AxB)");
}

std::vector<ParameterPoint> sample_space(const ParameterSpace& space,
                                         const SamplingStrategy& strategy, std::size_t count,
                                         std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::CountTooSmall, "sample count must be >= 1");
  const auto p = space.dims();
  SplitMix64 rng(seed);
  std::vector<ParameterPoint> out;
  std::set<ParameterPoint, LexLess> seen;
  auto add_random = [&](std::size_t total) {
    while (out.size() < total) {
      auto x = random_interior(space, rng);
      if (seen.insert(x).second) out.push_back(std::move(x));
    }
  };

  if (std::holds_alternative<RandomSampling>(strategy)) {
    add_random(count);
  } else if (std::holds_alternative<VerticesPlusRandom>(strategy)) {
    if (p >= 63 || count < (std::size_t{1} << p))
      fail(ErrorCode::CountTooSmall, "vertices-plus-random needs count >= 2^p = " +
                                         std::to_string(std::size_t{1} << std::min<std::size_t>(p, 62)));
    for (std::size_t v = 0; v < (std::size_t{1} << p); ++v) {
      ParameterPoint x(static_cast<Eigen::Index>(p));
      for (std::size_t d = 0; d < p; ++d)
        x[static_cast<Eigen::Index>(d)] = (v >> d) & 1U ? space[d].high : space[d].low;
      seen.insert(x);
      out.push_back(std::move(x));
    }
    add_random(count);
  } else {
    const auto& counts = std::get<GridSampling>(strategy).counts;
    if (counts.size() != p) fail(ErrorCode::DimensionMismatch, "grid needs one count per dimension");
    std::size_t total = 1;
    for (auto c : counts) total *= c;
    if (count != total)
      fail(ErrorCode::CountTooSmall, "grid holds " + std::to_string(total) + " points, " +
                                         std::to_string(count) + " requested");
    std::vector<std::size_t> idx(p, 0);
    for (std::size_t k = 0; k < total; ++k) {
      ParameterPoint x(static_cast<Eigen::Index>(p));
      for (std::size_t d = 0; d < p; ++d) {
        const auto& b = space[d];
        double v = 0.5 * (b.low + b.high);
        if (counts[d] > 1)
          v = idx[d] + 1 == counts[d] ? b.high
                                      : b.low + (b.high - b.low) * static_cast<double>(idx[d]) /
                                                    static_cast<double>(counts[d] - 1);
        x[static_cast<Eigen::Index>(d)] = v;
      }
      out.push_back(std::move(x));
      for (std::size_t d = 0; d < p && ++idx[d] == counts[d]; ++d) idx[d] = 0;
    }
  }
  return out;
}

}  // namespace podsurf
