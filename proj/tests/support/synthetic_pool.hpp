#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pixelbench/core/rng.hpp"
#include "pixelbench/elo/elo.hpp"

namespace pixelbench::testing {

inline std::vector<std::string> model_names(int count) {
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) names.push_back(fmt::format("m{}", i));
  return names;
}

inline elo::MatchRecord make_match(std::string game, std::string a, std::string b, elo::Outcome o, std::int64_t round = 0) {
  elo::MatchRecord m;
  m.game = game;
  m.level = game + "-1";
  m.round = round;
  m.model_a = std::move(a);
  m.model_b = std::move(b);
  m.f_a = {o.s_a, 1.0};
  m.f_b = {o.s_b, 1.0};
  m.outcome = o;
  return m;
}

// Matches between distinct models drawn uniformly. Model i beats model j
// with the logistic probability of the rating gap true_ratings[i] -
// true_ratings[j]; draws happen with probability `draw_rate`.
inline elo::ComparisonPool skill_pool(const std::vector<double>& true_ratings, int matches, std::uint64_t seed,
                                      double draw_rate = 0.0) {
  Rng rng(seed);
  const auto names = model_names(static_cast<int>(true_ratings.size()));
  elo::ComparisonPool pool;
  for (int n = 0; n < matches; ++n) {
    const auto i = rng.below(true_ratings.size());
    auto j = rng.below(true_ratings.size() - 1);
    if (j >= i) ++j;
    const double p = 1.0 / (1.0 + std::pow(10.0, (true_ratings[j] - true_ratings[i]) / 400.0));
    const double u = rng.unit();
    elo::Outcome o{0.5, 0.5};
    if (u >= draw_rate) o = rng.unit() < p ? elo::Outcome{1.0, 0.0} : elo::Outcome{0.0, 1.0};
    pool.push_back(make_match("synthetic", names[i], names[j], o, n));
  }
  return pool;
}

}  // namespace pixelbench::testing
