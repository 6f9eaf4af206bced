#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pixelbench/core/rng.hpp"

namespace pixelbench::elo {

inline constexpr double kInitialRating = 1500.0;
inline constexpr double kDefaultKFactor = 32.0;
inline constexpr int kPoolSchemaVersion = 1;

struct PerformanceTuple {
  double score = 0.0;
  double valid_rate = 0.0;

  friend bool operator==(const PerformanceTuple&, const PerformanceTuple&) = default;
};

struct Outcome {
  double s_a = 0.5;
  double s_b = 0.5;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct MatchRecord {
  std::string game;
  std::string level;  // registry key
  std::int64_t round = 0;
  std::uint64_t session_seed = 0;
  std::string model_a;
  std::string model_b;
  PerformanceTuple f_a;
  PerformanceTuple f_b;
  Outcome outcome;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

using ComparisonPool = std::vector<MatchRecord>;

struct Pairing {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::optional<std::string> bye;
};

// Shuffles `models` with `rng` and pairs neighbours; an odd model out sits
// the round out. Fewer than two models yield no pairs.
Pairing pair_models(std::vector<std::string> models, Rng& rng);

// Lexicographic on (score, valid_rate). Throws ContractError on non-finite
// components or a valid_rate outside [0, 1].
Outcome compare(const PerformanceTuple& a, const PerformanceTuple& b);

std::pair<double, double> expected_score(double r_a, double r_b);
std::pair<double, double> update_pair(double r_a, double r_b, Outcome s, double k_factor);

using RatingTable = std::map<std::string, double>;

// Every model named in the pool, sorted.
std::vector<std::string> pool_models(const ComparisonPool& pool);

// Resets every model to the initial rating and applies the records in
// `order`. Throws ContractError unless `order` is a permutation of the pool
// indices.
RatingTable run_pass(const ComparisonPool& pool, std::span<const std::size_t> order, double k_factor);

struct StabilizationConfig {
  std::int64_t passes = 10000;
  std::uint64_t shuffle_seed = 0;
  double k_factor = kDefaultKFactor;
  // Worker threads; 0 picks the hardware concurrency. Results do not depend
  // on this value.
  unsigned threads = 0;
};

struct RatingStats {
  double mean = kInitialRating;
  double stddev = 0.0;
};

using StabilizedTable = std::map<std::string, RatingStats>;

// Pass i shuffles the pool with a stream derived from (shuffle_seed, i).
StabilizedTable stabilize(const ComparisonPool& pool, const StabilizationConfig& cfg);

struct RatingReport {
  StabilizationConfig config;
  std::size_t record_count = 0;
  std::map<std::string, StabilizedTable> per_game;
  StabilizedTable global;
  // Arithmetic mean of a model's per-game means over the games it played.
  std::map<std::string, double> mean_of_games;
};

// Throws ContractError on an empty pool.
RatingReport report(const ComparisonPool& pool, const StabilizationConfig& cfg);

long display_rating(double rating);

nlohmann::json report_to_json(const RatingReport& report);
std::string report_to_text(const RatingReport& report);

nlohmann::json match_to_json(const MatchRecord& m);
// Throws ConfigError on a schema mismatch.
MatchRecord match_from_json(const nlohmann::json& j);

// Line-delimited pool file, one record per line.
ComparisonPool read_pool(const std::filesystem::path& path);
void write_pool(const std::filesystem::path& path, const ComparisonPool& pool);
void append_match(const std::filesystem::path& path, const MatchRecord& m);

}  // namespace pixelbench::elo
