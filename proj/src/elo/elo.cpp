#include "pixelbench/elo/elo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "pixelbench/core/errors.hpp"

namespace pixelbench::elo {
namespace {

void check_tuple(const PerformanceTuple& f) {
  if (!std::isfinite(f.score) || !std::isfinite(f.valid_rate))
    throw ContractError("performance tuple has a non-finite component");
  if (f.valid_rate < 0.0 || f.valid_rate > 1.0)
    throw ContractError(fmt::format("valid_rate {} is outside [0, 1]", f.valid_rate));
}

// Pool with model names replaced by dense indices.
struct IndexedPool {
  std::vector<std::string> models;
  std::vector<std::uint32_t> a;
  std::vector<std::uint32_t> b;
  std::vector<Outcome> outcome;
};

IndexedPool index_pool(const ComparisonPool& pool) {
  IndexedPool out;
  out.models = pool_models(pool);
  std::map<std::string, std::uint32_t> id;
  for (std::uint32_t i = 0; i < out.models.size(); ++i) id[out.models[i]] = i;
  for (const MatchRecord& m : pool) {
    out.a.push_back(id.at(m.model_a));
    out.b.push_back(id.at(m.model_b));
    out.outcome.push_back(m.outcome);
  }
  return out;
}

void apply_order(const IndexedPool& pool, std::span<const std::size_t> order, double k, std::vector<double>& ratings) {
  ratings.assign(pool.models.size(), kInitialRating);
  for (std::size_t idx : order) {
    double& ra = ratings[pool.a[idx]];
    double& rb = ratings[pool.b[idx]];
    std::tie(ra, rb) = update_pair(ra, rb, pool.outcome[idx], k);
  }
}

nlohmann::json table_json(const StabilizedTable& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, stats] : table)
    j[name] = {{"rating", stats.mean}, {"display", display_rating(stats.mean)}, {"std", stats.stddev}};
  return j;
}

std::string table_text(const StabilizedTable& table) {
  std::vector<std::pair<std::string, RatingStats>> rows(table.begin(), table.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.second.mean > y.second.mean; });
  std::string out;
  for (const auto& [name, stats] : rows)
    out += fmt::format("  {:<24} {:>6}  (std {:.2f})\n", name, display_rating(stats.mean), stats.stddev);
  return out;
}

}  // namespace

Pairing pair_models(std::vector<std::string> models, Rng& rng) {
  Pairing out;
  if (models.size() < 2) return out;
  rng.shuffle(std::span(models));
  for (std::size_t i = 0; i + 1 < models.size(); i += 2) out.pairs.emplace_back(models[i], models[i + 1]);
  if (models.size() % 2 == 1) out.bye = models.back();
  return out;
}

Outcome compare(const PerformanceTuple& a, const PerformanceTuple& b) {
  check_tuple(a);
  check_tuple(b);
  if (a.score != b.score) return a.score > b.score ? Outcome{1.0, 0.0} : Outcome{0.0, 1.0};
  if (a.valid_rate != b.valid_rate) return a.valid_rate > b.valid_rate ? Outcome{1.0, 0.0} : Outcome{0.0, 1.0};
  return {0.5, 0.5};
}

std::pair<double, double> expected_score(double r_a, double r_b) {
  const double e_a = 1.0 / (1.0 + std::pow(10.0, (r_b - r_a) / 400.0));
  const double e_b = 1.0 / (1.0 + std::pow(10.0, (r_a - r_b) / 400.0));
  return {e_a, e_b};
}

std::pair<double, double> update_pair(double r_a, double r_b, Outcome s, double k_factor) {
  const auto [e_a, e_b] = expected_score(r_a, r_b);
  return {r_a + k_factor * (s.s_a - e_a), r_b + k_factor * (s.s_b - e_b)};
}

std::vector<std::string> pool_models(const ComparisonPool& pool) {
  std::set<std::string> names;
  for (const MatchRecord& m : pool) {
    names.insert(m.model_a);
    names.insert(m.model_b);
  }
  return {names.begin(), names.end()};
}

RatingTable run_pass(const ComparisonPool& pool, std::span<const std::size_t> order, double k_factor) {
  if (order.size() != pool.size())
    throw ContractError(fmt::format("order has {} entries for a pool of {}", order.size(), pool.size()));
  std::vector<char> seen(pool.size(), 0);
  for (std::size_t i : order) {
    if (i >= pool.size() || seen[i]) throw ContractError("order is not a permutation of the pool indices");
    seen[i] = 1;
  }
  const IndexedPool indexed = index_pool(pool);
  std::vector<double> ratings;
  apply_order(indexed, order, k_factor, ratings);
  RatingTable table;
  for (std::size_t m = 0; m < indexed.models.size(); ++m) table[indexed.models[m]] = ratings[m];
  return table;
}

StabilizedTable stabilize(const ComparisonPool& pool, const StabilizationConfig& cfg) {
  if (cfg.passes < 1) throw ContractError("stabilization needs at least one pass");
  if (!(cfg.k_factor > 0.0)) throw ContractError("k_factor must be positive");
  const IndexedPool indexed = index_pool(pool);
  const std::size_t model_count = indexed.models.size();
  const auto passes = static_cast<std::size_t>(cfg.passes);
  // Every pass's ratings are kept so the merge below runs in pass order
  // whatever the thread count.
  std::vector<double> results(passes * model_count);

  unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, passes));
  auto worker = [&](unsigned t) {
    std::vector<std::size_t> order(pool.size());
    std::vector<double> ratings;
    for (std::size_t i = t; i < passes; i += threads) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(derive_seed(cfg.shuffle_seed, {static_cast<std::uint64_t>(i)}));
      rng.shuffle(std::span(order));
      apply_order(indexed, order, cfg.k_factor, ratings);
      std::copy(ratings.begin(), ratings.end(), results.begin() + static_cast<std::ptrdiff_t>(i * model_count));
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool_threads;
    for (unsigned t = 0; t < threads; ++t) pool_threads.emplace_back(worker, t);
    for (auto& th : pool_threads) th.join();
  }

  StabilizedTable table;
  for (std::size_t m = 0; m < model_count; ++m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < passes; ++i) sum += results[i * model_count + m];
    const double mean = sum / static_cast<double>(passes);
    double sq = 0.0;
    for (std::size_t i = 0; i < passes; ++i) {
      const double d = results[i * model_count + m] - mean;
      sq += d * d;
    }
    const double stddev = passes > 1 ? std::sqrt(sq / static_cast<double>(passes - 1)) : 0.0;
    table[indexed.models[m]] = {mean, stddev};
  }
  return table;
}

RatingReport report(const ComparisonPool& pool, const StabilizationConfig& cfg) {
  if (pool.empty()) throw ContractError("cannot rank an empty pool");
  RatingReport out;
  out.config = cfg;
  out.record_count = pool.size();
  std::map<std::string, ComparisonPool> by_game;
  for (const MatchRecord& m : pool) by_game[m.game].push_back(m);
  for (const auto& [game, records] : by_game) out.per_game[game] = stabilize(records, cfg);
  out.global = stabilize(pool, cfg);
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& [game, table] : out.per_game) {
    for (const auto& [name, stats] : table) {
      sums[name].first += stats.mean;
      sums[name].second += 1;
    }
  }
  for (const auto& [name, acc] : sums) out.mean_of_games[name] = acc.first / acc.second;
  return out;
}

long display_rating(double rating) { return std::lround(rating); }

nlohmann::json report_to_json(const RatingReport& r) {
  nlohmann::json games = nlohmann::json::object();
  for (const auto& [game, table] : r.per_game) games[game] = table_json(table);
  nlohmann::json mean = nlohmann::json::object();
  for (const auto& [name, value] : r.mean_of_games) mean[name] = {{"rating", value}, {"display", display_rating(value)}};
  return {
      {"schema_version", kPoolSchemaVersion},
      {"passes", r.config.passes},
      {"shuffle_seed", r.config.shuffle_seed},
      {"k_factor", r.config.k_factor},
      {"initial_rating", kInitialRating},
      {"records", r.record_count},
      {"pairing", "same session seed for both sides of a match"},
      {"per_game", games},
      {"global", table_json(r.global)},
      {"mean_of_games", mean},
  };
}

std::string report_to_text(const RatingReport& r) {
  std::string out = fmt::format("Elo report: {} records, {} passes, K={}, seed={}\n", r.record_count, r.config.passes,
                                r.config.k_factor, r.config.shuffle_seed);
  for (const auto& [game, table] : r.per_game) out += fmt::format("\n[{}]\n{}", game, table_text(table));
  out += fmt::format("\n[global pool]\n{}", table_text(r.global));
  std::vector<std::pair<std::string, double>> rows(r.mean_of_games.begin(), r.mean_of_games.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  out += "\n[mean of per-game ratings]\n";
  for (const auto& [name, value] : rows) out += fmt::format("  {:<24} {:>6}\n", name, display_rating(value));
  return out;
}

nlohmann::json match_to_json(const MatchRecord& m) {
  return {
      {"schema_version", kPoolSchemaVersion},
      {"game", m.game},
      {"level", m.level},
      {"round", m.round},
      {"session_seed", m.session_seed},
      {"model_a", m.model_a},
      {"model_b", m.model_b},
      {"f_a", {m.f_a.score, m.f_a.valid_rate}},
      {"f_b", {m.f_b.score, m.f_b.valid_rate}},
      {"s_a", m.outcome.s_a},
      {"s_b", m.outcome.s_b},
  };
}

MatchRecord match_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kPoolSchemaVersion)
      throw ConfigError(fmt::format("unsupported pool schema_version {}", j.at("schema_version").dump()));
    MatchRecord m;
    m.game = j.at("game").get<std::string>();
    m.level = j.at("level").get<std::string>();
    m.round = j.at("round").get<std::int64_t>();
    m.session_seed = j.at("session_seed").get<std::uint64_t>();
    m.model_a = j.at("model_a").get<std::string>();
    m.model_b = j.at("model_b").get<std::string>();
    m.f_a = {j.at("f_a").at(0).get<double>(), j.at("f_a").at(1).get<double>()};
    m.f_b = {j.at("f_b").at(0).get<double>(), j.at("f_b").at(1).get<double>()};
    m.outcome = {j.at("s_a").get<double>(), j.at("s_b").get<double>()};
    const Outcome o = m.outcome;
    const bool legal = (o.s_a == 1.0 && o.s_b == 0.0) || (o.s_a == 0.0 && o.s_b == 1.0) || (o.s_a == 0.5 && o.s_b == 0.5);
    if (!legal) throw ConfigError(fmt::format("illegal outcome ({}, {})", o.s_a, o.s_b));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed match record: {}", e.what()));
  }
}

ComparisonPool read_pool(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read pool file {}", path.string()));
  ComparisonPool pool;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      pool.push_back(match_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
  }
  return pool;
}

void write_pool(const std::filesystem::path& path, const ComparisonPool& pool) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError(fmt::format("cannot write pool file {}", path.string()));
  for (const MatchRecord& m : pool) out << match_to_json(m).dump() << '\n';
}

void append_match(const std::filesystem::path& path, const MatchRecord& m) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw ConfigError(fmt::format("cannot append to pool file {}", path.string()));
  out << match_to_json(m).dump() << '\n';
  out.flush();
}

}  // namespace pixelbench::elo
