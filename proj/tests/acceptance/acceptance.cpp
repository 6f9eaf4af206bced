// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <sys/wait.h>

#include "parser_corpus.hpp"
#include "pixelbench/agent/agent.hpp"
#include "pixelbench/core/digest.hpp"
#include "pixelbench/core/rng.hpp"
#include "pixelbench/elo/elo.hpp"
#include "pixelbench/games/catalog.hpp"
#include "pixelbench/harness/config.hpp"
#include "pixelbench/harness/runner.hpp"
#include "pixelbench/harness/trajectory.hpp"
#include "pixelbench/models/oracle.hpp"
#include "pixelbench/models/policies.hpp"
#include "synthetic_pool.hpp"
#include "temp_dir.hpp"

namespace {

using namespace pixelbench;

struct Verdict {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool condition, std::string what) {
    if (!condition) {
      ok = false;
      notes.push_back(std::move(what));
    }
  }
  void note(std::string what) { notes.push_back(std::move(what)); }
};

struct Criterion {
  std::string name;
  double time_limit_s;
  std::function<void(Verdict&)> body;
};

const std::vector<const LevelSpec*>& all_levels() {
  static const std::vector<const LevelSpec*> levels = [] {
    std::vector<const LevelSpec*> out;
    for (const LevelSpec& l : games::LevelRegistry::builtin().levels()) out.push_back(&l);
    return out;
  }();
  return levels;
}

// Plays a session without rendering, choosing each action with `decide`.
double play_score(const LevelSpec& level, std::uint64_t seed, const std::function<Action(const GameSession&)>& decide) {
  GameSession session = games::create_session(level, SessionSeed{seed});
  while (!session.done()) session.advance(decide(session));
  return static_cast<double>(session.score());
}

double oracle_score(const LevelSpec& level, std::uint64_t seed) {
  models::Oracle oracle;
  return play_score(level, seed, [&](const GameSession& s) { return oracle.decide(s); });
}

double random_score(const LevelSpec& level, std::uint64_t seed) {
  models::RandomPolicy policy(derive_seed(0xacce55, {seed}));
  return play_score(level, seed, [&](const GameSession& s) { return policy.draw(s.alphabet()); });
}

double max_abs_gap(const elo::StabilizedTable& a, const elo::StabilizedTable& b) {
  double gap = 0.0;
  for (const auto& [name, stats] : a) gap = std::max(gap, std::abs(stats.mean - b.at(name).mean));
  return gap;
}

double max_abs_gap(const elo::RatingTable& a, const elo::RatingTable& b) {
  double gap = 0.0;
  for (const auto& [name, r] : a) gap = std::max(gap, std::abs(r - b.at(name)));
  return gap;
}

// ---------------------------------------------------------------------------

void elo_formula(Verdict& v) {
  const auto [e_a, e_b] = elo::expected_score(1600, 1400);
  v.require(std::abs(e_a - 0.759747) <= 1e-6, fmt::format("E(1600,1400) = {:.9f}", e_a));
  const auto [r_a, r_b] = elo::update_pair(1500, 1500, {1, 0}, 32);
  v.require(r_a == 1516.0 && r_b == 1484.0, fmt::format("update gave ({}, {})", r_a, r_b));
  Rng rng(17);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto [x, y] = elo::expected_score(rng.between(0, 3000), rng.between(0, 3000));
    worst = std::max(worst, std::abs(x + y - 1.0));
  }
  v.require(worst <= 1e-12, fmt::format("|e_a + e_b - 1| reached {:.3e}", worst));
  v.note(fmt::format("E = {:.6f}, worst sum error {:.1e}", e_a, worst));
}

void conservation(Verdict& v) {
  constexpr int kModels = 8;
  std::vector<double> ratings(kModels, elo::kInitialRating);
  Rng rng(23);
  const elo::Outcome outcomes[] = {{1, 0}, {0, 1}, {0.5, 0.5}};
  for (int n = 0; n < 100000; ++n) {
    const auto i = rng.below(kModels);
    auto j = rng.below(kModels - 1);
    if (j >= i) ++j;
    std::tie(ratings[i], ratings[j]) = elo::update_pair(ratings[i], ratings[j], outcomes[rng.below(3)], 32);
  }
  const double drift = std::abs(std::accumulate(ratings.begin(), ratings.end(), 0.0) - elo::kInitialRating * kModels);
  v.require(drift <= 1e-6, fmt::format("rating sum drifted by {:.3e}", drift));
  v.note(fmt::format("drift {:.2e} after 1e5 updates", drift));
}

void stabilization(Verdict& v) {
  const auto pool = testing::skill_pool({1300, 1400, 1500, 1500, 1600, 1700}, 500, 31, 0.1);
  elo::StabilizationConfig cfg;
  cfg.passes = 2000;
  cfg.shuffle_seed = 1;
  const auto first = elo::stabilize(pool, cfg);
  cfg.shuffle_seed = 2;
  const auto second = elo::stabilize(pool, cfg);
  const double stable_gap = max_abs_gap(first, second);
  v.require(stable_gap <= 3.0, fmt::format("stabilized tables differ by {:.2f}", stable_gap));

  std::vector<std::size_t> forward(pool.size());
  std::iota(forward.begin(), forward.end(), 0);
  std::vector<std::size_t> reversed(forward.rbegin(), forward.rend());
  const double single_gap = max_abs_gap(elo::run_pass(pool, forward, 32), elo::run_pass(pool, reversed, 32));
  v.require(single_gap > 5.0, fmt::format("single passes differ by only {:.2f}", single_gap));
  v.note(fmt::format("T=2000 seeds 1/2 differ by {:.2f}; forward vs reversed single pass {:.1f}", stable_gap, single_gap));
}

void skill_recovery(Verdict& v) {
  const std::vector<double> truth{1250, 1350, 1450, 1550, 1650, 1750};
  const auto pool = testing::skill_pool(truth, 1000, 5);
  elo::StabilizationConfig cfg;
  cfg.passes = 2000;
  cfg.shuffle_seed = 3;
  const auto table = elo::stabilize(pool, cfg);
  const auto names = testing::model_names(static_cast<int>(truth.size()));
  double worst = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (i + 1 < truth.size())
      v.require(table.at(names[i]).mean < table.at(names[i + 1]).mean,
                fmt::format("{} is not below {}", names[i], names[i + 1]));
    for (std::size_t j = i + 1; j < truth.size(); ++j) {
      const double gap = table.at(names[j]).mean - table.at(names[i]).mean;
      worst = std::max(worst, std::abs(gap - (truth[j] - truth[i])));
    }
  }
  v.require(worst <= 40.0, fmt::format("a pairwise gap is off by {:.1f}", worst));
  std::string got;
  for (const auto& n : names) got += fmt::format(" {:.0f}", table.at(n).mean);
  v.note(fmt::format("ratings{}; worst gap error {:.1f}", got, worst));
}

void rating_aggregates(Verdict& v) {
  const double per_game[] = {1611, 1589, 1500, 1514, 1550};
  const double mean = std::accumulate(std::begin(per_game), std::end(per_game), 0.0) / 5.0;
  v.require(elo::display_rating(mean) == 1553, fmt::format("mean {} displays as {}", mean, elo::display_rating(mean)));

  elo::ComparisonPool pool = testing::skill_pool({1400, 1600}, 60, 8);
  for (auto& m : pool) m.game = "alpha";
  auto more = testing::skill_pool({1600, 1400}, 20, 9);
  for (auto& m : more) m.game = "beta";
  pool.insert(pool.end(), more.begin(), more.end());
  elo::StabilizationConfig cfg;
  cfg.passes = 200;
  const auto report = elo::report(pool, cfg);
  const auto j = elo::report_to_json(report);
  v.require(j.contains("per_game") && j.contains("global") && j.contains("mean_of_games"), "report lacks an aggregate");
  const double expected_m0 = (report.per_game.at("alpha").at("m0").mean + report.per_game.at("beta").at("m0").mean) / 2;
  v.require(std::abs(report.mean_of_games.at("m0") - expected_m0) < 1e-9, "mean_of_games is not the per-game mean");
  v.require(std::abs(report.global.at("m0").mean - report.mean_of_games.at("m0")) > 1.0,
            "global and mean-of-games coincide on an unbalanced pool");
  const std::string text = elo::report_to_text(report);
  v.require(text.find("[alpha]") != std::string::npos && text.find("[global pool]") != std::string::npos &&
                text.find("mean of per-game") != std::string::npos,
            "text report lacks a section");
  v.note(fmt::format("mean {:.1f} -> {}; m0 global {:.0f} vs mean of games {:.0f}", mean, elo::display_rating(mean),
                     report.global.at("m0").mean, report.mean_of_games.at("m0")));
}

// Digest of every frame hash and the final score of one seeded random tape.
std::string tape_digest(const LevelSpec& level) {
  GameSession session = games::create_session(level, SessionSeed{4242});
  Rng tape(derive_seed(99, {fnv1a64(level.key)}));
  std::string hashes = session.render().hash();
  while (!session.done()) {
    const StepResult r = session.step(session.alphabet()[tape.below(session.alphabet().size())]);
    hashes += r.frame.hash();
  }
  hashes += fmt::format("|{}|{}", session.score(), session.step_index());
  return sha256_hex(hashes);
}

// Recorded with this build; a different platform must reproduce them.
const std::map<std::string, std::string> kGoldenTapeDigests = {
    {"race-1", "116bd573d2332617535aea6c9872f0ac3072b055349e1f1b903328faaf9952bf"},
    {"race-2", "21ae7b31f15b008ae39f9a915974b284a3ba9d8f6e330aebd80e779b601b824e"},
    {"race-3", "30e0b6cb8e03eb093af62402aca90b3d8a8eb46e1e124e306fe8042016c7efd8"},
    {"race-1-nohistory", "532dbeb4d2036f2746ec1d6fa9f41bd62c2db2318008403b76618b42d2413d8f"},
    {"race-2-nohistory", "7dfe4f3827f01868d9430c7075cc2196ecb430798fbdcd823d69e52def049367"},
    {"race-3-nohistory", "4b3944fafba089b82aa5489096c813aec56f43c77652afe7da8e6a8126e2dd42"},
    {"race-4", "c623d960d01c87dbd4a4ab815f6679ae724931a1f499a868d467408752510679"},
    {"race-5", "e36c168f00168b9d1be62250533686b47d9772f7f06701b4b3f130e60f45d49a"},
    {"race-6", "db3eced9aa38265626aeb8861caf4458a060562c0fe957e98d1b62b1d379002e"},
    {"flappybird-1", "300a90551baa27da972b53f983706f1e11c54cad3cfad81456f8a35f772cb45c"},
    {"flappybird-2", "eae75890a8786f2ecc27980a6e651cec72d28fb3e45ab00e5f90497eb44e2b2b"},
    {"flappybird-3", "110f8c2fd80fe4a5df76cd9426ef01d5edadcfd45d7a8dfe0f1363fb8d0bf3f6"},
    {"flappybird-4", "fbecafd0e255d0fcbc7b11ba04477c1bab07476fb451d398ae37ab4abc0cbe89"},
    {"flappybird-5", "8c41327ebcb799513d03bac8368f7d6e93c986102d830d03ca3e5daf673d65c6"},
    {"flappybird-6", "8dfc306982f77e8d2c92fc2851f424e480e2141530dbc86647b41367a760f1b6"},
    {"flappybird-7", "629ccd2fdea199522a727e683fd86402d805217bb482b86fa2105ab6780f771b"},
    {"pong-0", "4c1828110784b3e89a30cfccd048cb734bf72a9eb51eb9cf188783b83229d6ae"},
    {"pong-1", "71e26fb6295ef4abec119aa58aaf3ebf58bd954c4375deecd978b45e673bd371"},
    {"pong-2", "11dcecfa36f77afc34df5f3bfa5624d15cbb20d1915d30452bba1a7b56afaf98"},
    {"supermario-1", "bfc07a1189feeb3ec24cc86f2ebd80b841b7fabc32636eb77f201e0e79554288"},
    {"supermario-2", "7cff0a6e6e32e785432cef0f7a9fdd1b5ab490ec73412fa3ca851250eb67e695"},
    {"supermario-3", "316a4b6717dce3e7432567005a3fe16c04d7aeb4a1efa44355a52b6927a4ed7e"},
    {"supermario-4", "9c541b66ce2035b3fd2c723e44c826bb030ecbbf68edc596e5f6f6419a207ca0"},
    {"supermario-5", "79c7424e7ab8ba4b9ec9411cdb7cfdd3f7ad878a782ef06c6cf03d22b2ed481b"},
    {"supermario-6", "da6f08d9ad324b6f0616e35096670b03a5e03bbbc18a05cccf1caef0f78b68d7"},
    {"supermario-7", "bafbe1f97c2896c04adff436862f0d73deca6d10703c15ef80fdc151672ab719"},
    {"supermario-8", "5c1dcd892ba3fb447945830c07dbd36fd22e1a8b5874356dce87c7f0892eb042"},
    {"supermario-9", "d5699b485017eaae1c17297ed5d02d55ba3f3ddce65e91e4cc7311cea7f5e308"},
    {"supermario-10", "b6a85936858aaffc961ac3d75901e9f50558f69a60702e84e4f5434f23a93334"},
    {"tempestrun-1", "594becb8e5366fa4a2e45d5d06522ff6213a93d708e1cff72a0c71692d959825"},
    {"tempestrun-2", "8ece9068e84d5139f627287b707a5c0b8c2ceca7beae869b9a3adabddee989c9"},
    {"tempestrun-3", "1e3a9a4878d1332d0efb8d981f1ed8a13ca6a8bbf4fdc83e911e15147fa61fee"},
    {"tempestrun-4", "0b4e879e74dfca5495003e44f0c5bd81ec999637f66ece3ee2d716a97623ed3a"},
};

void determinism_and_replay(Verdict& v) {
  std::map<GameId, const LevelSpec*> one_per_game;
  int mismatched_golden = 0;
  for (const LevelSpec* level : all_levels()) {
    const std::string a = tape_digest(*level);
    const std::string b = tape_digest(*level);
    v.require(a == b, fmt::format("{}: two runs of the same tape differ", level->key));
    const auto golden = kGoldenTapeDigests.find(level->key);
    if (golden == kGoldenTapeDigests.end()) {
      v.require(false, fmt::format("{}: no golden digest (got {})", level->key, a));
    } else if (golden->second != a) {
      ++mismatched_golden;
      v.require(false, fmt::format("{}: digest {} differs from the recorded {}", level->key, a, golden->second));
    }
  }

  pixelbench::testing::TempDir dir("acceptance-replay");
  std::vector<harness::EpisodeRecord> episodes;
  const auto& levels = all_levels();
  for (int i = 0; i < 50; ++i) {
    const LevelSpec& level = *levels[static_cast<std::size_t>(i) % levels.size()];
    models::ModelProfile profile;
    profile.name = "random";
    profile.kind = models::BackendKind::random;
    profile.seed = static_cast<std::uint64_t>(i);
    models::RandomPolicy backend(profile.seed);
    episodes.push_back(harness::run_episode(level, SessionSeed{static_cast<std::uint64_t>(1000 + i)}, profile, backend));
  }
  harness::write_trajectories(dir / "episodes.jsonl", episodes);
  int divergent = 0;
  for (const auto& e : harness::read_trajectories(dir / "episodes.jsonl")) {
    const auto outcome = harness::verify_episode(e);
    if (!outcome.ok) {
      ++divergent;
      v.require(false, fmt::format("{} diverged: {}", e.level, outcome.message));
    }
  }
  v.note(fmt::format("{} tapes stable, {} golden mismatches, 50 episodes replayed with {} divergent", levels.size(),
                     mismatched_golden, divergent));
}

// Levels whose oracle target is pinned to the human maximum.
bool exact_target(const LevelSpec& level) {
  switch (level.game) {
    case GameId::race:
      return level.perspective == Perspective::map_view;
    case GameId::flappybird:
    case GameId::pong:
      return true;
    default:
      return false;
  }
}

void oracle_solvability(Verdict& v) {
  int exact = 0;
  for (const LevelSpec* level : all_levels()) {
    double worst = level->human_max_score;
    for (std::uint64_t seed = 0; seed < 10; ++seed) worst = std::min(worst, oracle_score(*level, seed));
    if (exact_target(*level)) {
      ++exact;
      v.require(worst == level->human_max_score,
                fmt::format("{}: oracle reached {} of {}", level->key, worst, level->human_max_score));
    } else {
      v.require(worst >= 0.5 * level->human_max_score,
                fmt::format("{}: oracle reached {} of {}", level->key, worst, level->human_max_score));
    }
  }
  v.note(fmt::format("{} levels at human_max exactly, the rest at >= 50%, 10 seeds each", exact));
}

void random_sanity(Verdict& v) {
  constexpr std::uint64_t kEpisodes = 200;
  std::map<std::string, double> random_mean;
  double worst_ratio = 0.0;
  for (const LevelSpec* level : all_levels()) {
    double random_total = 0.0;
    double oracle_total = 0.0;
    for (std::uint64_t seed = 0; seed < kEpisodes; ++seed) {
      random_total += random_score(*level, seed);
      oracle_total += oracle_score(*level, seed);
    }
    const double ratio = random_total / oracle_total;
    worst_ratio = std::max(worst_ratio, ratio);
    random_mean[level->key] = random_total / kEpisodes;
    v.require(ratio < 0.5, fmt::format("{}: random reaches {:.0f}% of the oracle", level->key, 100 * ratio));
  }
  auto ladder = [&](std::initializer_list<const char*> keys) {
    std::string shown;
    const char* prev = nullptr;
    for (const char* key : keys) {
      if (prev != nullptr)
        v.require(random_mean[key] <= random_mean[prev],
                  fmt::format("random mean rises from {} to {}", prev, key));
      shown += fmt::format(" {:.2f}", random_mean[key]);
      prev = key;
    }
    return shown;
  };
  const std::string flappy = ladder({"flappybird-1", "flappybird-2", "flappybird-3"});
  const std::string pong = ladder({"pong-0", "pong-1", "pong-2"});
  v.note(fmt::format("worst random/oracle {:.2f}; flappy 1-3{}; pong 0-2{}", worst_ratio, flappy, pong));
}

void parser_corpus(Verdict& v) {
  agent::ValidityLedger ledger;
  const auto corpus = pixelbench::testing::parser_corpus();
  v.require(corpus.size() == 20, fmt::format("corpus holds {} replies", corpus.size()));
  int mislabeled = 0;
  for (const auto& c : corpus) {
    const auto parsed = agent::parse_response(c.reply, c.alphabet);
    ledger.record(parsed.valid());
    if (parsed.action != c.expected) ++mislabeled;
  }
  v.require(mislabeled == 0, fmt::format("{} replies parsed against their label", mislabeled));
  // Counted by hand from the corpus listing: 14 well-formed, 6 not.
  v.require(ledger.valid_actions() == 14 && ledger.total_actions() == 20,
            fmt::format("ledger counted {}/{}", ledger.valid_actions(), ledger.total_actions()));
  v.require(ledger.valid_rate() == 0.7, fmt::format("valid_rate {}", ledger.valid_rate()));
  v.note(fmt::format("{} replies, valid_rate {}", corpus.size(), ledger.valid_rate()));
}

struct CliOutput {
  int status = -1;
  std::string text;
};

CliOutput run_cli(const std::string& args) {
  const std::string command = std::string(PIXELBENCH_CLI) + " " + args + " 2>/dev/null";
  CliOutput out;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return out;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) out.text.append(buffer, n);
  const int raw = ::pclose(pipe);
  out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++n;
  return n;
}

void end_to_end(Verdict& v) {
  pixelbench::testing::TempDir dir("acceptance-e2e");
  harness::EvaluationConfig cfg;
  for (std::uint64_t seed : {11, 22}) {
    models::ModelProfile p;
    p.name = fmt::format("random-{}", seed);
    p.kind = models::BackendKind::random;
    p.seed = seed;
    cfg.models.push_back(p);
  }
  models::ModelProfile oracle;
  oracle.name = "oracle";
  oracle.kind = models::BackendKind::oracle;
  cfg.models.push_back(oracle);
  cfg.admit_oracles = true;
  cfg.levels = {"flappybird-1", "pong-0"};
  cfg.rounds = 10;
  cfg.master_seed = 2024;
  cfg.output_dir = dir / "run";
  const auto result = harness::run_evaluation(cfg);

  // Three models pair once per round with one bye.
  constexpr std::size_t kExpectedRecords = 2 * 10 * 1;
  v.require(result.complete && result.pool.size() == kExpectedRecords,
            fmt::format("pool holds {} records", result.pool.size()));
  v.require(count_lines(dir / "run" / harness::kPoolFile) == kExpectedRecords, "pool file is incomplete");
  const auto episodes = harness::read_trajectories(dir / "run" / harness::kTrajectoryFile);
  v.require(episodes.size() == 2 * kExpectedRecords, fmt::format("{} episodes persisted", episodes.size()));
  v.require(std::filesystem::exists(dir / "run" / harness::kConfigFile), "config snapshot missing");
  std::size_t frames = 0;
  for (const auto& e : episodes)
    for (const auto& s : e.steps)
      if (std::filesystem::exists(dir / "run" / s.frame_file)) ++frames;
  std::size_t steps = 0;
  for (const auto& e : episodes) steps += e.steps.size();
  v.require(frames == steps, fmt::format("{} of {} frames on disk", frames, steps));

  const std::string rank = fmt::format("rank --run '{}' --passes 2000 --seed 1", (dir / "run").string());
  const CliOutput first = run_cli(rank);
  const CliOutput second = run_cli(rank);
  v.require(first.status == 0 && !first.text.empty(), "rank failed");
  v.require(first.text == second.text, "rank output differs between runs");

  cfg.output_dir = dir / "again";
  v.require(harness::run_evaluation(cfg).pool == result.pool, "a second run produced a different pool");

  std::string leader;
  double best = -1;
  if (first.status == 0) {
    const nlohmann::json ranked = nlohmann::json::parse(first.text);
    for (const auto& [name, stats] : ranked.at("global").items()) {
      const double mean = stats.at("rating").get<double>();
      if (mean > best) {
        best = mean;
        leader = name;
      }
    }
  }
  v.require(leader == "oracle", fmt::format("{} ranks first", leader));
  v.note(fmt::format("{} records, {} episodes, {} frames; {} first at {:.0f}", result.pool.size(), episodes.size(), frames,
                     leader, best));
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria = {
      {"elo-formula", 1, elo_formula},
      {"conservation", 5, conservation},
      {"stabilization", 30, stabilization},
      {"skill-recovery", 60, skill_recovery},
      {"rating-aggregates", 60, rating_aggregates},
      {"determinism-replay", 60, determinism_and_replay},
      {"oracle-solvability", 120, oracle_solvability},
      {"random-sanity", 120, random_sanity},
      {"parser-corpus", 60, parser_corpus},
      {"end-to-end-offline", 180, end_to_end},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.require(false, fmt::format("threw: {}", e.what()));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(seconds < c.time_limit_s, fmt::format("took {:.1f}s, limit {:.0f}s", seconds, c.time_limit_s));
    if (!v.ok) ++failures;
    std::string notes;
    for (const auto& n : v.notes) notes += (notes.empty() ? "" : "; ") + n;
    fmt::print("{} {} [{:.2f}s] {}\n", v.ok ? "PASS" : "FAIL", c.name, seconds, notes);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
