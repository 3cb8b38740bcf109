#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "carc/agents.hpp"
#include "carc/game_log.hpp"

namespace carc {

using Sequence = std::vector<KindId>;

// `count` shuffles of the deck's draw pile, deterministic in `seed`.
std::vector<Sequence> generate_sequences(const Deck& deck, int count, std::uint64_t seed);

// One line per sequence, kind ids separated by spaces. '#' starts a comment.
std::string format_sequences(const Deck& deck, const std::vector<Sequence>& sequences);
// Throws Error(Parse) on unknown ids and Error(Validation) when a line is not
// a permutation of the draw pile.
std::vector<Sequence> parse_sequences(const Deck& deck, std::string_view text);

struct MatchConfig {
  std::string match_id = "match";
  int games = 2;  // g, even
  std::vector<Sequence> sequences;
  AgentSpec agent_a;
  AgentSpec agent_b;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
  // Game i of the first half and game g/2 + i of the second half both use
  // sequence i mod sequences.size().
  int sequence_of(int game) const;
};

struct MatchRecord {
  MatchConfig config;
  std::vector<GameRecord> games;  // by game index; the first g/2 have A first
};

// Plays the mirrored match. Game i and its mirror share the agents' random
// stream; results are placed by game index, so any worker count gives the
// same record.
MatchRecord run_match(const std::shared_ptr<const Deck>& deck, const MatchConfig& config);

// Per-game metrics of agent 0 (A) or 1 (B).
int meeples_placed(const GameRecord& g, int agent);
int turns_with_meeple(const GameRecord& g, int agent);
double twm(const GameRecord& g, int agent);  // t / 28 when first to play, t / 29 otherwise

double compute_mpg(const std::vector<GameRecord>& games, int agent);
double compute_twm(const std::vector<GameRecord>& games, int agent);

struct RoleSummary {
  int games = 0;
  int wins = 0;
  int draws = 0;
  int losses = 0;
  int forfeits = 0;  // games this agent forfeited
  double win_rate = 0.0;  // wins / games, draws in the denominator
  double mean_reward = 0.0;  // r, own final score minus the opponent's
  double mean_score = 0.0;   // v, own final score
  double mpg = 0.0;
  double twm = 0.0;
};

struct HalfSummary {
  int first_agent = 0;  // 0: A plays first, 1: B plays first
  std::array<RoleSummary, 2> agents;  // A, B
  // Mean virtual score after each global turn for P1 and P2. Games that end
  // sooner hold their final scores.
  std::vector<std::array<double, 2>> curve;
};

struct MatchSummary {
  std::string match_id;
  std::array<std::string, 2> agents;
  std::array<HalfSummary, 2> halves;
};

MatchSummary aggregate(const std::vector<GameRecord>& games, const std::string& match_id = "match");

// Comma-separated outputs with a header row.
void write_results_csv(std::ostream& out, const std::vector<GameRecord>& games);
void write_curves_csv(std::ostream& out, const MatchSummary& summary);
// The summary laid out as one table per half: criteria rows, agent columns.
std::string format_summary(const MatchSummary& summary);

// Match manifest, a JSON object:
//   match_id, games, agent_a, agent_b, seed, workers (optional, default 1),
//   and either sequences (a sequence file path, relative to the manifest) or
//   sequence_count plus sequence_seed.
struct Manifest {
  MatchConfig config;
  std::string sequences_path;  // empty when generated
  int sequence_count = 0;
  std::uint64_t sequence_seed = 0;
};
Manifest parse_manifest(std::string_view json_text, const Deck& deck, const std::string& base_dir);
std::string manifest_json(const Manifest& m);

}  // namespace carc
