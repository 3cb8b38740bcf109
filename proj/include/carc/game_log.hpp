#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carc/agents.hpp"
#include "carc/game_state.hpp"

namespace carc {

enum class EndReason : std::uint8_t { Exhausted, Early, Forfeit };
const char* to_string(EndReason r);

// One placement, with the scores after it.
struct TurnRecord {
  int turn = 0;  // 1-based global turn
  Player player = Player::P1;
  KindId kind = 0;
  Action action{};
  int meeples_before = 0;  // mover's supply when the turn began
  std::array<int, 2> fixed{};
  std::array<int, 2> virtual_scores{};
};

struct GameRecord {
  std::string match_id;
  int game_index = 0;
  int sequence_id = 0;
  std::vector<KindId> sequence;
  bool a_first = true;                 // agent A plays P1
  std::array<std::string, 2> players;  // canonical specs of P1 and P2
  std::uint64_t seed = 0;              // agent stream
  std::vector<TurnRecord> turns;
  std::array<int, 2> final_scores{};   // P1, P2
  Outcome outcome = Outcome::Draw;
  int unplayable_draws = 0;
  EndReason end = EndReason::Exhausted;
  std::optional<Player> forfeiter;
  std::string forfeit_reason;

  bool forfeit() const { return forfeiter.has_value(); }
  int reward_p1() const { return final_scores[0] - final_scores[1]; }
  // Agent A is index 0, B is 1.
  Player role_of(int agent) const { return (agent == 0) == a_first ? Player::P1 : Player::P2; }
};

// Plays one game. An agent that throws or answers with an illegal action
// forfeits: the game stops, the opponent wins, and the record is flagged.
// `diagnostics`, when given, receives every agent report.
GameRecord play_game(const std::shared_ptr<const Deck>& deck, const std::vector<KindId>& sequence,
                     const AgentSpec& p1, const AgentSpec& p2, std::uint64_t seed, std::ostream* diagnostics = nullptr);

// Text log: a header line then one block per game. Ends every block with
// "end"; read_log accepts any number of blocks.
void write_log(std::ostream& out, const Deck& deck, const std::vector<GameRecord>& games);
std::vector<GameRecord> read_log(std::istream& in, const Deck& deck);  // throws Error(Parse)

struct ReplayReport {
  bool ok = true;
  int games = 0;
  int turns = 0;
  std::string message;  // "OK, N turns verified" or the first divergence
};

// Re-applies each logged game through the engine and compares every logged
// score, meeple supply and the final result.
ReplayReport verify_games(const std::shared_ptr<const Deck>& deck, const std::vector<GameRecord>& games);

}  // namespace carc
