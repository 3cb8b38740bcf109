#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "carc/game_state.hpp"
#include "carc/mcts.hpp"
#include "carc/star.hpp"

namespace carc {

enum class AgentType : std::uint8_t { Random, Mcts, MctsRave, Star };

const char* to_string(AgentType t);

struct AgentSpec {
  AgentType type = AgentType::Random;
  MctsConfig mcts;   // Mcts and MctsRave
  StarConfig star;   // Star
  std::uint64_t seed = 0;

  // Canonical "type:key=value,..." form; parse_agent_spec accepts it back.
  std::string to_string() const;
};

// Accepts "type" or "type:key=value,..." or a JSON object with a "type"
// member. Keys per type:
//   random     seed
//   mcts       C s iterations seed
//   mcts-rave  C s iterations b amaf seed
//   star       f L U d_max seed
// Throws Error(InvalidArgument) on unknown types or keys and bad values.
AgentSpec parse_agent_spec(std::string_view text);

class Agent {
 public:
  virtual ~Agent() = default;
  // `s` has a drawn tile with at least one legal action.
  virtual Action choose(const GameState& s) = 0;
  // Human-readable report on the last decision; empty when there is none.
  virtual std::string diagnostics() const { return {}; }
};

// `stream` separates the random streams of different games; the per-move
// seed mixes the spec seed, the stream and the turn number.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, std::uint64_t stream);

}  // namespace carc
