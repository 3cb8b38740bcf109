#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "carc/game_state.hpp"

namespace carc {

// Tiered is order_moves; Engine keeps legal_actions order; Shuffled is a
// seeded permutation per node, for checking that order never changes values.
enum class MoveOrder : std::uint8_t { Tiered, Engine, Shuffled };

struct StarConfig {
  double lower = -100.0;  // L
  double upper = 100.0;   // U
  int max_depth = 3;      // decision plies, the root decision included
  int probing = 5;        // f; 0 is Star1, 1 is Star2
  MoveOrder order = MoveOrder::Tiered;
  std::uint64_t seed = 0; // only read by MoveOrder::Shuffled

  void validate() const;
};

struct StarCounters {
  std::int64_t expansions = 0;    // apply_action calls
  std::int64_t leaves = 0;
  std::int64_t clamped_leaves = 0;  // raw reward outside [L, U]
  std::int64_t chance_cuts = 0;
  std::int64_t probe_cuts = 0;
  std::int64_t probes = 0;

  StarCounters& operator+=(const StarCounters& o);
};

// (kind, probability) over the kinds that could be the next drawn tile: the
// playable kinds left in the stack, weighted by copies. Empty when the next
// draw would end the game.
std::vector<std::pair<KindId, double>> chance_distribution(const GameState& s);

// Stable partition of `actions` into meeple-in-city, meeple-in-monastery,
// meeple-in-road, no meeple, meeple-in-field.
std::vector<Action> order_moves(const GameState& s, std::span<const Action> actions);

// Depth counts decision plies still to search. A state with a drawn tile is
// a decision node; any other non-terminal state is a chance node over the
// next draw. Terminal states and depth 0 are leaves worth
// reward(s, perspective), clamped into `leaf_bounds` when given.
double expectimax(const GameState& s, int depth, Player perspective,
                  std::optional<std::pair<double, double>> leaf_bounds = std::nullopt,
                  StarCounters* counters = nullptr);

// Fail-hard searches: the result is exact when the true value lies strictly
// inside (alpha, beta), otherwise alpha or beta. Leaves are clamped to
// [config.lower, config.upper].
double star1(const GameState& s, int depth, double alpha, double beta, const StarConfig& config,
             Player perspective, StarCounters* counters = nullptr);
double star2_5(const GameState& s, int depth, double alpha, double beta, const StarConfig& config,
               Player perspective, StarCounters* counters = nullptr);

// Searches config.max_depth decision plies from the mover's point of view
// and returns the best action, ties to the earliest in move order. Throws
// Error(NoLegalActions).
Action star_best_action(const GameState& s, const StarConfig& config, StarCounters* counters = nullptr,
                        double* value = nullptr);

}  // namespace carc
