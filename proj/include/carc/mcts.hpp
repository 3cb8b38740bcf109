#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "carc/game_state.hpp"
#include "carc/rng.hpp"

namespace carc {

struct MctsConfig {
  double exploration = 3.0;  // C
  int simulations = 100;     // s, random playouts per simulation step
  int iterations = 1000;     // tree iterations per move
  bool rave = false;
  double rave_bias = 10.0;   // b
  // With rave set, false leaves every AMAF counter at zero.
  bool amaf_updates = true;
  std::uint64_t seed = 0;

  // Throws Error(InvalidArgument) naming the first bad field.
  void validate() const;
};

enum class NodeKind : std::uint8_t { Decision, Chance };

// Decision nodes hold a drawn tile and branch on actions; their children are
// chance nodes, one per legal action. Chance nodes branch on the next drawn
// kind and are sampled, never selected.
struct SearchNode {
  NodeKind kind = NodeKind::Decision;
  // r and amaf_r are sums from this player's point of view: the player who
  // chose the inbound action. The root uses the opponent of its mover.
  Player player = Player::P1;
  Action action{};        // inbound action (chance nodes)
  KindId drawn = 0;       // drawn kind (decision nodes)
  std::uint64_t amaf_key = 0;  // inbound action key (chance nodes)
  std::int64_t n = 0;
  double r = 0.0;
  std::int64_t amaf_n = 0;
  double amaf_r = 0.0;
  bool expanded = false;  // children generated
  std::vector<std::int32_t> children;
  // Chance nodes: (kind, copies) of each playable kind, parallel to children.
  // A child id of -1 means that kind has not been drawn yet.
  std::vector<std::pair<KindId, int>> outcomes;
};

// Player-tagged AMAF key of placing `kind` by `a`.
std::uint64_t amaf_key(Player mover, KindId kind, const Action& a);

// r/n + C * sqrt(ln(parent_n) / n). Throws Error(UnvisitedChild) when n = 0.
double uct_value(const SearchNode& child, std::int64_t parent_n, double c);
// amaf_n / (n + amaf_n + 4 n amaf_n b^2); 1 when both counts are zero.
double rave_beta(std::int64_t n, std::int64_t amaf_n, double b);
// Blend of the direct and AMAF means plus the exploration term. Equals
// uct_value exactly when amaf_n = 0.
double uct_rave_value(const SearchNode& child, std::int64_t parent_n, double c, double b);

// Adds one visit and the signed reward to every node on `path`. With `rave`,
// also credits AMAF statistics: each child of a decision node on the path
// whose key was played later in the iteration, either further down the path
// or in `rollout_keys`.
void backpropagate(std::vector<SearchNode>& tree, std::span<const std::int32_t> path, double reward_p1,
                   std::span<const std::uint64_t> rollout_keys, bool rave);

struct RootChildStats {
  Action action{};
  std::int64_t n = 0;
  double mean = 0.0;
  std::int64_t amaf_n = 0;
  double amaf_mean = 0.0;
  double beta = 0.0;
};

class MctsSearch {
 public:
  explicit MctsSearch(MctsConfig config);

  // Runs config.iterations iterations from `root` and returns the most
  // visited root action, ties to the earliest legal action. Throws
  // Error(NoLegalActions) when the root has no drawn tile or no moves.
  Action run(const GameState& root);

  const std::vector<SearchNode>& tree() const { return tree_; }
  std::vector<RootChildStats> root_stats() const;
  std::int64_t rollouts() const { return rollouts_; }

 private:
  std::int32_t add_node(SearchNode node);
  void expand_decision(std::int32_t id, const GameState& s);
  void expand_chance(std::int32_t id, const GameState& s);
  std::int32_t select_child(const SearchNode& node) const;
  double simulate(const GameState& s);

  MctsConfig config_;
  Rng rng_;
  std::vector<SearchNode> tree_;
  std::vector<std::int32_t> path_;
  std::vector<std::uint64_t> rollout_keys_;
  std::vector<Placement> scratch_;
  std::int64_t rollouts_ = 0;
};

// One-shot search.
Action run_search(const GameState& root, const MctsConfig& config);

}  // namespace carc
