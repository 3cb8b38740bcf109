#include "carc/mcts.hpp"

#include <algorithm>
#include <cmath>

#include "carc/errors.hpp"

namespace carc {

namespace {

double signed_for(Player p, double reward_p1) { return p == Player::P1 ? reward_p1 : -reward_p1; }

}  // namespace

void MctsConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(exploration >= 0.0) || !std::isfinite(exploration)) fail("mcts: C must be a finite value >= 0");
  if (simulations < 1) fail("mcts: s must be >= 1");
  if (iterations < 1) fail("mcts: iterations must be >= 1");
  if (rave && (!(rave_bias > 0.0) || !std::isfinite(rave_bias))) fail("mcts: b must be > 0 with RAVE");
}

std::uint64_t amaf_key(Player mover, KindId kind, const Action& a) {
  return (static_cast<std::uint64_t>(idx(mover)) << 40) | (static_cast<std::uint64_t>(kind) << 32) |
         (static_cast<std::uint64_t>(static_cast<std::uint8_t>(a.pos.x)) << 24) |
         (static_cast<std::uint64_t>(static_cast<std::uint8_t>(a.pos.y)) << 16) |
         (static_cast<std::uint64_t>(a.rotation) << 8) | static_cast<std::uint8_t>(a.meeple);
}

double uct_value(const SearchNode& child, std::int64_t parent_n, double c) {
  if (child.n <= 0) throw Error(ErrorCode::UnvisitedChild, "uct_value: child has no visits");
  const double n = static_cast<double>(child.n);
  return child.r / n + c * std::sqrt(std::log(static_cast<double>(parent_n)) / n);
}

double rave_beta(std::int64_t n, std::int64_t amaf_n, double b) {
  if (n == 0 && amaf_n == 0) return 1.0;
  const double dn = static_cast<double>(n);
  const double da = static_cast<double>(amaf_n);
  return da / (dn + da + 4.0 * dn * da * b * b);
}

double uct_rave_value(const SearchNode& child, std::int64_t parent_n, double c, double b) {
  if (child.amaf_n == 0) return uct_value(child, parent_n, c);
  if (child.n <= 0) throw Error(ErrorCode::UnvisitedChild, "uct_rave_value: child has no visits");
  const double n = static_cast<double>(child.n);
  const double beta = rave_beta(child.n, child.amaf_n, b);
  return (1.0 - beta) * (child.r / n) + beta * (child.amaf_r / static_cast<double>(child.amaf_n)) +
         c * std::sqrt(std::log(static_cast<double>(parent_n)) / n);
}

void backpropagate(std::vector<SearchNode>& tree, std::span<const std::int32_t> path, double reward_p1,
                   std::span<const std::uint64_t> rollout_keys, bool rave) {
  for (std::int32_t id : path) {
    SearchNode& node = tree[id];
    node.n += 1;
    node.r += signed_for(node.player, reward_p1);
  }
  if (!rave) return;

  std::vector<std::uint64_t> played(rollout_keys.begin(), rollout_keys.end());
  std::sort(played.begin(), played.end());
  played.erase(std::unique(played.begin(), played.end()), played.end());
  std::vector<std::uint64_t> later;  // keys chosen at or below the current path position
  for (std::size_t j = path.size(); j-- > 0;) {
    const SearchNode& node = tree[path[j]];
    if (node.kind == NodeKind::Chance) {
      later.push_back(node.amaf_key);
      continue;
    }
    for (std::int32_t cid : node.children) {
      SearchNode& child = tree[cid];
      bool seen = std::binary_search(played.begin(), played.end(), child.amaf_key) ||
                  std::find(later.begin(), later.end(), child.amaf_key) != later.end();
      if (!seen) continue;
      child.amaf_n += 1;
      child.amaf_r += signed_for(child.player, reward_p1);
    }
  }
}

MctsSearch::MctsSearch(MctsConfig config) : config_(config), rng_(config.seed) { config_.validate(); }

std::int32_t MctsSearch::add_node(SearchNode node) {
  tree_.push_back(std::move(node));
  return static_cast<std::int32_t>(tree_.size() - 1);
}

void MctsSearch::expand_decision(std::int32_t id, const GameState& s) {
  const KindId kind = tree_[id].drawn;
  const Player mover = s.current_player();
  std::vector<std::int32_t> children;
  for (const Action& a : s.legal_actions()) {
    SearchNode child;
    child.kind = NodeKind::Chance;
    child.player = mover;
    child.action = a;
    child.amaf_key = amaf_key(mover, kind, a);
    children.push_back(add_node(std::move(child)));
  }
  tree_[id].children = std::move(children);
  tree_[id].expanded = true;
}

void MctsSearch::expand_chance(std::int32_t id, const GameState& s) {
  SearchNode& node = tree_[id];
  node.outcomes = s.playable_kind_counts();
  node.children.assign(node.outcomes.size(), -1);
  node.expanded = true;
}

std::int32_t MctsSearch::select_child(const SearchNode& node) const {
  std::int32_t best = -1;
  double best_value = 0.0;
  for (std::int32_t cid : node.children) {
    const SearchNode& child = tree_[cid];
    if (child.n == 0) return cid;
    double v = config_.rave ? uct_rave_value(child, node.n, config_.exploration, config_.rave_bias)
                            : uct_value(child, node.n, config_.exploration);
    if (best < 0 || v > best_value) {
      best = cid;
      best_value = v;
    }
  }
  return best;
}

double MctsSearch::simulate(const GameState& s) {
  rollout_keys_.clear();
  if (s.is_terminal()) return static_cast<double>(s.reward(Player::P1));
  const bool track = config_.rave && config_.amaf_updates;
  double total = 0.0;
  for (int i = 0; i < config_.simulations; ++i) {
    GameState g = s;
    while (!g.is_terminal()) {
      if (!g.draw_random(rng_)) break;
      Action a = g.random_action(rng_, scratch_);
      if (track) rollout_keys_.push_back(amaf_key(g.current_player(), *g.drawn_tile(), a));
      g.apply(a);
    }
    total += g.reward(Player::P1);
    ++rollouts_;
  }
  return total / config_.simulations;
}

Action MctsSearch::run(const GameState& root) {
  if (!root.drawn_tile()) throw Error(ErrorCode::NoLegalActions, "mcts: root has no drawn tile");
  tree_.clear();
  rng_ = Rng(config_.seed);
  rollouts_ = 0;

  SearchNode root_node;
  root_node.kind = NodeKind::Decision;
  root_node.player = other(root.current_player());
  root_node.drawn = *root.drawn_tile();
  add_node(std::move(root_node));
  expand_decision(0, root);
  const auto& root_children = tree_[0].children;
  if (root_children.empty()) throw Error(ErrorCode::NoLegalActions, "mcts: no legal actions");
  if (root_children.size() == 1) return tree_[root_children[0]].action;

  const bool rave_updates = config_.rave && config_.amaf_updates;
  for (int it = 0; it < config_.iterations; ++it) {
    GameState s = root;
    path_.assign(1, 0);
    std::int32_t cur = 0;
    for (;;) {
      if (tree_[cur].kind == NodeKind::Decision) {
        if (!tree_[cur].expanded) expand_decision(cur, s);
        std::int32_t child = select_child(tree_[cur]);
        const bool fresh = tree_[child].n == 0;
        s.apply(tree_[child].action);
        path_.push_back(child);
        cur = child;
        if (fresh) break;
        continue;
      }
      if (s.is_terminal()) break;
      if (!tree_[cur].expanded) expand_chance(cur, s);
      const auto& outcomes = tree_[cur].outcomes;
      if (outcomes.empty()) break;  // nothing playable is left; the rollout ends the game
      int total = 0;
      for (const auto& o : outcomes) total += o.second;
      int pick = static_cast<int>(rng_.below(static_cast<std::uint64_t>(total)));
      std::size_t i = 0;
      while (pick >= outcomes[i].second) pick -= outcomes[i++].second;
      const KindId kind = outcomes[i].first;
      s.draw_kind(kind);
      std::int32_t next = tree_[cur].children[i];
      if (next < 0) {
        SearchNode d;
        d.kind = NodeKind::Decision;
        d.player = other(s.current_player());
        d.drawn = kind;
        next = add_node(std::move(d));
        tree_[cur].children[i] = next;
      }
      path_.push_back(next);
      cur = next;
    }
    double reward = simulate(s);
    backpropagate(tree_, path_, reward, rollout_keys_, rave_updates);
  }

  std::int32_t best = tree_[0].children[0];
  for (std::int32_t cid : tree_[0].children)
    if (tree_[cid].n > tree_[best].n) best = cid;
  return tree_[best].action;
}

std::vector<RootChildStats> MctsSearch::root_stats() const {
  std::vector<RootChildStats> out;
  if (tree_.empty()) return out;
  for (std::int32_t cid : tree_[0].children) {
    const SearchNode& c = tree_[cid];
    RootChildStats st;
    st.action = c.action;
    st.n = c.n;
    st.mean = c.n ? c.r / static_cast<double>(c.n) : 0.0;
    st.amaf_n = c.amaf_n;
    st.amaf_mean = c.amaf_n ? c.amaf_r / static_cast<double>(c.amaf_n) : 0.0;
    st.beta = c.amaf_n ? rave_beta(c.n, c.amaf_n, config_.rave_bias) : 0.0;
    out.push_back(st);
  }
  return out;
}

Action run_search(const GameState& root, const MctsConfig& config) {
  MctsSearch search(config);
  return search.run(root);
}

}  // namespace carc
