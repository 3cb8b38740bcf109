#include "carc/star.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carc/errors.hpp"

namespace carc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int tier(const TileKind& kind, const Action& a) {
  if (!a.has_meeple()) return 3;
  switch (kind.segments[a.meeple].kind) {
    case FeatureKind::City: return 0;
    case FeatureKind::Monastery: return 1;
    case FeatureKind::Road: return 2;
    case FeatureKind::Field: return 4;
  }
  return 3;
}

bool is_leaf(const GameState& s, int depth) { return depth <= 0 || s.is_terminal(); }

std::vector<Action> ordered_actions(const GameState& s, const StarConfig& cfg) {
  auto actions = s.legal_actions();
  switch (cfg.order) {
    case MoveOrder::Tiered: return order_moves(s, actions);
    case MoveOrder::Engine: return actions;
    case MoveOrder::Shuffled: {
      std::uint64_t h = mix_seed(cfg.seed, static_cast<std::uint64_t>(s.turn()));
      for (const PlacedTile& t : s.tiles())
        h = mix_seed(h, (static_cast<std::uint64_t>(static_cast<std::uint8_t>(t.pos.x)) << 16) |
                            (static_cast<std::uint64_t>(static_cast<std::uint8_t>(t.pos.y)) << 8) | t.kind);
      h = mix_seed(h, s.drawn_tile().value_or(0xFF));
      Rng rng(h);
      for (std::size_t k = actions.size(); k > 1; --k) std::swap(actions[k - 1], actions[rng.below(k)]);
      return actions;
    }
  }
  return actions;
}

// Result of searching one action below a probed chance child. The true
// value lies in [low, high].
struct CachedAction {
  GameState state;
  double low;
  double high;
};

struct ChildCache {
  std::vector<Action> actions;
  std::vector<CachedAction> probed;  // results for the first probed.size() actions
};

class Searcher {
 public:
  Searcher(const StarConfig& config, Player perspective, StarCounters& counters)
      : cfg_(config), perspective_(perspective), c_(counters) {}

  double leaf(const GameState& s) {
    ++c_.leaves;
    double r = s.reward(perspective_);
    if (r < cfg_.lower || r > cfg_.upper) ++c_.clamped_leaves;
    return std::clamp(r, cfg_.lower, cfg_.upper);
  }

  double value(const GameState& s, int depth, double alpha, double beta) {
    if (is_leaf(s, depth)) return leaf(s);
    if (s.drawn_tile()) return decision(s, depth, alpha, beta, nullptr);
    return chance(s, depth, alpha, beta);
  }

  // `cache`, when given, holds probe results for the first few ordered
  // actions, searched below this node with other windows.
  double decision(const GameState& s, int depth, double alpha, double beta, ChildCache* cache) {
    std::vector<Action> own;
    if (!cache) own = ordered_actions(s, cfg_);
    const std::vector<Action>& actions = cache ? cache->actions : own;
    if (actions.empty()) return leaf(s);
    const bool maximizing = s.current_player() == perspective_;

    for (std::size_t k = 0; k < actions.size(); ++k) {
      double v;
      if (cache && k < cache->probed.size()) {
        const CachedAction& hit = cache->probed[k];
        if (maximizing) {
          if (hit.low >= beta) return beta;
          if (hit.high <= alpha) continue;
        } else {
          if (hit.high <= alpha) return alpha;
          if (hit.low >= beta) continue;
        }
        v = hit.low == hit.high ? hit.low : value(hit.state, depth - 1, alpha, beta);
      } else {
        GameState child = s;
        child.apply(actions[k]);
        ++c_.expansions;
        v = value(child, depth - 1, alpha, beta);
      }
      if (maximizing) {
        if (v >= beta) return beta;
        alpha = std::max(alpha, v);
      } else {
        if (v <= alpha) return alpha;
        beta = std::min(beta, v);
      }
    }
    return maximizing ? alpha : beta;
  }

  double chance(const GameState& s, int depth, double alpha, double beta) {
    const auto dist = chance_distribution(s);
    if (dist.empty()) return leaf(s);
    const std::size_t n = dist.size();
    const double L = cfg_.lower;
    const double U = cfg_.upper;

    std::vector<GameState> children;
    children.reserve(n);
    for (const auto& [kind, p] : dist) {
      children.push_back(s);
      children.back().draw_kind(kind);
    }
    std::vector<double> lb(n, L);
    std::vector<double> ub(n, U);
    std::vector<ChildCache> caches;

    if (cfg_.probing > 0) {
      caches.resize(n);
      const bool max_children = s.current_player() == perspective_;
      double banked = 0.0;  // sum of p_j * bound_j over probed children
      double rest = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double p = dist[i].second;
        rest -= p;
        ChildCache& cache = caches[i];
        cache.actions = ordered_actions(children[i], cfg_);
        const std::size_t probes = std::min<std::size_t>(cache.actions.size(), static_cast<std::size_t>(cfg_.probing));
        for (std::size_t k = 0; k < probes; ++k) {
          double lo, hi;
          if (max_children) {
            // Child value at or above `need` pushes the node to beta.
            const double need = (beta - banked - L * std::max(rest, 0.0)) / p;
            lo = lb[i];
            hi = std::min(U, need);
          } else {
            const double need = (alpha - banked - U * std::max(rest, 0.0)) / p;
            lo = std::max(L, need);
            hi = ub[i];
          }
          if (lo >= hi) break;
          GameState child = children[i];
          child.apply(cache.actions[k]);
          ++c_.expansions;
          ++c_.probes;
          double low, high;
          if (is_leaf(child, depth - 1)) {
            low = high = leaf(child);
          } else {
            double v = value(child, depth - 1, lo, hi);
            low = v <= lo ? L : v;
            high = v >= hi ? U : v;
          }
          cache.probed.push_back(CachedAction{std::move(child), low, high});
          if (max_children) {
            lb[i] = std::max(lb[i], low);
            if (lb[i] >= hi && hi < U) {
              ++c_.probe_cuts;
              return beta;
            }
          } else {
            ub[i] = std::min(ub[i], high);
            if (ub[i] <= lo && lo > L) {
              ++c_.probe_cuts;
              return alpha;
            }
          }
        }
        banked += p * (max_children ? lb[i] : ub[i]);
      }
    }

    // Star1 pass; unsearched siblings contribute their bounds.
    std::vector<double> tail_lb(n + 1, 0.0), tail_ub(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      tail_lb[i] = tail_lb[i + 1] + dist[i].second * lb[i];
      tail_ub[i] = tail_ub[i + 1] + dist[i].second * ub[i];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = dist[i].second;
      const double a = (alpha - sum - tail_ub[i + 1]) / p;
      const double b = (beta - sum - tail_lb[i + 1]) / p;
      if (a >= ub[i]) {
        ++c_.chance_cuts;
        return alpha;
      }
      if (b <= lb[i]) {
        ++c_.chance_cuts;
        return beta;
      }
      const double v = decision(children[i], depth, std::max(a, lb[i]), std::min(b, ub[i]),
                                caches.empty() ? nullptr : &caches[i]);
      if (v <= a) {
        ++c_.chance_cuts;
        return alpha;
      }
      if (v >= b) {
        ++c_.chance_cuts;
        return beta;
      }
      sum += p * v;
    }
    return sum;
  }

 private:
  const StarConfig& cfg_;
  Player perspective_;
  StarCounters& c_;
};

double expectimax_rec(const GameState& s, int depth, Player perspective,
                      const std::optional<std::pair<double, double>>& bounds, StarCounters& c) {
  if (is_leaf(s, depth)) {
    ++c.leaves;
    double r = s.reward(perspective);
    if (bounds) {
      if (r < bounds->first || r > bounds->second) ++c.clamped_leaves;
      r = std::clamp(r, bounds->first, bounds->second);
    }
    return r;
  }
  if (s.drawn_tile()) {
    const bool maximizing = s.current_player() == perspective;
    double best = maximizing ? -kInf : kInf;
    for (const Action& a : s.legal_actions()) {
      GameState child = s;
      child.apply(a);
      ++c.expansions;
      double v = expectimax_rec(child, depth - 1, perspective, bounds, c);
      best = maximizing ? std::max(best, v) : std::min(best, v);
    }
    return best;
  }
  const auto dist = chance_distribution(s);
  if (dist.empty()) return expectimax_rec(s, 0, perspective, bounds, c);
  double sum = 0.0;
  for (const auto& [kind, p] : dist) {
    GameState child = s;
    child.draw_kind(kind);
    sum += p * expectimax_rec(child, depth, perspective, bounds, c);
  }
  return sum;
}

}  // namespace

void StarConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) fail("star: need finite L < U");
  if (max_depth < 1) fail("star: d_max must be >= 1");
  if (probing < 0) fail("star: f must be >= 0");
}

StarCounters& StarCounters::operator+=(const StarCounters& o) {
  expansions += o.expansions;
  leaves += o.leaves;
  clamped_leaves += o.clamped_leaves;
  chance_cuts += o.chance_cuts;
  probe_cuts += o.probe_cuts;
  probes += o.probes;
  return *this;
}

std::vector<std::pair<KindId, double>> chance_distribution(const GameState& s) {
  std::vector<std::pair<KindId, double>> out;
  if (s.is_terminal() || s.drawn_tile()) return out;
  auto counts = s.playable_kind_counts();
  int total = 0;
  for (const auto& c : counts) total += c.second;
  for (const auto& [kind, copies] : counts) out.emplace_back(kind, static_cast<double>(copies) / total);
  return out;
}

std::vector<Action> order_moves(const GameState& s, std::span<const Action> actions) {
  std::vector<Action> out(actions.begin(), actions.end());
  auto drawn = s.drawn_tile();
  if (!drawn) return out;
  const TileKind& kind = s.deck().kind(*drawn);
  std::stable_sort(out.begin(), out.end(),
                   [&](const Action& a, const Action& b) { return tier(kind, a) < tier(kind, b); });
  return out;
}

double expectimax(const GameState& s, int depth, Player perspective,
                  std::optional<std::pair<double, double>> leaf_bounds, StarCounters* counters) {
  StarCounters local;
  double v = expectimax_rec(s, depth, perspective, leaf_bounds, counters ? *counters : local);
  return v;
}

double star1(const GameState& s, int depth, double alpha, double beta, const StarConfig& config,
             Player perspective, StarCounters* counters) {
  StarConfig c = config;
  c.probing = 0;
  return star2_5(s, depth, alpha, beta, c, perspective, counters);
}

double star2_5(const GameState& s, int depth, double alpha, double beta, const StarConfig& config,
               Player perspective, StarCounters* counters) {
  config.validate();
  StarCounters local;
  Searcher search(config, perspective, counters ? *counters : local);
  return search.value(s, depth, alpha, beta);
}

Action star_best_action(const GameState& s, const StarConfig& config, StarCounters* counters, double* value) {
  config.validate();
  if (!s.drawn_tile()) throw Error(ErrorCode::NoLegalActions, "star: no drawn tile");
  auto actions = ordered_actions(s, config);
  if (actions.empty()) throw Error(ErrorCode::NoLegalActions, "star: no legal actions");
  StarCounters local;
  StarCounters& c = counters ? *counters : local;
  Searcher search(config, s.current_player(), c);
  std::size_t best = 0;
  double best_value = -kInf;
  if (actions.size() > 1 || value) {
    for (std::size_t k = 0; k < actions.size(); ++k) {
      GameState child = s;
      child.apply(actions[k]);
      ++c.expansions;
      double v = search.value(child, config.max_depth - 1, best_value, kInf);
      if (v > best_value) {
        best = k;
        best_value = v;
      }
    }
  }
  if (value) *value = best_value;
  return actions[best];
}

}  // namespace carc
