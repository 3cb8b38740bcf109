#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "carc/errors.hpp"
#include "carc/star.hpp"
#include "support/fixtures.hpp"

using namespace carc;
using namespace carc::testing_support;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const std::pair<double, double> kBounds{-100.0, 100.0};

// A drawn state after a random opening of `turns` placements.
std::optional<GameState> midgame(std::uint64_t seed, int turns) {
  GameState s = GameState::new_game(standard_deck(), shuffled_pile(seed));
  Rng rng(mix_seed(seed, 77));
  std::vector<Placement> scratch;
  for (int t = 0; t < turns && !s.is_terminal(); ++t) {
    s.draw_next();
    if (s.is_terminal()) break;
    s.apply(s.random_action(rng, scratch));
  }
  if (s.is_terminal()) return std::nullopt;
  s.draw_next();
  if (s.is_terminal()) return std::nullopt;
  return s;
}

// The base deck plus one tile carrying a city, a monastery, a road and a
// field, so a single drawn tile offers every meeple tier.
std::shared_ptr<const Deck> deck_with_everything() {
  std::vector<TileKind> kinds(standard_deck()->kinds().begin(), standard_deck()->kinds().end());
  TileKind z;
  z.id = "Z";
  z.edges = {EdgeType::City, EdgeType::Road, EdgeType::Field, EdgeType::Field};
  z.deck_count = 1;
  auto slots = [](std::initializer_list<int> list) {
    std::uint16_t m = 0;
    for (int s : list) m = static_cast<std::uint16_t>(m | (1u << s));
    return m;
  };
  z.segments = {
      FeatureSegment{FeatureKind::Field, slots({3, 5, 6, 7, 8, 9, 10, 11}), false, 0b100},
      FeatureSegment{FeatureKind::Road, slots({4}), false, 0},
      FeatureSegment{FeatureKind::City, slots({0, 1, 2}), false, 0},
      FeatureSegment{FeatureKind::Monastery, 0, false, 0},
  };
  kinds.push_back(z);
  return std::make_shared<const Deck>(std::move(kinds));
}

int tier_of(const GameState& s, const Action& a) {
  if (!a.has_meeple()) return 3;
  switch (s.deck().kind(*s.drawn_tile()).segments[a.meeple].kind) {
    case FeatureKind::City: return 0;
    case FeatureKind::Monastery: return 1;
    case FeatureKind::Road: return 2;
    case FeatureKind::Field: return 4;
  }
  return -1;
}

}  // namespace

TEST(OrderMoves, CityBeforeRoadBeforePlainBeforeField) {
  GameState s = game_with({"D"});
  s.draw_next();
  auto ordered = order_moves(s, s.legal_actions());
  std::vector<int> tiers;
  for (const auto& a : ordered) tiers.push_back(tier_of(s, a));
  EXPECT_TRUE(std::is_sorted(tiers.begin(), tiers.end()));
  for (int t : {0, 2, 3, 4}) EXPECT_NE(std::find(tiers.begin(), tiers.end(), t), tiers.end()) << t;
  EXPECT_EQ(std::find(tiers.begin(), tiers.end(), 1), tiers.end());
}

TEST(OrderMoves, NoMeepleActionsKeepEngineOrder) {
  GameState s = game_with({"V"});
  s.draw_next();
  std::vector<Action> plain;
  for (const auto& a : s.legal_actions())
    if (!a.has_meeple()) plain.push_back(a);
  EXPECT_EQ(order_moves(s, plain), plain);
}

TEST(OrderMoves, FiveTiersInOrder) {
  auto deck = deck_with_everything();
  std::vector<KindId> stack{*deck->find("Z")};
  GameState s = GameState::new_game(deck, stack);
  s.draw_next();
  auto actions = s.legal_actions();
  auto ordered = order_moves(s, actions);
  std::vector<int> tiers;
  for (const auto& a : ordered) tiers.push_back(tier_of(s, a));
  EXPECT_TRUE(std::is_sorted(tiers.begin(), tiers.end()));
  for (int t = 0; t <= 4; ++t) EXPECT_NE(std::find(tiers.begin(), tiers.end(), t), tiers.end()) << t;
  // Stable within a tier.
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (tiers[i] == tiers[i - 1]) {
      EXPECT_LT(ordered[i - 1], ordered[i]);
    }
  }
}

TEST(Expectimax, LeafIsTheReward) {
  GameState s = game_with({}, GameSetup{{70, 40}});
  EXPECT_EQ(expectimax(s, 0, Player::P1), 30.0);
  EXPECT_EQ(expectimax(s, 3, Player::P1), 30.0);
  EXPECT_EQ(expectimax(s, 0, Player::P2), -30.0);
}

TEST(Expectimax, DecisionTakesTheBestReward) {
  GameState s = game_with({"E"});
  s.draw_next();
  double best = -kInf;
  for (const auto& a : s.legal_actions()) best = std::max(best, double(apply_action(s, a).reward(Player::P1)));
  EXPECT_EQ(best, 4.0);
  EXPECT_EQ(expectimax(s, 1, Player::P1), best);
  // From the opponent's side the mover still maximises its own reward.
  EXPECT_EQ(expectimax(s, 1, Player::P2), -best);
}

TEST(Expectimax, ChanceWeightsByCopies) {
  GameState s = game_with({"U", "U", "C"});
  auto dist = chance_distribution(s);
  ASSERT_EQ(dist.size(), 2u);
  double u = 0, c = 0;
  for (auto [k, p] : dist) (k == kind_id("U") ? u : c) = p;
  EXPECT_DOUBLE_EQ(u, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c, 1.0 / 3.0);
  GameState du = s, dc = s;
  du.draw_kind(kind_id("U"));
  dc.draw_kind(kind_id("C"));
  double expected = 2.0 / 3.0 * expectimax(du, 1, Player::P1) + 1.0 / 3.0 * expectimax(dc, 1, Player::P1);
  EXPECT_NEAR(expectimax(s, 1, Player::P1), expected, 1e-12);
}

TEST(Expectimax, UnplayableKindsAreNotDrawn) {
  GameState s = fig1_state({"C", "U"});
  auto dist = chance_distribution(s);
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_EQ(dist[0].first, kind_id("U"));
  EXPECT_EQ(dist[0].second, 1.0);
  EXPECT_TRUE(chance_distribution(fig1_state({"C"})).empty());
}

TEST(StarConfig, RejectsBadParameters) {
  StarConfig c;
  c.lower = 5;
  c.upper = 5;
  EXPECT_THROW(c.validate(), Error);
  c = StarConfig{};
  c.max_depth = 0;
  EXPECT_THROW(c.validate(), Error);
  c = StarConfig{};
  c.probing = -1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(StarSearch, FullWindowMatchesExpectimax) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 12; ++seed) {
    auto s = midgame(seed, 3 + static_cast<int>(seed % 40));
    if (!s) continue;
    ++checked;
    const int depth = seed % 3 == 0 ? 2 : 1;
    const Player p = s->current_player();
    StarConfig c;
    StarCounters ce, c1, c2, c5;
    double ve = expectimax(*s, depth, p, kBounds, &ce);
    c.probing = 0;
    double v1 = star1(*s, depth, -kInf, kInf, c, p, &c1);
    c.probing = 1;
    double v2 = star2_5(*s, depth, -kInf, kInf, c, p, &c2);
    c.probing = 5;
    double v5 = star2_5(*s, depth, -kInf, kInf, c, p, &c5);
    EXPECT_NEAR(v1, ve, 1e-9);
    EXPECT_NEAR(v2, ve, 1e-9);
    EXPECT_NEAR(v5, ve, 1e-9);
    EXPECT_LE(c1.expansions, ce.expansions);
    EXPECT_LE(c5.expansions, c1.expansions);
  }
}

TEST(StarSearch, ProbingZeroIsStarOne) {
  auto s = midgame(3, 12);
  ASSERT_TRUE(s);
  StarConfig c;
  c.probing = 0;
  StarCounters a, b;
  double v1 = star1(*s, 2, -kInf, kInf, c, s->current_player(), &a);
  double v0 = star2_5(*s, 2, -kInf, kInf, c, s->current_player(), &b);
  EXPECT_EQ(v1, v0);
  EXPECT_EQ(a.expansions, b.expansions);
  EXPECT_EQ(a.leaves, b.leaves);
  EXPECT_EQ(b.probes, 0);
}

TEST(StarSearch, NarrowWindowAroundTheValueStaysExact) {
  for (std::uint64_t seed : {5u, 6u, 8u}) {
    auto s = midgame(seed, 10);
    ASSERT_TRUE(s);
    const Player p = s->current_player();
    double v = expectimax(*s, 2, p, kBounds);
    StarConfig c;
    for (int f : {0, 1, 5}) {
      c.probing = f;
      EXPECT_NEAR(star2_5(*s, 2, v - 1e-6, v + 1e-6, c, p), v, 1e-9);
      // Windows that exclude the value fail hard to the nearer edge.
      EXPECT_EQ(star2_5(*s, 2, v + 1.0, v + 2.0, c, p), v + 1.0);
      EXPECT_EQ(star2_5(*s, 2, v - 2.0, v - 1.0, c, p), v - 1.0);
    }
  }
}

TEST(StarSearch, OrderChangesCountsNotValues) {
  auto s = midgame(11, 15);
  ASSERT_TRUE(s);
  const Player p = s->current_player();
  std::vector<double> values;
  std::vector<std::int64_t> counts;
  for (MoveOrder order : {MoveOrder::Tiered, MoveOrder::Engine, MoveOrder::Shuffled}) {
    for (std::uint64_t seed : {1u, 2u}) {
      StarConfig c;
      c.order = order;
      c.seed = seed;
      StarCounters k;
      values.push_back(star2_5(*s, 2, -kInf, kInf, c, p, &k));
      counts.push_back(k.expansions);
    }
  }
  for (double v : values) EXPECT_NEAR(v, values.front(), 1e-9);
  EXPECT_NE(*std::min_element(counts.begin(), counts.end()), *std::max_element(counts.begin(), counts.end()));
}

TEST(StarSearch, LeavesAreClampedAndCounted) {
  GameState s = game_with({}, GameSetup{{150, 10}});
  StarConfig c;
  StarCounters k;
  EXPECT_EQ(star1(s, 2, -kInf, kInf, c, Player::P1, &k), 100.0);
  EXPECT_EQ(k.clamped_leaves, 1);
  EXPECT_EQ(expectimax(s, 2, Player::P1), 140.0);
  EXPECT_EQ(expectimax(s, 2, Player::P1, kBounds), 100.0);
}

TEST(StarBestAction, CompletesTheCity) {
  GameState s = game_with({"E", "V"});
  s.draw_next();
  for (int d : {1, 2, 3}) {
    StarConfig c;
    c.max_depth = d;
    EXPECT_EQ(star_best_action(s, c), at(0, 1, 2, 0)) << d;
  }
}

TEST(StarBestAction, DepthOneIsGreedy) {
  for (std::uint64_t seed = 40; seed < 46; ++seed) {
    auto s = midgame(seed, 20);
    if (!s) continue;
    auto ordered = order_moves(*s, s->legal_actions());
    Action greedy = ordered.front();
    int best = std::numeric_limits<int>::min();
    for (const auto& a : ordered) {
      int r = apply_action(*s, a).reward(s->current_player());
      if (r > best) {
        best = r;
        greedy = a;
      }
    }
    StarConfig c;
    c.max_depth = 1;
    EXPECT_EQ(star_best_action(*s, c), greedy);
  }
}

TEST(StarBestAction, RootValueMatchesExpectimax) {
  auto s = midgame(50, 25);
  ASSERT_TRUE(s);
  StarConfig c;
  c.max_depth = 2;
  double v = 0;
  star_best_action(*s, c, nullptr, &v);
  EXPECT_NEAR(v, expectimax(*s, 2, s->current_player(), kBounds), 1e-9);
}

TEST(StarBestAction, NoDrawnTileIsRejected) {
  GameState s = game_with({"U"});
  EXPECT_THROW(star_best_action(s, StarConfig{}), Error);
}
