#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carc/deck.hpp"
#include "carc/inline_vec.hpp"
#include "carc/rng.hpp"

namespace carc {

enum class Player : std::uint8_t { P1 = 0, P2 = 1 };

constexpr int idx(Player p) { return static_cast<int>(p); }
constexpr Player other(Player p) { return p == Player::P1 ? Player::P2 : Player::P1; }
const char* to_string(Player p);

enum class Outcome : std::uint8_t { P1Win, P2Win, Draw };
const char* to_string(Outcome o);

inline constexpr int kMeeplesPerPlayer = 7;
inline constexpr int kMaxTiles = 80;
inline constexpr int kMaxNodes = kMaxTiles * kMaxSegmentsPerTile;
inline constexpr int kMaxFrontier = 2 * kMaxTiles + 4;

// Grid coordinate; the start tile sits at (0, 0) and north is +y.
struct Position {
  std::int8_t x = 0;
  std::int8_t y = 0;

  auto operator<=>(const Position&) const = default;
  Position step(int side) const;
};

struct Action {
  Position pos;
  std::uint8_t rotation = 0;   // clockwise quarter turns
  std::int8_t meeple = -1;     // segment index on the placed TileKind, -1 for none

  bool has_meeple() const { return meeple >= 0; }
  auto operator<=>(const Action&) const = default;
};

std::string to_string(const Action& a);

struct Placement {
  Position pos;
  std::uint8_t rotation = 0;
  auto operator<=>(const Placement&) const = default;
};

struct PlacedTile {
  Position pos;
  KindId kind = 0;
  std::uint8_t rotation = 0;
  std::uint16_t first_node = 0;  // feature node of segment 0
};

// Snapshot of one connected feature, as seen from the union-find.
struct ComponentInfo {
  FeatureKind kind = FeatureKind::Field;
  int open_edges = 0;  // unmatched edges (roads, cities) or missing neighbours (monastery)
  int pennants = 0;
  std::array<int, 2> meeples{};
  int tiles = 0;
  bool complete = false;
  std::vector<std::pair<int, int>> members;  // (tile index, segment), sorted
};

struct GameSetup {
  std::array<int, 2> initial_scores{0, 0};
  std::array<int, 2> meeples{kMeeplesPerPlayer, kMeeplesPerPlayer};  // each in [0, 7]
};

// Two-player base-game state. A plain value: copying it is cheap and copies
// share nothing mutable.
class GameState {
 public:
  // Places the deck's start tile at (0, 0). `stack` is the draw order, top
  // first, and must not contain the start copy.
  static GameState new_game(std::shared_ptr<const Deck> deck, std::span<const KindId> stack,
                            const GameSetup& setup = {});

  const Deck& deck() const { return *deck_; }
  const std::shared_ptr<const Deck>& deck_ptr() const { return deck_; }

  Player current_player() const { return current_; }
  int turn() const { return turn_; }
  std::optional<KindId> drawn_tile() const;
  std::span<const KindId> stack() const { return stack_.span(); }
  int fixed_score(Player p) const { return fixed_[idx(p)]; }
  std::array<int, 2> fixed_scores() const { return fixed_; }
  int meeples_available(Player p) const { return meeples_[idx(p)]; }
  int meeples_on_board(Player p) const;
  int unplayable_draws() const { return unplayable_draws_; }
  bool ended_early() const { return ended_early_; }
  bool is_terminal() const;

  std::span<const PlacedTile> tiles() const { return tiles_.span(); }
  std::optional<int> tile_index_at(Position p) const;
  // (segment, owner) of the meeple standing on placed tile t, if any.
  std::optional<std::pair<int, Player>> meeple_on(int tile_index) const;
  std::span<const Position> frontier() const { return frontier_.span(); }

  // Union-find root of (tile, segment); equal ids mean the same feature.
  int component_id(int tile_index, int segment) const;
  ComponentInfo component(int tile_index, int segment) const;

  // Legal moves for the drawn tile, sorted by (position, rotation, meeple).
  std::vector<Action> legal_actions() const;
  bool is_legal(const Action& a) const;

  // Placements (position, rotation) of `kind` that satisfy adjacency and
  // edge matching, in frontier order.
  void collect_placements(KindId kind, std::vector<Placement>& out) const;
  bool has_placement(KindId kind) const;
  // Segments of `kind` that may take a meeple at this placement, ignoring
  // the mover's supply.
  InlineVec<std::int8_t, kMaxSegmentsPerTile> meeple_segments(KindId kind, const Placement& p) const;

  // Uniform placement, then uniform over {no meeple} plus each legal meeple
  // segment. `scratch` is reused storage.
  Action random_action(Rng& rng, std::vector<Placement>& scratch) const;

  // Pops the top of the stack. Unplayable tiles go to the bottom; a full
  // pass without a playable tile ends the game early.
  void draw_next();
  // Removes one copy of `kind` from the stack and makes it the drawn tile.
  void draw_kind(KindId kind);
  // Draws a uniformly random playable tile from the remaining stack; ends
  // the game early and returns false when none is playable.
  bool draw_random(Rng& rng);
  // (kind, copies) for each playable kind left in the stack, by kind id.
  std::vector<std::pair<KindId, int>> playable_kind_counts() const;

  // Throws Error(IllegalAction) unless is_legal(a).
  void apply(const Action& a);

  std::array<int, 2> virtual_scores() const;
  int virtual_score(Player p) const { return virtual_scores()[idx(p)]; }
  int reward(Player p) const;
  Outcome outcome() const;

  friend bool operator==(const GameState& a, const GameState& b);

 private:
  struct Node {
    std::int16_t parent;
    std::int16_t next;   // circular list of the component's members
    std::int16_t size;
    std::int16_t open;
    std::uint8_t tile;
    std::uint8_t segment;
    FeatureKind kind;
    std::int8_t meeple;  // owner of a meeple on this segment, -1 for none
    std::array<std::uint8_t, 2> meeples;  // component totals, valid at the root
    std::uint8_t pennants;
    std::uint8_t pad = 0;

    friend bool operator==(const Node&, const Node&) = default;
  };

  // Open-addressed map from packed position to tile index or frontier mark.
  class Cells {
   public:
    static constexpr std::uint8_t kFrontier = 0xFF;
    static constexpr std::uint8_t kMissing = 0xFE;
    Cells();
    std::uint8_t get(Position p) const;
    void set(Position p, std::uint8_t value);
    friend bool operator==(const Cells&, const Cells&) = default;

   private:
    static constexpr int kSize = 512;
    static constexpr std::uint16_t kEmpty = 0x8080;
    int slot_of(std::uint16_t key) const;
    std::array<std::uint16_t, kSize> keys_;
    std::array<std::uint8_t, kSize> values_;
  };

  int find(int n) const;
  int find_compress(int n);
  int unite(int a, int b);
  std::uint8_t edge_requirements(Position p, std::uint8_t& mask) const;
  bool placement_fits(KindId kind, Position p, int rotation) const;
  bool meeple_allowed(KindId kind, const Placement& p, int segment) const;
  void place_tile(KindId kind, Position pos, int rotation);
  int distinct_tiles(int root) const;
  int end_value(int root) const;
  void award(int root, int points, std::array<int, 2>& scores) const;
  void score_completed(int root);

  std::shared_ptr<const Deck> deck_;
  InlineVec<PlacedTile, kMaxTiles> tiles_;
  InlineVec<Node, kMaxNodes> nodes_;
  InlineVec<Position, kMaxFrontier> frontier_;
  InlineVec<KindId, kMaxTiles> stack_;
  InlineVec<std::int16_t, 2 * kMeeplesPerPlayer> meeple_nodes_;
  Cells cells_;
  std::array<int, 2> fixed_{0, 0};
  std::array<int, 2> meeples_{kMeeplesPerPlayer, kMeeplesPerPlayer};
  Player current_ = Player::P1;
  std::int16_t drawn_ = -1;
  int turn_ = 0;
  int unplayable_draws_ = 0;
  bool ended_early_ = false;
};

// Functional forms.
std::vector<Action> legal_actions(const GameState& s);
GameState apply_action(const GameState& s, const Action& a);
GameState draw_tile(const GameState& s);
GameState draw_tile(const GameState& s, Rng& rng);
int virtual_score(const GameState& s, Player p);
int reward(const GameState& s, Player p);
bool is_terminal(const GameState& s);
// Throws Error(NotTerminal) before the game is over.
Outcome outcome(const GameState& s);
Outcome outcome_from_reward(int reward_p1);

}  // namespace carc
