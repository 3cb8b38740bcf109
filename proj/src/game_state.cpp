#include "carc/game_state.hpp"

#include <algorithm>
#include <bit>

#include "carc/errors.hpp"

namespace carc {

namespace {

constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {1, 0, -1, 0};

constexpr int kNeighbourDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kNeighbourDy[8] = {1, 1, 1, 0, 0, -1, -1, -1};

constexpr std::uint16_t pack(Position p) {
  return static_cast<std::uint16_t>((static_cast<std::uint8_t>(p.x) << 8) | static_cast<std::uint8_t>(p.y));
}

// Each placement can push the board one cell further from the origin.
constexpr int kCoordinateLimit = 120;

}  // namespace

const char* to_string(Player p) { return p == Player::P1 ? "P1" : "P2"; }

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::P1Win: return "P1";
    case Outcome::P2Win: return "P2";
    case Outcome::Draw: return "draw";
  }
  return "?";
}

Position Position::step(int side) const {
  return Position{static_cast<std::int8_t>(x + kDx[side]), static_cast<std::int8_t>(y + kDy[side])};
}

std::string to_string(const Action& a) {
  std::string s = "(" + std::to_string(a.pos.x) + "," + std::to_string(a.pos.y) + ") r" +
                  std::to_string(a.rotation) + " m";
  s += a.has_meeple() ? std::to_string(a.meeple) : std::string("-");
  return s;
}

// ---------------------------------------------------------------- Cells

GameState::Cells::Cells() {
  keys_.fill(kEmpty);
  values_.fill(0);
}

int GameState::Cells::slot_of(std::uint16_t key) const {
  int i = static_cast<int>((static_cast<std::uint32_t>(key) * 0x9E3779B1u) >> 23);
  while (keys_[i] != key && keys_[i] != kEmpty) i = (i + 1) & (kSize - 1);
  return i;
}

std::uint8_t GameState::Cells::get(Position p) const {
  int i = slot_of(pack(p));
  return keys_[i] == kEmpty ? kMissing : values_[i];
}

void GameState::Cells::set(Position p, std::uint8_t value) {
  std::uint16_t key = pack(p);
  int i = slot_of(key);
  keys_[i] = key;
  values_[i] = value;
}

// ---------------------------------------------------------------- union-find

int GameState::find(int n) const {
  while (nodes_[n].parent != n) n = nodes_[n].parent;
  return n;
}

int GameState::find_compress(int n) {
  while (nodes_[n].parent != n) {
    nodes_[n].parent = nodes_[nodes_[n].parent].parent;
    n = nodes_[n].parent;
  }
  return n;
}

int GameState::unite(int a, int b) {
  int ra = find_compress(a);
  int rb = find_compress(b);
  if (ra == rb) return ra;
  if (nodes_[ra].size < nodes_[rb].size) std::swap(ra, rb);
  Node& root = nodes_[ra];
  Node& child = nodes_[rb];
  child.parent = static_cast<std::int16_t>(ra);
  root.size = static_cast<std::int16_t>(root.size + child.size);
  root.open = static_cast<std::int16_t>(root.open + child.open);
  root.pennants = static_cast<std::uint8_t>(root.pennants + child.pennants);
  root.meeples[0] = static_cast<std::uint8_t>(root.meeples[0] + child.meeples[0]);
  root.meeples[1] = static_cast<std::uint8_t>(root.meeples[1] + child.meeples[1]);
  std::swap(root.next, child.next);
  return ra;
}

// ---------------------------------------------------------------- setup

GameState GameState::new_game(std::shared_ptr<const Deck> deck, std::span<const KindId> stack,
                              const GameSetup& setup) {
  if (!deck) throw Error(ErrorCode::InvalidArgument, "new_game: null deck");
  if (stack.size() + 1 > static_cast<std::size_t>(kMaxTiles))
    throw Error(ErrorCode::InvalidArgument, "new_game: stack too large");
  GameState s;
  s.deck_ = std::move(deck);
  for (KindId k : stack) {
    if (k >= s.deck_->kind_count()) throw Error(ErrorCode::InvalidArgument, "new_game: unknown kind in stack");
    s.stack_.push_back(k);
  }
  for (int m : setup.meeples)
    if (m < 0 || m > kMeeplesPerPlayer) throw Error(ErrorCode::InvalidArgument, "new_game: meeples out of range");
  s.fixed_ = setup.initial_scores;
  s.meeples_ = setup.meeples;
  s.place_tile(s.deck_->start_kind(), Position{0, 0}, 0);
  return s;
}

std::optional<KindId> GameState::drawn_tile() const {
  if (drawn_ < 0) return std::nullopt;
  return static_cast<KindId>(drawn_);
}

bool GameState::is_terminal() const { return ended_early_ || (stack_.empty() && drawn_ < 0); }

int GameState::meeples_on_board(Player p) const {
  int n = 0;
  for (auto node : meeple_nodes_)
    if (nodes_[node].meeple == idx(p)) ++n;
  return n;
}

std::optional<int> GameState::tile_index_at(Position p) const {
  std::uint8_t v = cells_.get(p);
  if (v == Cells::kMissing || v == Cells::kFrontier) return std::nullopt;
  return v;
}

std::optional<std::pair<int, Player>> GameState::meeple_on(int tile_index) const {
  const PlacedTile& t = tiles_[tile_index];
  int segs = static_cast<int>(deck_->kind(t.kind).segments.size());
  for (int i = 0; i < segs; ++i) {
    const Node& n = nodes_[t.first_node + i];
    if (n.meeple >= 0) return std::make_pair(i, static_cast<Player>(n.meeple));
  }
  return std::nullopt;
}

int GameState::component_id(int tile_index, int segment) const {
  return find(tiles_[tile_index].first_node + segment);
}

int GameState::distinct_tiles(int root) const {
  std::array<std::uint64_t, (kMaxTiles + 63) / 64> seen{};
  int count = 0;
  int m = root;
  do {
    int t = nodes_[m].tile;
    std::uint64_t bit = 1ULL << (t & 63);
    if (!(seen[t >> 6] & bit)) {
      seen[t >> 6] |= bit;
      ++count;
    }
    m = nodes_[m].next;
  } while (m != root);
  return count;
}

ComponentInfo GameState::component(int tile_index, int segment) const {
  int root = component_id(tile_index, segment);
  const Node& r = nodes_[root];
  ComponentInfo info;
  info.kind = r.kind;
  info.open_edges = r.open;
  info.pennants = r.pennants;
  info.meeples = {r.meeples[0], r.meeples[1]};
  info.tiles = distinct_tiles(root);
  info.complete = r.kind != FeatureKind::Field && r.open == 0;
  int m = root;
  do {
    info.members.emplace_back(nodes_[m].tile, nodes_[m].segment);
    m = nodes_[m].next;
  } while (m != root);
  std::sort(info.members.begin(), info.members.end());
  return info;
}

// ---------------------------------------------------------------- legality

std::uint8_t GameState::edge_requirements(Position p, std::uint8_t& mask) const {
  std::uint8_t req = 0;
  mask = 0;
  for (int d = 0; d < kSides; ++d) {
    std::uint8_t v = cells_.get(p.step(d));
    if (v == Cells::kMissing || v == Cells::kFrontier) continue;
    const PlacedTile& nb = tiles_[v];
    auto e = deck_->orientation(nb.kind, nb.rotation).edges[(d + 2) % 4];
    req |= static_cast<std::uint8_t>(static_cast<unsigned>(e) << (2 * d));
    mask |= static_cast<std::uint8_t>(0b11u << (2 * d));
  }
  return req;
}

bool GameState::placement_fits(KindId kind, Position p, int rotation) const {
  if (cells_.get(p) != Cells::kFrontier) return false;
  std::uint8_t mask;
  std::uint8_t req = edge_requirements(p, mask);
  return mask != 0 && ((deck_->orientation(kind, rotation).packed_edges ^ req) & mask) == 0;
}

void GameState::collect_placements(KindId kind, std::vector<Placement>& out) const {
  out.clear();
  for (Position p : frontier_) {
    std::uint8_t mask;
    std::uint8_t req = edge_requirements(p, mask);
    for (int r = 0; r < 4; ++r)
      if (((deck_->orientation(kind, r).packed_edges ^ req) & mask) == 0)
        out.push_back(Placement{p, static_cast<std::uint8_t>(r)});
  }
}

bool GameState::has_placement(KindId kind) const {
  for (Position p : frontier_) {
    std::uint8_t mask;
    std::uint8_t req = edge_requirements(p, mask);
    for (int r = 0; r < 4; ++r)
      if (((deck_->orientation(kind, r).packed_edges ^ req) & mask) == 0) return true;
  }
  return false;
}

bool GameState::meeple_allowed(KindId kind, const Placement& p, int segment) const {
  if (deck_->kind(kind).segments[segment].kind == FeatureKind::Monastery) return true;
  const Orientation& o = deck_->orientation(kind, p.rotation);
  for (int s = 0; s < kSlots; ++s) {
    if (o.segment_at_slot[s] != segment) continue;
    std::uint8_t v = cells_.get(p.pos.step(s / 3));
    if (v == Cells::kMissing || v == Cells::kFrontier) continue;
    const PlacedTile& nb = tiles_[v];
    int nb_seg = deck_->orientation(nb.kind, nb.rotation).segment_at_slot[opposite_slot(s)];
    const Node& root = nodes_[find(nb.first_node + nb_seg)];
    if (root.meeples[0] + root.meeples[1] > 0) return false;
  }
  return true;
}

InlineVec<std::int8_t, kMaxSegmentsPerTile> GameState::meeple_segments(KindId kind, const Placement& p) const {
  InlineVec<std::int8_t, kMaxSegmentsPerTile> out;
  int segs = static_cast<int>(deck_->kind(kind).segments.size());
  for (int i = 0; i < segs; ++i)
    if (meeple_allowed(kind, p, i)) out.push_back(static_cast<std::int8_t>(i));
  return out;
}

std::vector<Action> GameState::legal_actions() const {
  std::vector<Action> out;
  if (drawn_ < 0) return out;
  KindId kind = static_cast<KindId>(drawn_);
  std::vector<Placement> placements;
  collect_placements(kind, placements);
  bool has_meeple = meeples_[idx(current_)] > 0;
  for (const Placement& p : placements) {
    out.push_back(Action{p.pos, p.rotation, -1});
    if (!has_meeple) continue;
    for (auto seg : meeple_segments(kind, p)) out.push_back(Action{p.pos, p.rotation, seg});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool GameState::is_legal(const Action& a) const {
  if (drawn_ < 0 || a.rotation > 3) return false;
  KindId kind = static_cast<KindId>(drawn_);
  if (!placement_fits(kind, a.pos, a.rotation)) return false;
  if (!a.has_meeple()) return true;
  if (static_cast<std::size_t>(a.meeple) >= deck_->kind(kind).segments.size()) return false;
  if (meeples_[idx(current_)] <= 0) return false;
  return meeple_allowed(kind, Placement{a.pos, a.rotation}, a.meeple);
}

Action GameState::random_action(Rng& rng, std::vector<Placement>& scratch) const {
  if (drawn_ < 0) throw Error(ErrorCode::NoLegalActions, "random_action: no drawn tile");
  KindId kind = static_cast<KindId>(drawn_);
  collect_placements(kind, scratch);
  if (scratch.empty()) throw Error(ErrorCode::NoLegalActions, "random_action: drawn tile has no placement");
  const Placement p = scratch[rng.below(scratch.size())];
  Action a{p.pos, p.rotation, -1};
  if (meeples_[idx(current_)] > 0) {
    auto options = meeple_segments(kind, p);
    auto pick = rng.below(options.size() + 1);
    if (pick > 0) a.meeple = options[pick - 1];
  }
  return a;
}

// ---------------------------------------------------------------- drawing

void GameState::draw_next() {
  if (drawn_ >= 0) throw Error(ErrorCode::InvalidArgument, "draw: a tile is already drawn");
  if (ended_early_) throw Error(ErrorCode::EmptyStack, "draw: the game has ended");
  if (stack_.empty()) throw Error(ErrorCode::EmptyStack, "draw: stack is empty");
  const std::size_t n = stack_.size();
  for (std::size_t tries = 0; tries < n; ++tries) {
    KindId k = stack_[0];
    stack_.erase_at(0);
    if (has_placement(k)) {
      drawn_ = k;
      return;
    }
    stack_.push_back(k);
    ++unplayable_draws_;
  }
  ended_early_ = true;
}

void GameState::draw_kind(KindId kind) {
  if (drawn_ >= 0) throw Error(ErrorCode::InvalidArgument, "draw: a tile is already drawn");
  auto it = std::find(stack_.begin(), stack_.end(), kind);
  if (it == stack_.end()) throw Error(ErrorCode::InvalidArgument, "draw_kind: kind not in stack");
  if (!has_placement(kind)) throw Error(ErrorCode::IllegalAction, "draw_kind: kind has no placement");
  stack_.erase_at(static_cast<std::size_t>(it - stack_.begin()));
  drawn_ = kind;
}

bool GameState::draw_random(Rng& rng) {
  if (drawn_ >= 0) throw Error(ErrorCode::InvalidArgument, "draw: a tile is already drawn");
  if (stack_.empty()) throw Error(ErrorCode::EmptyStack, "draw: stack is empty");
  std::size_t i = rng.below(stack_.size());
  if (!has_placement(stack_[i])) {
    // Condition on playability: redraw among the playable copies only.
    std::array<std::int8_t, kMaxKinds> playable;
    playable.fill(-1);
    std::size_t total = 0;
    for (KindId k : stack_) {
      if (playable[k] < 0) playable[k] = has_placement(k) ? 1 : 0;
      total += static_cast<std::size_t>(playable[k]);
    }
    if (total == 0) {
      ended_early_ = true;
      return false;
    }
    std::size_t pick = rng.below(total);
    for (i = 0; i < stack_.size(); ++i) {
      if (playable[stack_[i]] != 1) continue;
      if (pick-- == 0) break;
    }
  }
  drawn_ = stack_[i];
  stack_.erase_at(i);
  return true;
}

std::vector<std::pair<KindId, int>> GameState::playable_kind_counts() const {
  std::array<int, kMaxKinds> counts{};
  for (KindId k : stack_) ++counts[k];
  std::vector<std::pair<KindId, int>> out;
  for (std::size_t k = 0; k < deck_->kind_count(); ++k)
    if (counts[k] > 0 && has_placement(static_cast<KindId>(k))) out.emplace_back(static_cast<KindId>(k), counts[k]);
  return out;
}

// ---------------------------------------------------------------- placement

void GameState::place_tile(KindId kind, Position pos, int rotation) {
  if (std::abs(pos.x) > kCoordinateLimit || std::abs(pos.y) > kCoordinateLimit)
    throw Error(ErrorCode::IllegalAction, "placement outside the coordinate range");
  const TileKind& tk = deck_->kind(kind);
  const Orientation& o = deck_->orientation(kind, rotation);
  const int t = static_cast<int>(tiles_.size());
  const int first = static_cast<int>(nodes_.size());
  tiles_.push_back(PlacedTile{pos, kind, static_cast<std::uint8_t>(rotation), static_cast<std::uint16_t>(first)});

  int present = 0;
  for (int i = 0; i < 8; ++i) {
    Position q{static_cast<std::int8_t>(pos.x + kNeighbourDx[i]), static_cast<std::int8_t>(pos.y + kNeighbourDy[i])};
    if (tile_index_at(q)) ++present;
  }

  for (std::size_t i = 0; i < tk.segments.size(); ++i) {
    const FeatureSegment& seg = tk.segments[i];
    Node n{};
    n.parent = static_cast<std::int16_t>(first + i);
    n.next = n.parent;
    n.size = 1;
    switch (seg.kind) {
      case FeatureKind::City:
      case FeatureKind::Road: n.open = static_cast<std::int16_t>(std::popcount(static_cast<unsigned>(seg.slots & kMiddleSlots))); break;
      case FeatureKind::Monastery: n.open = static_cast<std::int16_t>(8 - present); break;
      case FeatureKind::Field: n.open = 0; break;
    }
    n.tile = static_cast<std::uint8_t>(t);
    n.segment = static_cast<std::uint8_t>(i);
    n.kind = seg.kind;
    n.meeple = -1;
    n.meeples = {0, 0};
    n.pennants = seg.pennant ? 1 : 0;
    nodes_.push_back(n);
  }

  cells_.set(pos, static_cast<std::uint8_t>(t));
  for (std::size_t i = 0; i < frontier_.size(); ++i) {
    if (frontier_[i] == pos) {
      frontier_.swap_remove(i);
      break;
    }
  }
  for (int d = 0; d < kSides; ++d) {
    Position q = pos.step(d);
    std::uint8_t v = cells_.get(q);
    if (v == Cells::kMissing) {
      cells_.set(q, Cells::kFrontier);
      frontier_.push_back(q);
      continue;
    }
    if (v == Cells::kFrontier) continue;
    const PlacedTile& nb = tiles_[v];
    const Orientation& no = deck_->orientation(nb.kind, nb.rotation);
    for (int k = 0; k < 3; ++k) {
      int s = 3 * d + k;
      int r = unite(first + o.segment_at_slot[s], nb.first_node + no.segment_at_slot[opposite_slot(s)]);
      if (k == 1 && o.edges[d] != EdgeType::Field) nodes_[r].open = static_cast<std::int16_t>(nodes_[r].open - 2);
    }
  }
}

void GameState::apply(const Action& a) {
  if (!is_legal(a)) throw Error(ErrorCode::IllegalAction, "illegal action " + to_string(a));
  const KindId kind = static_cast<KindId>(drawn_);
  const Player mover = current_;
  place_tile(kind, a.pos, a.rotation);
  const PlacedTile placed = tiles_.back();

  if (a.has_meeple()) {
    int node = placed.first_node + a.meeple;
    nodes_[node].meeple = static_cast<std::int8_t>(idx(mover));
    int root = find_compress(node);
    ++nodes_[root].meeples[idx(mover)];
    --meeples_[idx(mover)];
    meeple_nodes_.push_back(static_cast<std::int16_t>(node));
  }

  InlineVec<std::int16_t, 2 * kMaxSegmentsPerTile + 8> done;
  auto mark = [&](int root) {
    for (auto r : done)
      if (r == root) return;
    done.push_back(static_cast<std::int16_t>(root));
  };
  const TileKind& tk = deck_->kind(kind);
  for (std::size_t i = 0; i < tk.segments.size(); ++i) {
    FeatureKind fk = tk.segments[i].kind;
    if (fk == FeatureKind::Field) continue;
    int root = find_compress(placed.first_node + static_cast<int>(i));
    if (nodes_[root].open == 0) mark(root);
  }
  for (int i = 0; i < 8; ++i) {
    Position q{static_cast<std::int8_t>(a.pos.x + kNeighbourDx[i]), static_cast<std::int8_t>(a.pos.y + kNeighbourDy[i])};
    auto nb = tile_index_at(q);
    if (!nb) continue;
    int m = deck_->monastery_segment(tiles_[*nb].kind);
    if (m < 0) continue;
    Node& n = nodes_[tiles_[*nb].first_node + m];
    if (--n.open == 0) mark(tiles_[*nb].first_node + m);
  }
  for (auto root : done) score_completed(root);

  drawn_ = -1;
  current_ = other(current_);
  ++turn_;
}

// ---------------------------------------------------------------- scoring

void GameState::award(int root, int points, std::array<int, 2>& scores) const {
  const Node& r = nodes_[root];
  int best = std::max(r.meeples[0], r.meeples[1]);
  if (best == 0) return;
  for (int p = 0; p < 2; ++p)
    if (r.meeples[p] == best) scores[p] += points;
}

void GameState::score_completed(int root) {
  Node& r = nodes_[root];
  int points = 0;
  switch (r.kind) {
    case FeatureKind::Road: points = distinct_tiles(root); break;
    case FeatureKind::City: points = 2 * distinct_tiles(root) + 2 * r.pennants; break;
    case FeatureKind::Monastery: points = 9; break;
    case FeatureKind::Field: return;
  }
  if (r.meeples[0] + r.meeples[1] == 0) return;
  award(root, points, fixed_);
  int m = root;
  do {
    Node& n = nodes_[m];
    if (n.meeple >= 0) {
      ++meeples_[n.meeple];
      n.meeple = -1;
      for (std::size_t i = 0; i < meeple_nodes_.size(); ++i) {
        if (meeple_nodes_[i] == m) {
          meeple_nodes_.erase_at(i);
          break;
        }
      }
    }
    m = n.next;
  } while (m != root);
  r.meeples = {0, 0};
}

int GameState::end_value(int root) const {
  const Node& r = nodes_[root];
  switch (r.kind) {
    case FeatureKind::Road: return distinct_tiles(root);
    case FeatureKind::City: return distinct_tiles(root) + r.pennants;
    case FeatureKind::Monastery: return 9 - r.open;
    case FeatureKind::Field: break;
  }
  InlineVec<std::int16_t, kMaxNodes> cities;
  int m = root;
  do {
    const Node& n = nodes_[m];
    const PlacedTile& t = tiles_[n.tile];
    unsigned adj = deck_->kind(t.kind).segments[n.segment].adjacent_cities;
    while (adj) {
      int c = std::countr_zero(adj);
      adj &= adj - 1;
      int cr = find(t.first_node + c);
      if (nodes_[cr].open != 0) continue;
      if (std::find(cities.begin(), cities.end(), cr) == cities.end()) cities.push_back(static_cast<std::int16_t>(cr));
    }
    m = n.next;
  } while (m != root);
  return 3 * static_cast<int>(cities.size());
}

std::array<int, 2> GameState::virtual_scores() const {
  std::array<int, 2> scores = fixed_;
  InlineVec<std::int16_t, 2 * kMeeplesPerPlayer> seen;
  for (auto node : meeple_nodes_) {
    int root = find(node);
    if (std::find(seen.begin(), seen.end(), root) != seen.end()) continue;
    seen.push_back(static_cast<std::int16_t>(root));
    award(root, end_value(root), scores);
  }
  return scores;
}

int GameState::reward(Player p) const {
  auto v = virtual_scores();
  return v[idx(p)] - v[idx(other(p))];
}

Outcome outcome_from_reward(int reward_p1) {
  if (reward_p1 > 0) return Outcome::P1Win;
  if (reward_p1 < 0) return Outcome::P2Win;
  return Outcome::Draw;
}

Outcome GameState::outcome() const {
  if (!is_terminal()) throw Error(ErrorCode::NotTerminal, "outcome: game is not over");
  return outcome_from_reward(reward(Player::P1));
}

bool operator==(const GameState& a, const GameState& b) {
  return a.deck_ == b.deck_ && a.tiles_.size() == b.tiles_.size() &&
         std::equal(a.tiles_.begin(), a.tiles_.end(), b.tiles_.begin(),
                    [](const PlacedTile& x, const PlacedTile& y) {
                      return x.pos == y.pos && x.kind == y.kind && x.rotation == y.rotation &&
                             x.first_node == y.first_node;
                    }) &&
         a.nodes_ == b.nodes_ && a.frontier_ == b.frontier_ && a.stack_ == b.stack_ &&
         a.meeple_nodes_ == b.meeple_nodes_ && a.cells_ == b.cells_ && a.fixed_ == b.fixed_ &&
         a.meeples_ == b.meeples_ && a.current_ == b.current_ && a.drawn_ == b.drawn_ && a.turn_ == b.turn_ &&
         a.unplayable_draws_ == b.unplayable_draws_ && a.ended_early_ == b.ended_early_;
}

// ---------------------------------------------------------------- free functions

std::vector<Action> legal_actions(const GameState& s) { return s.legal_actions(); }

GameState apply_action(const GameState& s, const Action& a) {
  GameState next = s;
  next.apply(a);
  return next;
}

GameState draw_tile(const GameState& s) {
  GameState next = s;
  next.draw_next();
  return next;
}

GameState draw_tile(const GameState& s, Rng& rng) {
  GameState next = s;
  next.draw_random(rng);
  return next;
}

int virtual_score(const GameState& s, Player p) { return s.virtual_score(p); }
int reward(const GameState& s, Player p) { return s.reward(p); }
bool is_terminal(const GameState& s) { return s.is_terminal(); }
Outcome outcome(const GameState& s) { return s.outcome(); }

}  // namespace carc
