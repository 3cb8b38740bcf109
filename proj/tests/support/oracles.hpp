#pragma once

// Independent reference computations used by the engine tests and the
// acceptance suite. Everything here works from the raw TileKind tables and
// the list of placed tiles; none of it touches the engine's union-find or
// its precomputed orientations.

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "carc/game_state.hpp"

namespace carc::oracle {

struct Component {
  FeatureKind kind = FeatureKind::Field;
  std::vector<std::pair<int, int>> members;  // sorted (tile, segment)
  int open_edges = 0;
  int pennants = 0;
  std::array<int, 2> meeples{};
  int tiles = 0;
  bool complete = false;
};

inline constexpr int kDx[4] = {0, 1, 0, -1};
inline constexpr int kDy[4] = {1, 0, -1, 0};

// Segment of `kind` owning slot `s` once the tile is turned `rot` times.
inline int owner_of_slot(const TileKind& kind, int rot, int s) {
  int original = ((s - 3 * rot) % 12 + 12) % 12;
  for (std::size_t i = 0; i < kind.segments.size(); ++i)
    if (kind.segments[i].slots & (1u << original)) return static_cast<int>(i);
  return -1;
}

inline EdgeType rotated_edge(const TileKind& kind, int rot, int side) {
  return kind.edges[((side - rot) % 4 + 4) % 4];
}

// Slot across the shared side: side flips by two, position within the side
// is mirrored because both tiles count clockwise.
inline int facing_slot(int s) {
  int side = s / 3;
  int k = s % 3;
  return ((side + 2) % 4) * 3 + (2 - k);
}

struct Board {
  std::map<std::pair<int, int>, int> at;  // (x, y) -> tile index
  explicit Board(const GameState& s) {
    for (std::size_t t = 0; t < s.tiles().size(); ++t)
      at[{s.tiles()[t].pos.x, s.tiles()[t].pos.y}] = static_cast<int>(t);
  }
  int get(int x, int y) const {
    auto it = at.find({x, y});
    return it == at.end() ? -1 : it->second;
  }
};

// From-scratch flood fill over (tile, segment) pairs.
inline std::vector<Component> flood_fill(const GameState& s) {
  const Deck& deck = s.deck();
  const auto tiles = s.tiles();
  Board board(s);
  std::map<std::pair<int, int>, int> comp_of;
  std::vector<Component> comps;

  auto neighbours = [&](int t, int seg) {
    std::vector<std::pair<int, int>> out;
    const PlacedTile& pt = tiles[t];
    const TileKind& kind = deck.kind(pt.kind);
    for (int slot = 0; slot < 12; ++slot) {
      if (owner_of_slot(kind, pt.rotation, slot) != seg) continue;
      int side = slot / 3;
      int nt = board.get(pt.pos.x + kDx[side], pt.pos.y + kDy[side]);
      if (nt < 0) continue;
      const PlacedTile& nb = tiles[nt];
      out.emplace_back(nt, owner_of_slot(deck.kind(nb.kind), nb.rotation, facing_slot(slot)));
    }
    return out;
  };

  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const TileKind& kind = deck.kind(tiles[t].kind);
    for (std::size_t seg = 0; seg < kind.segments.size(); ++seg) {
      std::pair<int, int> start{static_cast<int>(t), static_cast<int>(seg)};
      if (comp_of.count(start)) continue;
      Component c;
      c.kind = kind.segments[seg].kind;
      std::vector<std::pair<int, int>> todo{start};
      comp_of[start] = static_cast<int>(comps.size());
      while (!todo.empty()) {
        auto cur = todo.back();
        todo.pop_back();
        c.members.push_back(cur);
        for (auto nb : neighbours(cur.first, cur.second)) {
          if (comp_of.count(nb)) continue;
          comp_of[nb] = static_cast<int>(comps.size());
          todo.push_back(nb);
        }
      }
      std::sort(c.members.begin(), c.members.end());
      comps.push_back(std::move(c));
    }
  }

  for (auto& c : comps) {
    std::set<int> distinct;
    for (auto [t, seg] : c.members) {
      distinct.insert(t);
      const PlacedTile& pt = tiles[t];
      const TileKind& kind = deck.kind(pt.kind);
      const FeatureSegment& fs = kind.segments[seg];
      if (fs.pennant) ++c.pennants;
      auto m = s.meeple_on(t);
      if (m && m->first == seg) ++c.meeples[idx(m->second)];
      if (fs.kind == FeatureKind::City || fs.kind == FeatureKind::Road) {
        for (int side = 0; side < 4; ++side) {
          if (owner_of_slot(kind, pt.rotation, side * 3 + 1) != seg) continue;
          if (board.get(pt.pos.x + kDx[side], pt.pos.y + kDy[side]) < 0) ++c.open_edges;
        }
      } else if (fs.kind == FeatureKind::Monastery) {
        int present = 0;
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy)
            if ((dx || dy) && board.get(pt.pos.x + dx, pt.pos.y + dy) >= 0) ++present;
        c.open_edges = 8 - present;
      }
    }
    c.tiles = static_cast<int>(distinct.size());
    c.complete = c.kind != FeatureKind::Field && c.open_edges == 0;
  }
  return comps;
}

// Scores every incomplete feature as if the game ended now.
inline std::array<int, 2> finished_scores(const GameState& s) {
  auto comps = flood_fill(s);
  const Deck& deck = s.deck();
  std::map<std::pair<int, int>, int> comp_of;
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (auto m : comps[i].members) comp_of[m] = static_cast<int>(i);

  std::array<int, 2> scores = s.fixed_scores();
  for (const auto& c : comps) {
    int best = std::max(c.meeples[0], c.meeples[1]);
    if (best == 0 || c.complete) continue;
    int value = 0;
    switch (c.kind) {
      case FeatureKind::Road: value = c.tiles; break;
      case FeatureKind::City: value = c.tiles + c.pennants; break;
      case FeatureKind::Monastery: value = 1 + (8 - c.open_edges); break;
      case FeatureKind::Field: {
        std::set<int> cities;
        for (auto [t, seg] : c.members) {
          const TileKind& kind = deck.kind(s.tiles()[t].kind);
          for (std::size_t j = 0; j < kind.segments.size(); ++j) {
            if (!(kind.segments[seg].adjacent_cities & (1u << j))) continue;
            int ci = comp_of.at({t, static_cast<int>(j)});
            if (comps[ci].complete) cities.insert(ci);
          }
        }
        value = 3 * static_cast<int>(cities.size());
        break;
      }
    }
    for (int p = 0; p < 2; ++p)
      if (c.meeples[p] == best) scores[p] += value;
  }
  return scores;
}

// Every (cell, rotation, meeple) over the bounding box, filtered by the rules.
inline std::vector<Action> brute_force_actions(const GameState& s) {
  std::vector<Action> out;
  auto drawn = s.drawn_tile();
  if (!drawn) return out;
  const Deck& deck = s.deck();
  const TileKind& kind = deck.kind(*drawn);
  const auto tiles = s.tiles();
  Board board(s);
  auto comps = flood_fill(s);
  std::map<std::pair<int, int>, int> comp_of;
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (auto m : comps[i].members) comp_of[m] = static_cast<int>(i);

  int min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& t : tiles) {
    min_x = std::min<int>(min_x, t.pos.x);
    max_x = std::max<int>(max_x, t.pos.x);
    min_y = std::min<int>(min_y, t.pos.y);
    max_y = std::max<int>(max_y, t.pos.y);
  }
  for (int x = min_x - 1; x <= max_x + 1; ++x) {
    for (int y = min_y - 1; y <= max_y + 1; ++y) {
      if (board.get(x, y) >= 0) continue;
      for (int rot = 0; rot < 4; ++rot) {
        bool touching = false;
        bool matches = true;
        for (int side = 0; side < 4; ++side) {
          int nt = board.get(x + kDx[side], y + kDy[side]);
          if (nt < 0) continue;
          touching = true;
          const PlacedTile& nb = tiles[nt];
          if (rotated_edge(deck.kind(nb.kind), nb.rotation, (side + 2) % 4) != rotated_edge(kind, rot, side))
            matches = false;
        }
        if (!touching || !matches) continue;
        Position pos{static_cast<std::int8_t>(x), static_cast<std::int8_t>(y)};
        out.push_back(Action{pos, static_cast<std::uint8_t>(rot), -1});
        if (s.meeples_available(s.current_player()) == 0) continue;
        for (std::size_t seg = 0; seg < kind.segments.size(); ++seg) {
          bool claimed = false;
          for (int slot = 0; slot < 12; ++slot) {
            if (owner_of_slot(kind, rot, slot) != static_cast<int>(seg)) continue;
            int side = slot / 3;
            int nt = board.get(x + kDx[side], y + kDy[side]);
            if (nt < 0) continue;
            const PlacedTile& nb = tiles[nt];
            int nseg = owner_of_slot(deck.kind(nb.kind), nb.rotation, facing_slot(slot));
            const Component& c = comps[comp_of.at({nt, nseg})];
            if (c.meeples[0] + c.meeples[1] > 0) claimed = true;
          }
          if (!claimed) out.push_back(Action{pos, static_cast<std::uint8_t>(rot), static_cast<std::int8_t>(seg)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// First difference between the engine's feature graph and the flood fill,
// or "" when every component agrees.
inline std::string graph_mismatch(const GameState& s) {
  auto comps = flood_fill(s);
  std::size_t covered = 0;
  for (const auto& c : comps) {
    covered += c.members.size();
    auto [t, seg] = c.members.front();
    const std::string where = "component at tile " + std::to_string(t) + " segment " + std::to_string(seg) + ": ";
    ComponentInfo info = s.component(t, seg);
    if (info.members != c.members) return where + "members";
    if (info.kind != c.kind) return where + "kind";
    if (info.open_edges != c.open_edges) return where + "open edges";
    if (info.pennants != c.pennants) return where + "pennants";
    if (info.meeples != c.meeples) return where + "meeples";
    if (info.tiles != c.tiles) return where + "tile count";
    if (info.complete != c.complete) return where + "completion";
    for (auto [mt, ms] : c.members)
      if (s.component_id(mt, ms) != s.component_id(t, seg)) return where + "component ids";
  }
  std::size_t segments = 0;
  for (const auto& pt : s.tiles()) segments += s.deck().kind(pt.kind).segments.size();
  if (covered != segments) return "segment coverage";
  return {};
}

}  // namespace carc::oracle
