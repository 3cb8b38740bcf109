#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace carc {

enum class EdgeType : std::uint8_t { Field = 0, Road = 1, City = 2 };
enum class FeatureKind : std::uint8_t { City, Road, Monastery, Field };

using KindId = std::uint8_t;

inline constexpr int kSides = 4;
inline constexpr int kSlots = 12;
inline constexpr int kMaxSegmentsPerTile = 12;
inline constexpr int kMaxKinds = 64;
inline constexpr int kStandardTileCount = 72;

// Slot s lies on side s / 3; slot 3 * side + 1 is the middle of the side.
inline constexpr std::uint16_t kMiddleSlots = 0b010'010'010'010;

// Slot on the neighbouring tile that touches slot s across the shared side.
constexpr int opposite_slot(int s) {
  return ((s / 3 + 2) % 4) * 3 + (2 - s % 3);
}

struct FeatureSegment {
  FeatureKind kind = FeatureKind::Field;
  std::uint16_t slots = 0;            // bit i set when the segment touches slot i
  bool pennant = false;
  std::uint16_t adjacent_cities = 0;  // fields only: bit j = city segment j
};

struct TileKind {
  std::string id;
  std::array<EdgeType, kSides> edges{};  // N, E, S, W
  std::vector<FeatureSegment> segments;
  int deck_count = 0;
  bool is_start = false;
};

// A TileKind turned clockwise by `rotation` quarter turns.
struct Orientation {
  std::array<EdgeType, kSides> edges{};
  std::uint8_t packed_edges = 0;  // 2 bits per side, side d at bits 2d..2d+1
  std::array<std::int8_t, kSlots> segment_at_slot{};
};

class Deck {
 public:
  // Validates every per-kind invariant and the single start tile. The total
  // tile count and checksum are only enforced by parse_deck/load_deck.
  explicit Deck(std::vector<TileKind> kinds);

  std::span<const TileKind> kinds() const { return kinds_; }
  const TileKind& kind(KindId k) const { return kinds_[k]; }
  std::size_t kind_count() const { return kinds_.size(); }
  std::optional<KindId> find(std::string_view id) const;
  KindId start_kind() const { return start_; }
  int total_tiles() const;

  const Orientation& orientation(KindId k, int rotation) const {
    return orientations_[k * 4 + rotation];
  }
  // Segment index of the kind's monastery, or -1.
  int monastery_segment(KindId k) const { return monastery_[k]; }

  // Every copy except the start tile, grouped by kind in table order.
  std::vector<KindId> draw_pile() const;

  std::string canonical_text() const;
  std::uint64_t checksum() const;

 private:
  std::vector<TileKind> kinds_;
  std::vector<Orientation> orientations_;
  std::vector<int> monastery_;
  KindId start_ = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string format_checksum(std::uint64_t value);

// Raw result of reading a deck table, before deck-level validation.
struct DeckTable {
  std::vector<TileKind> kinds;
  std::optional<std::uint64_t> declared_checksum;
  std::uint64_t computed_checksum = 0;
};

// Throws Error(Parse) on grammar violations.
DeckTable parse_deck_table(std::string_view text);

// Every violated invariant, one message each. Empty means the table is good.
std::vector<std::string> deck_problems(const DeckTable& table);

// Strict loaders: grammar, per-kind invariants, 72 tiles, one start tile,
// matching checksum. Throw Error(Parse) or Error(Validation).
std::shared_ptr<const Deck> parse_deck(std::string_view text);
std::shared_ptr<const Deck> load_deck(const std::string& path);

// The shipped base-game table (data/deck.txt, compiled in).
std::shared_ptr<const Deck> standard_deck();
std::string_view standard_deck_text();

std::string serialize_segment(const FeatureSegment& seg);

}  // namespace carc
