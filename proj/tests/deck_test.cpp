#include <gtest/gtest.h>

#include <map>
#include <string>

#include "carc/deck.hpp"
#include "carc/errors.hpp"
#include "support/oracles.hpp"

using namespace carc;

namespace {

std::string replace_line(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos);
  return text.replace(pos, from.size(), to);
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems)
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(StandardDeck, HasSeventyTwoTilesInTwentyFourKinds) {
  auto deck = standard_deck();
  EXPECT_EQ(deck->kind_count(), 24u);
  EXPECT_EQ(deck->total_tiles(), 72);
  EXPECT_EQ(deck->draw_pile().size(), 71u);
}

TEST(StandardDeck, CountsMatchTheShippedTable) {
  // Hand count of the base-game box.
  const std::map<std::string, int> expected{
      {"A", 2}, {"B", 4}, {"C", 1}, {"D", 4}, {"E", 5}, {"F", 2}, {"G", 1}, {"H", 3},
      {"I", 2}, {"J", 3}, {"K", 3}, {"L", 3}, {"M", 2}, {"N", 3}, {"O", 2}, {"P", 3},
      {"Q", 1}, {"R", 3}, {"S", 2}, {"T", 1}, {"U", 8}, {"V", 9}, {"W", 4}, {"X", 1}};
  auto deck = standard_deck();
  for (const auto& k : deck->kinds()) EXPECT_EQ(k.deck_count, expected.at(k.id)) << k.id;
}

TEST(StandardDeck, SingleStartTileWithCityRoadField) {
  auto deck = standard_deck();
  int starts = 0;
  for (const auto& k : deck->kinds()) starts += k.is_start;
  EXPECT_EQ(starts, 1);
  const TileKind& start = deck->kind(deck->start_kind());
  EXPECT_EQ(start.edges[0], EdgeType::City);
  EXPECT_EQ(start.edges[1], EdgeType::Road);
  EXPECT_EQ(start.edges[2], EdgeType::Field);
  EXPECT_EQ(start.edges[3], EdgeType::Road);
}

TEST(StandardDeck, ChecksumMatchesDeclaredLine) {
  auto table = parse_deck_table(standard_deck_text());
  ASSERT_TRUE(table.declared_checksum.has_value());
  EXPECT_EQ(*table.declared_checksum, table.computed_checksum);
  EXPECT_EQ(standard_deck()->checksum(), table.computed_checksum);
  EXPECT_EQ(fnv1a64(standard_deck()->canonical_text()), table.computed_checksum);
  EXPECT_TRUE(deck_problems(table).empty());
}

TEST(StandardDeck, EverySlotOwnedOnceWithMatchingEdge) {
  for (const auto& k : standard_deck()->kinds()) {
    std::uint32_t seen = 0;
    for (const auto& seg : k.segments) {
      EXPECT_EQ(seen & seg.slots, 0u) << k.id;
      seen |= seg.slots;
      if (seg.kind == FeatureKind::Monastery) {
        EXPECT_EQ(seg.slots, 0u);
      }
      if (seg.pennant) {
        EXPECT_EQ(seg.kind, FeatureKind::City);
      }
      for (int side = 0; side < 4; ++side) {
        if (!(seg.slots & (1u << (3 * side + 1)))) continue;
        EdgeType e = k.edges[side];
        FeatureKind want = e == EdgeType::City ? FeatureKind::City
                         : e == EdgeType::Road ? FeatureKind::Road
                                               : FeatureKind::Field;
        EXPECT_EQ(seg.kind, want) << k.id << " side " << side;
      }
    }
    EXPECT_EQ(seen, 0xFFFu) << k.id;
  }
}

TEST(StandardDeck, OrientationsAgreeWithRotationOracle) {
  auto deck = standard_deck();
  for (KindId k = 0; k < deck->kind_count(); ++k) {
    for (int r = 0; r < 4; ++r) {
      const Orientation& o = deck->orientation(k, r);
      for (int side = 0; side < 4; ++side)
        EXPECT_EQ(o.edges[side], oracle::rotated_edge(deck->kind(k), r, side));
      for (int slot = 0; slot < 12; ++slot)
        EXPECT_EQ(o.segment_at_slot[slot], oracle::owner_of_slot(deck->kind(k), r, slot));
    }
  }
}

TEST(StandardDeck, OppositeSlotIsAnInvolutionAcrossSides) {
  for (int s = 0; s < 12; ++s) {
    EXPECT_EQ(opposite_slot(opposite_slot(s)), s);
    EXPECT_EQ(opposite_slot(s), oracle::facing_slot(s));
    EXPECT_EQ((opposite_slot(s) / 3 + 4 - s / 3) % 4, 2);
  }
}

TEST(DeckParsing, TamperedCountNamesTheTotal) {
  std::string text = replace_line(std::string(standard_deck_text()), "V 9 0", "V 8 0");
  auto table = parse_deck_table(text);
  auto problems = deck_problems(table);
  EXPECT_TRUE(mentions(problems, "total tile count 71"));
  EXPECT_THROW(parse_deck(text), Error);
}

TEST(DeckParsing, MissingStartTileIsReported) {
  std::string text = replace_line(std::string(standard_deck_text()), "D 4 1", "D 4 0");
  auto problems = deck_problems(parse_deck_table(text));
  EXPECT_TRUE(mentions(problems, "start tile"));
}

TEST(DeckParsing, ChecksumMismatchIsReported) {
  auto table = parse_deck_table(standard_deck_text());
  std::string text = replace_line(std::string(standard_deck_text()), format_checksum(table.computed_checksum),
                                  "fnv1a64:0000000000000000");
  auto problems = deck_problems(parse_deck_table(text));
  EXPECT_TRUE(mentions(problems, "checksum"));
}

TEST(DeckParsing, GrammarErrorsThrowParse) {
  try {
    parse_deck_table("A 2 0 FFZF M:-\n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
  EXPECT_THROW(parse_deck_table("A two 0 FFRF M:-\n"), Error);
  EXPECT_THROW(parse_deck_table("A 2 0 FFRF Q:N\n"), Error);
}

TEST(DeckParsing, SlotCoverageViolationIsRejected) {
  // The road segment drops its slot, leaving S1 unowned.
  std::string text = replace_line(std::string(standard_deck_text()), "A 2 0 FFRF M:- R:S1 F:N,E,S0,S2,W",
                                  "A 2 0 FFRF M:- F:N,E,S0,S2,W");
  EXPECT_THROW(parse_deck(text), Error);
}

TEST(DeckParsing, CanonicalTextRoundTrips) {
  auto deck = standard_deck();
  std::string rebuilt = deck->canonical_text() + "\nchecksum " + format_checksum(deck->checksum()) + "\n";
  auto again = parse_deck(rebuilt);
  EXPECT_EQ(again->checksum(), deck->checksum());
  EXPECT_EQ(again->total_tiles(), 72);
}
