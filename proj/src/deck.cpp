#include "carc/deck.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "carc/errors.hpp"
#include "embedded_deck.hpp"

namespace carc {

namespace {

constexpr char kSideLetters[] = {'N', 'E', 'S', 'W'};

char edge_letter(EdgeType e) {
  switch (e) {
    case EdgeType::City: return 'C';
    case EdgeType::Road: return 'R';
    case EdgeType::Field: return 'F';
  }
  return '?';
}

char feature_letter(FeatureKind k) {
  switch (k) {
    case FeatureKind::City: return 'C';
    case FeatureKind::Road: return 'R';
    case FeatureKind::Monastery: return 'M';
    case FeatureKind::Field: return 'F';
  }
  return '?';
}

int side_index(char c) {
  for (int d = 0; d < kSides; ++d)
    if (kSideLetters[d] == c) return d;
  return -1;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_fail(int line_no, const std::string& msg) {
  throw Error(ErrorCode::Parse, "deck line " + std::to_string(line_no) + ": " + msg);
}

int parse_int(std::string_view tok, int line_no, const char* what) {
  int value = 0;
  if (tok.empty()) parse_fail(line_no, std::string("empty ") + what);
  for (char c : tok) {
    if (c < '0' || c > '9') parse_fail(line_no, std::string("bad ") + what + " '" + std::string(tok) + "'");
    value = value * 10 + (c - '0');
    if (value > 1000000) parse_fail(line_no, std::string(what) + " out of range");
  }
  return value;
}

std::uint16_t parse_slots(std::string_view text, int line_no) {
  if (text == "-") return 0;
  std::uint16_t mask = 0;
  for (auto name : split(text, ',')) {
    if (name.empty() || name.size() > 2) parse_fail(line_no, "bad slot '" + std::string(name) + "'");
    int side = side_index(name[0]);
    if (side < 0) parse_fail(line_no, "bad slot '" + std::string(name) + "'");
    std::uint16_t bits;
    if (name.size() == 1) {
      bits = static_cast<std::uint16_t>(0b111u << (3 * side));
    } else {
      int k = name[1] - '0';
      if (k < 0 || k > 2) parse_fail(line_no, "bad slot '" + std::string(name) + "'");
      bits = static_cast<std::uint16_t>(1u << (3 * side + k));
    }
    if (mask & bits) parse_fail(line_no, "slot listed twice in '" + std::string(text) + "'");
    mask |= bits;
  }
  return mask;
}

FeatureSegment parse_segment(std::string_view tok, int line_no) {
  auto colon = tok.find(':');
  if (colon == std::string_view::npos || colon == 0)
    parse_fail(line_no, "segment '" + std::string(tok) + "' lacks '<kind>:'");
  std::string_view head = tok.substr(0, colon);
  std::string_view rest = tok.substr(colon + 1);

  FeatureSegment seg;
  switch (head[0]) {
    case 'C': seg.kind = FeatureKind::City; break;
    case 'R': seg.kind = FeatureKind::Road; break;
    case 'M': seg.kind = FeatureKind::Monastery; break;
    case 'F': seg.kind = FeatureKind::Field; break;
    default: parse_fail(line_no, "unknown feature kind in '" + std::string(tok) + "'");
  }
  if (head.size() == 2 && head[1] == '+') {
    seg.pennant = true;
  } else if (head.size() != 1) {
    parse_fail(line_no, "bad segment head '" + std::string(head) + "'");
  }

  auto at = rest.find('@');
  seg.slots = parse_slots(rest.substr(0, at), line_no);
  if (at != std::string_view::npos) {
    for (auto idx : split(rest.substr(at + 1), ',')) {
      int j = parse_int(idx, line_no, "adjacency index");
      if (j >= kMaxSegmentsPerTile) parse_fail(line_no, "adjacency index out of range");
      seg.adjacent_cities |= static_cast<std::uint16_t>(1u << j);
    }
  }
  return seg;
}

std::vector<std::string> kind_problems(const TileKind& k) {
  std::vector<std::string> out;
  auto fail = [&](const std::string& m) { out.push_back("kind " + k.id + ": " + m); };

  if (k.deck_count < 1) fail("deck count must be at least 1");
  if (k.segments.empty()) fail("no segments");
  if (k.segments.size() > static_cast<std::size_t>(kMaxSegmentsPerTile)) fail("too many segments");

  std::uint16_t covered = 0;
  int monasteries = 0;
  for (std::size_t i = 0; i < k.segments.size(); ++i) {
    const auto& s = k.segments[i];
    const std::string name = "segment " + std::to_string(i);
    if (s.kind == FeatureKind::Monastery) {
      ++monasteries;
      if (s.slots != 0) fail(name + ": monastery must not touch edge slots");
    } else if (s.slots == 0) {
      fail(name + ": touches no edge slots");
    }
    if (covered & s.slots) fail(name + ": slot shared with another segment");
    covered |= s.slots;
    if (s.pennant && s.kind != FeatureKind::City) fail(name + ": pennant on a non-city");
    if (s.adjacent_cities != 0) {
      if (s.kind != FeatureKind::Field) fail(name + ": city adjacency on a non-field");
      for (int j = 0; j < kMaxSegmentsPerTile; ++j) {
        if (!(s.adjacent_cities & (1u << j))) continue;
        if (static_cast<std::size_t>(j) >= k.segments.size() ||
            k.segments[j].kind != FeatureKind::City)
          fail(name + ": adjacency " + std::to_string(j) + " is not a city segment");
      }
    }
  }
  if (monasteries > 1) fail("more than one monastery");
  if (covered != 0xFFF) fail("not every edge slot is covered by a segment");

  auto owner = [&](int slot) -> const FeatureSegment* {
    for (const auto& s : k.segments)
      if (s.slots & (1u << slot)) return &s;
    return nullptr;
  };
  for (int d = 0; d < kSides; ++d) {
    const FeatureSegment* a = owner(3 * d);
    const FeatureSegment* m = owner(3 * d + 1);
    const FeatureSegment* b = owner(3 * d + 2);
    if (!a || !m || !b) continue;
    const std::string side = std::string("side ") + kSideLetters[d];
    switch (k.edges[d]) {
      case EdgeType::City:
        if (m->kind != FeatureKind::City || a != m || b != m)
          fail(side + ": city edge must be one city segment across all three slots");
        break;
      case EdgeType::Road:
        if (m->kind != FeatureKind::Road || a->kind != FeatureKind::Field ||
            b->kind != FeatureKind::Field)
          fail(side + ": road edge needs a road in the middle slot and fields beside it");
        break;
      case EdgeType::Field:
        if (a->kind != FeatureKind::Field || m->kind != FeatureKind::Field ||
            b->kind != FeatureKind::Field)
          fail(side + ": field edge must be fields in all three slots");
        break;
    }
  }
  return out;
}

}  // namespace

std::string serialize_segment(const FeatureSegment& seg) {
  std::string out(1, feature_letter(seg.kind));
  if (seg.pennant) out += '+';
  out += ':';
  if (seg.slots == 0) {
    out += '-';
  } else {
    bool first = true;
    for (int d = 0; d < kSides; ++d) {
      unsigned side_bits = (seg.slots >> (3 * d)) & 0b111u;
      if (side_bits == 0) continue;
      if (side_bits == 0b111u) {
        if (!first) out += ',';
        out += kSideLetters[d];
        first = false;
        continue;
      }
      for (int k = 0; k < 3; ++k) {
        if (!(side_bits & (1u << k))) continue;
        if (!first) out += ',';
        out += kSideLetters[d];
        out += static_cast<char>('0' + k);
        first = false;
      }
    }
  }
  if (seg.adjacent_cities) {
    out += '@';
    bool first = true;
    for (int j = 0; j < kMaxSegmentsPerTile; ++j) {
      if (!(seg.adjacent_cities & (1u << j))) continue;
      if (!first) out += ',';
      out += std::to_string(j);
      first = false;
    }
  }
  return out;
}

namespace {

std::string canonical_line(const TileKind& k) {
  std::string line = k.id + ' ' + std::to_string(k.deck_count) + ' ' + (k.is_start ? '1' : '0') + ' ';
  for (auto e : k.edges) line += edge_letter(e);
  for (const auto& s : k.segments) line += ' ' + serialize_segment(s);
  return line;
}

std::string canonical_text_of(std::span<const TileKind> kinds) {
  std::string text;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i) text += '\n';
    text += canonical_line(kinds[i]);
  }
  return text;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_checksum(std::uint64_t value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(value));
  return buf;
}

DeckTable parse_deck_table(std::string_view text) {
  DeckTable table;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    auto toks = tokens(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "checksum") {
      if (toks.size() != 2 || toks[1].rfind("fnv1a64:", 0) != 0 || toks[1].size() != 8 + 16)
        parse_fail(line_no, "checksum line must be 'checksum fnv1a64:<16 hex digits>'");
      if (table.declared_checksum) parse_fail(line_no, "duplicate checksum line");
      std::uint64_t v = 0;
      for (char c : toks[1].substr(8)) {
        int digit;
        if (c >= '0' && c <= '9') digit = c - '0';
        else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
        else parse_fail(line_no, "bad hex digit in checksum");
        v = (v << 4) | static_cast<std::uint64_t>(digit);
      }
      table.declared_checksum = v;
      continue;
    }
    if (table.declared_checksum) parse_fail(line_no, "archetype after the checksum line");
    if (toks.size() < 5) parse_fail(line_no, "expected '<id> <count> <start> <edges> <segment>...'");

    TileKind k;
    k.id = std::string(toks[0]);
    k.deck_count = parse_int(toks[1], line_no, "count");
    if (toks[2] != "0" && toks[2] != "1") parse_fail(line_no, "start flag must be 0 or 1");
    k.is_start = toks[2] == "1";
    if (toks[3].size() != 4) parse_fail(line_no, "edges must be four letters");
    for (int d = 0; d < kSides; ++d) {
      switch (toks[3][d]) {
        case 'C': k.edges[d] = EdgeType::City; break;
        case 'R': k.edges[d] = EdgeType::Road; break;
        case 'F': k.edges[d] = EdgeType::Field; break;
        default: parse_fail(line_no, "edge letter must be C, R or F");
      }
    }
    for (std::size_t i = 4; i < toks.size(); ++i) k.segments.push_back(parse_segment(toks[i], line_no));
    table.kinds.push_back(std::move(k));
  }
  table.computed_checksum = fnv1a64(canonical_text_of(table.kinds));
  return table;
}

std::vector<std::string> deck_problems(const DeckTable& table) {
  std::vector<std::string> out;
  if (table.kinds.empty()) out.push_back("deck has no archetypes");
  if (table.kinds.size() > static_cast<std::size_t>(kMaxKinds))
    out.push_back("too many archetypes (limit " + std::to_string(kMaxKinds) + ")");
  for (std::size_t i = 0; i < table.kinds.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (table.kinds[i].id == table.kinds[j].id) out.push_back("duplicate kind id " + table.kinds[i].id);
    auto p = kind_problems(table.kinds[i]);
    out.insert(out.end(), p.begin(), p.end());
  }
  int starts = 0;
  int total = 0;
  for (const auto& k : table.kinds) {
    starts += k.is_start ? 1 : 0;
    total += k.deck_count;
  }
  if (starts == 0) out.push_back("start tile: no archetype is flagged as the start tile");
  if (starts > 1) out.push_back("start tile: " + std::to_string(starts) + " archetypes flagged, expected exactly 1");
  if (total != kStandardTileCount)
    out.push_back("total tile count " + std::to_string(total) + " != " + std::to_string(kStandardTileCount));
  if (!table.declared_checksum) {
    out.push_back("checksum: missing checksum line");
  } else if (*table.declared_checksum != table.computed_checksum) {
    out.push_back("checksum: declared " + format_checksum(*table.declared_checksum) + " but table hashes to " +
                  format_checksum(table.computed_checksum));
  }
  return out;
}

Deck::Deck(std::vector<TileKind> kinds) : kinds_(std::move(kinds)) {
  std::vector<std::string> problems;
  if (kinds_.empty() || kinds_.size() > static_cast<std::size_t>(kMaxKinds))
    problems.push_back("archetype count out of range");
  int starts = 0;
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    auto p = kind_problems(kinds_[i]);
    problems.insert(problems.end(), p.begin(), p.end());
    if (kinds_[i].is_start) {
      ++starts;
      start_ = static_cast<KindId>(i);
    }
  }
  if (starts != 1) problems.push_back("exactly one start archetype required");
  if (!problems.empty()) {
    std::string msg = "invalid deck:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::Validation, msg);
  }

  orientations_.resize(kinds_.size() * 4);
  monastery_.assign(kinds_.size(), -1);
  for (std::size_t k = 0; k < kinds_.size(); ++k) {
    const auto& kind = kinds_[k];
    for (std::size_t i = 0; i < kind.segments.size(); ++i)
      if (kind.segments[i].kind == FeatureKind::Monastery) monastery_[k] = static_cast<int>(i);
    for (int r = 0; r < 4; ++r) {
      Orientation& o = orientations_[k * 4 + r];
      o.segment_at_slot.fill(-1);
      for (int d = 0; d < kSides; ++d) o.edges[(d + r) % 4] = kind.edges[d];
      for (std::size_t i = 0; i < kind.segments.size(); ++i)
        for (int s = 0; s < kSlots; ++s)
          if (kind.segments[i].slots & (1u << s)) o.segment_at_slot[(s + 3 * r) % kSlots] = static_cast<std::int8_t>(i);
      o.packed_edges = 0;
      for (int d = 0; d < kSides; ++d)
        o.packed_edges |= static_cast<std::uint8_t>(static_cast<unsigned>(o.edges[d]) << (2 * d));
    }
  }
}

std::optional<KindId> Deck::find(std::string_view id) const {
  for (std::size_t i = 0; i < kinds_.size(); ++i)
    if (kinds_[i].id == id) return static_cast<KindId>(i);
  return std::nullopt;
}

int Deck::total_tiles() const {
  int total = 0;
  for (const auto& k : kinds_) total += k.deck_count;
  return total;
}

std::vector<KindId> Deck::draw_pile() const {
  std::vector<KindId> pile;
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    int copies = kinds_[i].deck_count - (kinds_[i].is_start ? 1 : 0);
    pile.insert(pile.end(), copies, static_cast<KindId>(i));
  }
  return pile;
}

std::string Deck::canonical_text() const { return canonical_text_of(kinds_); }

std::uint64_t Deck::checksum() const { return fnv1a64(canonical_text()); }

std::shared_ptr<const Deck> parse_deck(std::string_view text) {
  DeckTable table = parse_deck_table(text);
  auto problems = deck_problems(table);
  if (!problems.empty()) {
    std::string msg = "invalid deck:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::Validation, msg);
  }
  return std::make_shared<const Deck>(std::move(table.kinds));
}

std::shared_ptr<const Deck> load_deck(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open deck file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_deck(ss.str());
}

std::string_view standard_deck_text() { return kEmbeddedDeckText; }

std::shared_ptr<const Deck> standard_deck() {
  static const std::shared_ptr<const Deck> deck = parse_deck(kEmbeddedDeckText);
  return deck;
}

}  // namespace carc
