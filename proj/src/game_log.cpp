#include "carc/game_log.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "carc/errors.hpp"

namespace carc {

namespace {

constexpr const char* kLogHeader = "carcassonne-log 1";

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw Error(ErrorCode::Parse, "log line " + std::to_string(line) + ": " + what);
}

Player parse_player(const std::string& s, int line) {
  if (s == "P1") return Player::P1;
  if (s == "P2") return Player::P2;
  parse_error(line, "bad player '" + s + "'");
}

Outcome parse_outcome(const std::string& s, int line) {
  for (Outcome o : {Outcome::P1Win, Outcome::P2Win, Outcome::Draw})
    if (s == to_string(o)) return o;
  parse_error(line, "bad outcome '" + s + "'");
}

EndReason parse_end(const std::string& s, int line) {
  for (EndReason r : {EndReason::Exhausted, EndReason::Early, EndReason::Forfeit})
    if (s == to_string(r)) return r;
  parse_error(line, "bad end reason '" + s + "'");
}

KindId parse_kind(const Deck& deck, const std::string& s, int line) {
  auto k = deck.find(s);
  if (!k) parse_error(line, "unknown tile kind '" + s + "'");
  return *k;
}

template <typename T>
T read_field(std::istringstream& in, int line, const char* what) {
  T v{};
  if (!(in >> v)) parse_error(line, std::string("missing or bad ") + what);
  return v;
}

std::string divergence(const GameRecord& g, int turn, const std::string& what) {
  return "divergence in game " + std::to_string(g.game_index) + " at turn " + std::to_string(turn) + ": " + what;
}

std::string pair_text(const std::array<int, 2>& a) {
  return "(" + std::to_string(a[0]) + ", " + std::to_string(a[1]) + ")";
}

}  // namespace

const char* to_string(EndReason r) {
  switch (r) {
    case EndReason::Exhausted: return "exhausted";
    case EndReason::Early: return "early";
    case EndReason::Forfeit: return "forfeit";
  }
  return "?";
}

GameRecord play_game(const std::shared_ptr<const Deck>& deck, const std::vector<KindId>& sequence,
                     const AgentSpec& p1, const AgentSpec& p2, std::uint64_t seed, std::ostream* diagnostics) {
  GameRecord rec;
  rec.sequence = sequence;
  rec.players = {p1.to_string(), p2.to_string()};
  rec.seed = seed;
  std::array<std::unique_ptr<Agent>, 2> agents{make_agent(p1, seed), make_agent(p2, seed)};

  GameState s = GameState::new_game(deck, sequence);
  while (!s.is_terminal()) {
    s.draw_next();
    if (s.is_terminal()) break;
    const Player mover = s.current_player();
    const int before = s.meeples_available(mover);
    Action a{};
    try {
      a = agents[idx(mover)]->choose(s);
    } catch (const std::exception& e) {
      rec.forfeiter = mover;
      rec.forfeit_reason = std::string("agent error: ") + e.what();
      break;
    }
    if (!s.is_legal(a)) {
      rec.forfeiter = mover;
      rec.forfeit_reason = "illegal action " + to_string(a);
      break;
    }
    if (diagnostics) {
      std::string d = agents[idx(mover)]->diagnostics();
      if (!d.empty()) *diagnostics << to_string(mover) << ' ' << d;
    }
    const KindId kind = *s.drawn_tile();
    s.apply(a);
    rec.turns.push_back(TurnRecord{s.turn(), mover, kind, a, before, s.fixed_scores(), s.virtual_scores()});
  }
  rec.final_scores = s.virtual_scores();
  rec.unplayable_draws = s.unplayable_draws();
  if (rec.forfeiter) {
    rec.end = EndReason::Forfeit;
    rec.outcome = *rec.forfeiter == Player::P1 ? Outcome::P2Win : Outcome::P1Win;
  } else {
    rec.end = s.ended_early() ? EndReason::Early : EndReason::Exhausted;
    rec.outcome = s.outcome();
  }
  return rec;
}

void write_log(std::ostream& out, const Deck& deck, const std::vector<GameRecord>& games) {
  out << kLogHeader << '\n';
  out << "deck " << format_checksum(deck.checksum()) << '\n';
  for (const GameRecord& g : games) {
    out << "game " << g.game_index << " match " << (g.match_id.empty() ? "-" : g.match_id) << " sequence "
        << g.sequence_id << " first " << (g.a_first ? 'A' : 'B') << " seed " << g.seed << '\n';
    out << "players " << g.players[0] << ' ' << g.players[1] << '\n';
    out << "stack";
    for (KindId k : g.sequence) out << ' ' << deck.kind(k).id;
    out << '\n';
    for (const TurnRecord& t : g.turns) {
      out << "turn " << t.turn << ' ' << to_string(t.player) << ' ' << deck.kind(t.kind).id << ' '
          << int(t.action.pos.x) << ' ' << int(t.action.pos.y) << ' ' << int(t.action.rotation) << ' ';
      if (t.action.has_meeple())
        out << int(t.action.meeple);
      else
        out << '-';
      out << ' ' << t.meeples_before << ' ' << t.fixed[0] << ' ' << t.fixed[1] << ' ' << t.virtual_scores[0] << ' '
          << t.virtual_scores[1] << '\n';
    }
    if (g.forfeiter) out << "forfeit " << to_string(*g.forfeiter) << ' ' << g.forfeit_reason << '\n';
    out << "result " << g.final_scores[0] << ' ' << g.final_scores[1] << ' ' << to_string(g.outcome) << ' '
        << g.unplayable_draws << ' ' << to_string(g.end) << '\n';
    out << "end\n";
  }
}

std::vector<GameRecord> read_log(std::istream& in, const Deck& deck) {
  std::vector<GameRecord> games;
  std::string text;
  int line = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (!out.empty()) return true;
    }
    return false;
  };
  if (!next_line(text) || text != kLogHeader) parse_error(line, "missing header '" + std::string(kLogHeader) + "'");
  if (!next_line(text)) parse_error(line, "missing deck line");
  {
    std::istringstream ls(text);
    std::string tag, sum;
    ls >> tag >> sum;
    if (tag != "deck") parse_error(line, "expected deck line");
    if (sum != format_checksum(deck.checksum()))
      throw Error(ErrorCode::Validation, "log was written with deck " + sum + ", loaded deck is " +
                                             format_checksum(deck.checksum()));
  }

  GameRecord* g = nullptr;
  bool open = false;
  while (next_line(text)) {
    std::istringstream ls(text);
    std::string tag;
    ls >> tag;
    if (tag == "game") {
      if (open) parse_error(line, "game block not closed");
      games.emplace_back();
      g = &games.back();
      open = true;
      g->game_index = read_field<int>(ls, line, "game index");
      std::string key;
      while (ls >> key) {
        if (key == "match") {
          g->match_id = read_field<std::string>(ls, line, "match id");
          if (g->match_id == "-") g->match_id.clear();
        } else if (key == "sequence") {
          g->sequence_id = read_field<int>(ls, line, "sequence id");
        } else if (key == "first") {
          std::string f = read_field<std::string>(ls, line, "first");
          if (f != "A" && f != "B") parse_error(line, "first must be A or B");
          g->a_first = f == "A";
        } else if (key == "seed") {
          g->seed = read_field<std::uint64_t>(ls, line, "seed");
        } else {
          parse_error(line, "unknown game field '" + key + "'");
        }
      }
      continue;
    }
    if (!open) parse_error(line, "'" + tag + "' outside a game block");
    if (tag == "players") {
      g->players[0] = read_field<std::string>(ls, line, "P1 spec");
      g->players[1] = read_field<std::string>(ls, line, "P2 spec");
    } else if (tag == "stack") {
      std::string id;
      while (ls >> id) g->sequence.push_back(parse_kind(deck, id, line));
    } else if (tag == "turn") {
      TurnRecord t;
      t.turn = read_field<int>(ls, line, "turn");
      t.player = parse_player(read_field<std::string>(ls, line, "player"), line);
      t.kind = parse_kind(deck, read_field<std::string>(ls, line, "kind"), line);
      int x = read_field<int>(ls, line, "x");
      int y = read_field<int>(ls, line, "y");
      int rot = read_field<int>(ls, line, "rotation");
      std::string m = read_field<std::string>(ls, line, "meeple");
      if (x < -127 || x > 127 || y < -127 || y > 127 || rot < 0 || rot > 3) parse_error(line, "action out of range");
      t.action.pos = Position{static_cast<std::int8_t>(x), static_cast<std::int8_t>(y)};
      t.action.rotation = static_cast<std::uint8_t>(rot);
      if (m != "-") {
        std::istringstream ms(m);
        int seg = -1;
        if (!(ms >> seg) || seg < 0 || seg >= kMaxSegmentsPerTile) parse_error(line, "bad meeple '" + m + "'");
        t.action.meeple = static_cast<std::int8_t>(seg);
      }
      t.meeples_before = read_field<int>(ls, line, "meeples");
      t.fixed[0] = read_field<int>(ls, line, "fixed P1");
      t.fixed[1] = read_field<int>(ls, line, "fixed P2");
      t.virtual_scores[0] = read_field<int>(ls, line, "virtual P1");
      t.virtual_scores[1] = read_field<int>(ls, line, "virtual P2");
      g->turns.push_back(t);
    } else if (tag == "forfeit") {
      g->forfeiter = parse_player(read_field<std::string>(ls, line, "player"), line);
      std::getline(ls >> std::ws, g->forfeit_reason);
    } else if (tag == "result") {
      g->final_scores[0] = read_field<int>(ls, line, "final P1");
      g->final_scores[1] = read_field<int>(ls, line, "final P2");
      g->outcome = parse_outcome(read_field<std::string>(ls, line, "outcome"), line);
      g->unplayable_draws = read_field<int>(ls, line, "unplayable draws");
      g->end = parse_end(read_field<std::string>(ls, line, "end reason"), line);
    } else if (tag == "end") {
      open = false;
    } else {
      parse_error(line, "unknown record '" + tag + "'");
    }
  }
  if (open) parse_error(line, "last game block not closed");
  return games;
}

ReplayReport verify_games(const std::shared_ptr<const Deck>& deck, const std::vector<GameRecord>& games) {
  ReplayReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.message = std::move(msg);
    return report;
  };
  for (const GameRecord& g : games) {
    GameState s = [&] {
      try {
        return GameState::new_game(deck, g.sequence);
      } catch (const Error& e) {
        throw Error(ErrorCode::Validation, "game " + std::to_string(g.game_index) + ": " + e.what());
      }
    }();
    for (const TurnRecord& t : g.turns) {
      if (s.is_terminal()) return fail(divergence(g, t.turn, "game already over"));
      s.draw_next();
      if (s.is_terminal()) return fail(divergence(g, t.turn, "no playable tile left"));
      if (*s.drawn_tile() != t.kind)
        return fail(divergence(g, t.turn, "drew " + deck->kind(*s.drawn_tile()).id + ", log has " + deck->kind(t.kind).id));
      if (s.current_player() != t.player) return fail(divergence(g, t.turn, "wrong player"));
      if (s.meeples_available(t.player) != t.meeples_before)
        return fail(divergence(g, t.turn, "meeple supply " + std::to_string(s.meeples_available(t.player)) +
                                              ", log has " + std::to_string(t.meeples_before)));
      if (!s.is_legal(t.action)) return fail(divergence(g, t.turn, "illegal action " + to_string(t.action)));
      s.apply(t.action);
      if (s.turn() != t.turn) return fail(divergence(g, t.turn, "turn counter " + std::to_string(s.turn())));
      if (s.fixed_scores() != t.fixed)
        return fail(divergence(g, t.turn, "fixed scores " + pair_text(s.fixed_scores()) + ", log has " + pair_text(t.fixed)));
      if (s.virtual_scores() != t.virtual_scores)
        return fail(divergence(g, t.turn, "virtual scores " + pair_text(s.virtual_scores()) + ", log has " +
                                              pair_text(t.virtual_scores)));
      ++report.turns;
    }
    const int after = static_cast<int>(g.turns.size()) + 1;
    if (g.forfeit()) {
      if (s.is_terminal()) return fail(divergence(g, after, "forfeit logged after the game ended"));
      s.draw_next();
      if (s.is_terminal() || s.current_player() != *g.forfeiter)
        return fail(divergence(g, after, "forfeit does not match the turn order"));
      Outcome expected = *g.forfeiter == Player::P1 ? Outcome::P2Win : Outcome::P1Win;
      if (g.outcome != expected || g.end != EndReason::Forfeit)
        return fail(divergence(g, after, "forfeit result is inconsistent"));
    } else {
      if (!s.is_terminal()) s.draw_next();
      if (!s.is_terminal()) return fail(divergence(g, after, "log ends before the game does"));
      if (s.outcome() != g.outcome) return fail(divergence(g, after, "outcome differs"));
      EndReason end = s.ended_early() ? EndReason::Early : EndReason::Exhausted;
      if (end != g.end) return fail(divergence(g, after, "end reason differs"));
    }
    if (s.virtual_scores() != g.final_scores)
      return fail(divergence(g, after, "final scores " + pair_text(s.virtual_scores()) + ", log has " +
                                           pair_text(g.final_scores)));
    if (s.unplayable_draws() != g.unplayable_draws) return fail(divergence(g, after, "unplayable draw count differs"));
    ++report.games;
  }
  report.message = "OK, " + std::to_string(report.turns) + " turns verified";
  if (report.games != 1) report.message += " in " + std::to_string(report.games) + " games";
  return report;
}

}  // namespace carc
