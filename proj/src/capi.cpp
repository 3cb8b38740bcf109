#include "carcassonne/carcassonne.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "carc/agents.hpp"
#include "carc/deck.hpp"
#include "carc/errors.hpp"
#include "carc/game_log.hpp"
#include "carc/tournament.hpp"

struct carc_deck {
  std::shared_ptr<const carc::Deck> deck;
};

struct carc_game {
  carc::GameState state;
};

struct carc_agent {
  std::unique_ptr<carc::Agent> agent;
};

namespace {

thread_local std::string last_error;

carc_status status_of(carc::ErrorCode code) {
  switch (code) {
    case carc::ErrorCode::InvalidArgument: return CARC_ERR_INVALID_ARGUMENT;
    case carc::ErrorCode::Parse: return CARC_ERR_PARSE;
    case carc::ErrorCode::Validation: return CARC_ERR_VALIDATION;
    case carc::ErrorCode::IllegalAction: return CARC_ERR_ILLEGAL_ACTION;
    case carc::ErrorCode::EmptyStack: return CARC_ERR_EMPTY_STACK;
    case carc::ErrorCode::NotTerminal: return CARC_ERR_NOT_TERMINAL;
    case carc::ErrorCode::UnvisitedChild: return CARC_ERR_UNVISITED_CHILD;
    case carc::ErrorCode::NoLegalActions: return CARC_ERR_NO_LEGAL_ACTIONS;
    case carc::ErrorCode::AgentFailure: return CARC_ERR_AGENT_FAILURE;
    case carc::ErrorCode::Io: return CARC_ERR_IO;
    case carc::ErrorCode::Divergence: return CARC_ERR_DIVERGENCE;
  }
  return CARC_ERR_INTERNAL;
}

carc_status fail(carc_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into a status and last_error.
template <typename F>
carc_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const carc::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CARC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CARC_ERR_INTERNAL, e.what());
  }
}

#define CARC_REQUIRE(cond) \
  if (!(cond)) return fail(CARC_ERR_INVALID_ARGUMENT, "null or invalid argument: " #cond)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

carc_action to_c(const carc::Action& a) { return carc_action{a.pos.x, a.pos.y, a.rotation, a.meeple}; }

carc::Action from_c(const carc_action& a) {
  auto in_range = [](int v, int lo, int hi) { return v >= lo && v <= hi; };
  if (!in_range(a.x, -127, 127) || !in_range(a.y, -127, 127) || !in_range(a.rotation, 0, 3) ||
      !in_range(a.meeple, -1, carc::kMaxSegmentsPerTile - 1))
    throw carc::Error(carc::ErrorCode::IllegalAction, "action field out of range");
  return carc::Action{carc::Position{static_cast<std::int8_t>(a.x), static_cast<std::int8_t>(a.y)},
                      static_cast<std::uint8_t>(a.rotation), static_cast<std::int8_t>(a.meeple)};
}

carc::Sequence pick_sequence(const carc::Deck& deck, const char* text, int index) {
  auto sequences = carc::parse_sequences(deck, text);
  if (index < 0 || index >= static_cast<int>(sequences.size()))
    throw carc::Error(carc::ErrorCode::InvalidArgument, "sequence index " + std::to_string(index) + " out of range (" +
                                                            std::to_string(sequences.size()) + " sequences)");
  return sequences[static_cast<std::size_t>(index)];
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw carc::Error(carc::ErrorCode::Io, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

extern "C" {

const char* carc_version(void) { return "1.0.0"; }

const char* carc_status_name(carc_status status) {
  switch (status) {
    case CARC_OK: return "ok";
    case CARC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CARC_ERR_PARSE: return "parse error";
    case CARC_ERR_VALIDATION: return "validation error";
    case CARC_ERR_ILLEGAL_ACTION: return "illegal action";
    case CARC_ERR_EMPTY_STACK: return "empty stack";
    case CARC_ERR_NOT_TERMINAL: return "not terminal";
    case CARC_ERR_UNVISITED_CHILD: return "unvisited child";
    case CARC_ERR_NO_LEGAL_ACTIONS: return "no legal actions";
    case CARC_ERR_AGENT_FAILURE: return "agent failure";
    case CARC_ERR_IO: return "i/o error";
    case CARC_ERR_DIVERGENCE: return "divergence";
    case CARC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* carc_last_error(void) { return last_error.c_str(); }

void carc_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------- decks

carc_status carc_deck_standard(carc_deck** out) {
  return guarded([&] {
    CARC_REQUIRE(out);
    *out = new carc_deck{carc::standard_deck()};
    return CARC_OK;
  });
}

carc_status carc_deck_load(const char* path, carc_deck** out) {
  return guarded([&] {
    CARC_REQUIRE(path && out);
    *out = new carc_deck{carc::load_deck(path)};
    return CARC_OK;
  });
}

void carc_deck_free(carc_deck* deck) { delete deck; }

carc_status carc_deck_info(const carc_deck* deck, int* kinds, int* tiles, uint64_t* checksum) {
  return guarded([&] {
    CARC_REQUIRE(deck);
    if (kinds) *kinds = static_cast<int>(deck->deck->kind_count());
    if (tiles) *tiles = deck->deck->total_tiles();
    if (checksum) *checksum = deck->deck->checksum();
    return CARC_OK;
  });
}

carc_status carc_deck_check(const char* path, char** report) {
  return guarded([&] {
    CARC_REQUIRE(report);
    *report = nullptr;
    const std::string text = path ? read_file(path) : std::string(carc::standard_deck_text());
    carc::DeckTable table;
    try {
      table = carc::parse_deck_table(text);
    } catch (const carc::Error& e) {
      *report = dup_string(std::string(e.what()) + "\n");
      return fail(status_of(e.code()), e.what());
    }
    int tiles = 0;
    for (const auto& k : table.kinds) tiles += k.deck_count;
    std::ostringstream out;
    const auto problems = carc::deck_problems(table);
    out << tiles << " tiles, " << table.kinds.size() << " kinds, " << (problems.empty() ? "OK" : "FAILED") << '\n';
    out << "checksum " << carc::format_checksum(table.computed_checksum) << '\n';
    for (const auto& p : problems) out << "  " << p << '\n';
    *report = dup_string(out.str());
    if (!problems.empty()) return fail(CARC_ERR_VALIDATION, problems.front());
    return CARC_OK;
  });
}

// ---------------------------------------------------------------- sequences

carc_status carc_sequences_generate(const carc_deck* deck, int count, uint64_t seed, char** text) {
  return guarded([&] {
    CARC_REQUIRE(deck && text);
    *text = dup_string(carc::format_sequences(*deck->deck, carc::generate_sequences(*deck->deck, count, seed)));
    return CARC_OK;
  });
}

carc_status carc_sequences_count(const carc_deck* deck, const char* text, int* count) {
  return guarded([&] {
    CARC_REQUIRE(deck && text && count);
    *count = static_cast<int>(carc::parse_sequences(*deck->deck, text).size());
    return CARC_OK;
  });
}

// ---------------------------------------------------------------- games

carc_status carc_game_new(const carc_deck* deck, const char* sequence_text, int index, carc_game** out) {
  return guarded([&] {
    CARC_REQUIRE(deck && sequence_text && out);
    auto seq = pick_sequence(*deck->deck, sequence_text, index);
    *out = new carc_game{carc::GameState::new_game(deck->deck, seq)};
    return CARC_OK;
  });
}

carc_status carc_game_clone(const carc_game* game, carc_game** out) {
  return guarded([&] {
    CARC_REQUIRE(game && out);
    *out = new carc_game{game->state};
    return CARC_OK;
  });
}

void carc_game_free(carc_game* game) { delete game; }

int carc_game_is_terminal(const carc_game* game) { return game && game->state.is_terminal() ? 1 : 0; }

int carc_game_current_player(const carc_game* game) {
  if (!game) return 0;
  return game->state.current_player() == carc::Player::P1 ? 1 : 2;
}

int carc_game_turn(const carc_game* game) { return game ? game->state.turn() : 0; }

carc_status carc_game_draw(carc_game* game, int* drawn) {
  return guarded([&] {
    CARC_REQUIRE(game);
    game->state.draw_next();
    if (drawn) *drawn = game->state.drawn_tile() ? 1 : 0;
    return CARC_OK;
  });
}

const char* carc_game_drawn_kind(const carc_game* game) {
  if (!game) return nullptr;
  auto k = game->state.drawn_tile();
  return k ? game->state.deck().kind(*k).id.c_str() : nullptr;
}

carc_status carc_game_legal_actions(const carc_game* game, carc_action* actions, size_t capacity, size_t* count) {
  return guarded([&] {
    CARC_REQUIRE(game && count && (actions || capacity == 0));
    auto legal = game->state.legal_actions();
    *count = legal.size();
    for (std::size_t i = 0; i < legal.size() && i < capacity; ++i) actions[i] = to_c(legal[i]);
    return CARC_OK;
  });
}

carc_status carc_game_apply(carc_game* game, const carc_action* action) {
  return guarded([&] {
    CARC_REQUIRE(game && action);
    game->state.apply(from_c(*action));
    return CARC_OK;
  });
}

carc_status carc_game_scores(const carc_game* game, int fixed[2], int virtual_scores[2], int meeples[2]) {
  return guarded([&] {
    CARC_REQUIRE(game);
    const auto& s = game->state;
    if (fixed) {
      fixed[0] = s.fixed_score(carc::Player::P1);
      fixed[1] = s.fixed_score(carc::Player::P2);
    }
    if (virtual_scores) {
      auto v = s.virtual_scores();
      virtual_scores[0] = v[0];
      virtual_scores[1] = v[1];
    }
    if (meeples) {
      meeples[0] = s.meeples_available(carc::Player::P1);
      meeples[1] = s.meeples_available(carc::Player::P2);
    }
    return CARC_OK;
  });
}

int carc_game_reward_p1(const carc_game* game) { return game ? game->state.reward(carc::Player::P1) : 0; }

// ---------------------------------------------------------------- agents

carc_status carc_agent_new(const char* spec, uint64_t stream, carc_agent** out) {
  return guarded([&] {
    CARC_REQUIRE(spec && out);
    *out = new carc_agent{carc::make_agent(carc::parse_agent_spec(spec), stream)};
    return CARC_OK;
  });
}

void carc_agent_free(carc_agent* agent) { delete agent; }

carc_status carc_agent_choose(carc_agent* agent, const carc_game* game, carc_action* action) {
  return guarded([&] {
    CARC_REQUIRE(agent && game && action);
    if (!game->state.drawn_tile()) return fail(CARC_ERR_NO_LEGAL_ACTIONS, "no drawn tile");
    *action = to_c(agent->agent->choose(game->state));
    return CARC_OK;
  });
}

carc_status carc_agent_spec_canonical(const char* spec, char** canonical) {
  return guarded([&] {
    CARC_REQUIRE(spec && canonical);
    *canonical = dup_string(carc::parse_agent_spec(spec).to_string());
    return CARC_OK;
  });
}

// ---------------------------------------------------------------- commands

carc_status carc_play(const carc_deck* deck, const char* sequence_text, int index, const char* spec_p1,
                      const char* spec_p2, uint64_t seed, carc_play_result* result, char** log, char** diagnostics) {
  return guarded([&] {
    CARC_REQUIRE(deck && sequence_text && spec_p1 && spec_p2);
    if (log) *log = nullptr;
    if (diagnostics) *diagnostics = nullptr;
    auto seq = pick_sequence(*deck->deck, sequence_text, index);
    auto p1 = carc::parse_agent_spec(spec_p1);
    auto p2 = carc::parse_agent_spec(spec_p2);
    std::ostringstream diag;
    carc::GameRecord g = carc::play_game(deck->deck, seq, p1, p2, seed, diagnostics ? &diag : nullptr);
    g.sequence_id = index;
    if (result) {
      result->final_scores[0] = g.final_scores[0];
      result->final_scores[1] = g.final_scores[1];
      result->outcome = static_cast<carc_outcome>(g.outcome);
      result->turns = static_cast<int>(g.turns.size());
      result->forfeit = g.forfeit() ? 1 : 0;
      for (int a = 0; a < 2; ++a) {
        result->mpg[a] = carc::meeples_placed(g, a);
        result->twm[a] = carc::twm(g, a);
      }
    }
    if (log) {
      std::ostringstream out;
      carc::write_log(out, *deck->deck, {g});
      *log = dup_string(out.str());
    }
    if (diagnostics) *diagnostics = dup_string(diag.str());
    return CARC_OK;
  });
}

carc_status carc_match(const carc_deck* deck, const char* manifest_json, const char* base_dir, int workers,
                       carc_match_output* out) {
  return guarded([&] {
    CARC_REQUIRE(deck && manifest_json && out);
    *out = carc_match_output{};
    carc::Manifest m = carc::parse_manifest(manifest_json, *deck->deck, base_dir ? base_dir : "");
    if (workers > 0) m.config.workers = workers;
    carc::MatchRecord record = carc::run_match(deck->deck, m.config);
    carc::MatchSummary summary = carc::aggregate(record.games, m.config.match_id);
    std::ostringstream results, curves, log;
    carc::write_results_csv(results, record.games);
    carc::write_curves_csv(curves, summary);
    carc::write_log(log, *deck->deck, record.games);
    int forfeits = 0;
    for (const auto& g : record.games) forfeits += g.forfeit();
    carc_match_output o{};
    try {
      o.results_csv = dup_string(results.str());
      o.curves_csv = dup_string(curves.str());
      o.log = dup_string(log.str());
      o.summary = dup_string(carc::format_summary(summary));
      o.manifest = dup_string(carc::manifest_json(m));
    } catch (...) {
      carc_match_output_free(&o);
      throw;
    }
    o.games = static_cast<int>(record.games.size());
    o.forfeits = forfeits;
    *out = o;
    return CARC_OK;
  });
}

void carc_match_output_free(carc_match_output* out) {
  if (!out) return;
  std::free(out->results_csv);
  std::free(out->curves_csv);
  std::free(out->log);
  std::free(out->summary);
  std::free(out->manifest);
  *out = carc_match_output{};
}

carc_status carc_replay(const carc_deck* deck, const char* log_text, char** report) {
  return guarded([&] {
    CARC_REQUIRE(deck && log_text && report);
    *report = nullptr;
    std::istringstream in{std::string(log_text)};
    auto games = carc::read_log(in, *deck->deck);
    carc::ReplayReport r = carc::verify_games(deck->deck, games);
    *report = dup_string(r.message);
    if (!r.ok) return fail(CARC_ERR_DIVERGENCE, r.message);
    return CARC_OK;
  });
}

}  // extern "C"
