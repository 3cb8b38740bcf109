#ifndef CARCASSONNE_CARCASSONNE_H
#define CARCASSONNE_CARCASSONNE_H

/*
 * C interface to the two-player Carcassonne engine, search agents and match
 * harness. Handles are opaque and owned by the caller; every function that
 * can fail returns a carc_status, and carc_last_error() describes the most
 * recent failure on the calling thread. Strings returned through char**
 * out-parameters are heap allocated and released with carc_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CARC_API __declspec(dllexport)
#else
#define CARC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum carc_status {
  CARC_OK = 0,
  CARC_ERR_INVALID_ARGUMENT = 1,
  CARC_ERR_PARSE = 2,
  CARC_ERR_VALIDATION = 3,
  CARC_ERR_ILLEGAL_ACTION = 4,
  CARC_ERR_EMPTY_STACK = 5,
  CARC_ERR_NOT_TERMINAL = 6,
  CARC_ERR_UNVISITED_CHILD = 7,
  CARC_ERR_NO_LEGAL_ACTIONS = 8,
  CARC_ERR_AGENT_FAILURE = 9,
  CARC_ERR_IO = 10,
  CARC_ERR_DIVERGENCE = 11,
  CARC_ERR_INTERNAL = 12
} carc_status;

typedef enum carc_outcome { CARC_P1_WIN = 0, CARC_P2_WIN = 1, CARC_DRAW = 2 } carc_outcome;

typedef struct carc_deck carc_deck;
typedef struct carc_game carc_game;
typedef struct carc_agent carc_agent;

/* meeple is a segment index of the placed tile kind, or -1 for none. */
typedef struct carc_action {
  int x;
  int y;
  int rotation;
  int meeple;
} carc_action;

CARC_API const char* carc_version(void);
CARC_API const char* carc_status_name(carc_status status);
/* Message of the last failure on this thread; "" after a success. */
CARC_API const char* carc_last_error(void);
CARC_API void carc_string_free(char* s);

/* ---- decks ---- */

/* The compiled-in base-game deck. */
CARC_API carc_status carc_deck_standard(carc_deck** out);
/* Strict load: grammar, tile invariants, 72 tiles, one start tile, checksum. */
CARC_API carc_status carc_deck_load(const char* path, carc_deck** out);
CARC_API void carc_deck_free(carc_deck* deck);
CARC_API carc_status carc_deck_info(const carc_deck* deck, int* kinds, int* tiles, uint64_t* checksum);

/*
 * Checks a deck file and writes a report: "72 tiles, 24 kinds, OK" and the
 * checksum line on success, otherwise one line per violated invariant.
 * Returns CARC_ERR_PARSE or CARC_ERR_VALIDATION when the deck is bad; the
 * report is written in every case except CARC_ERR_IO. A NULL path checks
 * the compiled-in deck.
 */
CARC_API carc_status carc_deck_check(const char* path, char** report);

/* ---- sequences ---- */

/* `count` shuffled draw piles, one line each, deterministic in `seed`. */
CARC_API carc_status carc_sequences_generate(const carc_deck* deck, int count, uint64_t seed, char** text);
/* Number of sequences in a sequence file's text. */
CARC_API carc_status carc_sequences_count(const carc_deck* deck, const char* text, int* count);

/* ---- games ---- */

/* A fresh game over sequence `index` of `sequence_text`. */
CARC_API carc_status carc_game_new(const carc_deck* deck, const char* sequence_text, int index, carc_game** out);
CARC_API carc_status carc_game_clone(const carc_game* game, carc_game** out);
CARC_API void carc_game_free(carc_game* game);
CARC_API int carc_game_is_terminal(const carc_game* game);
/* 1 for P1, 2 for P2. */
CARC_API int carc_game_current_player(const carc_game* game);
CARC_API int carc_game_turn(const carc_game* game);
/* Draws the next tile; sets *drawn to 0 when the game ended instead. */
CARC_API carc_status carc_game_draw(carc_game* game, int* drawn);
/* Kind id of the drawn tile, or NULL when no tile is drawn. */
CARC_API const char* carc_game_drawn_kind(const carc_game* game);
/* Copies up to `capacity` legal actions; *count receives the total. */
CARC_API carc_status carc_game_legal_actions(const carc_game* game, carc_action* actions, size_t capacity,
                                             size_t* count);
CARC_API carc_status carc_game_apply(carc_game* game, const carc_action* action);
CARC_API carc_status carc_game_scores(const carc_game* game, int fixed[2], int virtual_scores[2],
                                      int meeples[2]);
/* Virtual score of P1 minus P2. */
CARC_API int carc_game_reward_p1(const carc_game* game);

/* ---- agents ---- */

/* spec is "type:key=value,..." or a JSON object; stream separates games. */
CARC_API carc_status carc_agent_new(const char* spec, uint64_t stream, carc_agent** out);
CARC_API void carc_agent_free(carc_agent* agent);
CARC_API carc_status carc_agent_choose(carc_agent* agent, const carc_game* game, carc_action* action);
/* Canonical form of a spec string. */
CARC_API carc_status carc_agent_spec_canonical(const char* spec, char** canonical);

/* ---- whole games, matches, replays ---- */

typedef struct carc_play_result {
  int final_scores[2];
  carc_outcome outcome;
  int turns;
  int forfeit;          /* 1 when a player forfeited */
  int mpg[2];           /* meeples placed by P1, P2 */
  double twm[2];        /* turns-with-meeple ratio of P1, P2 */
} carc_play_result;

/*
 * Plays sequence `index` of `sequence_text` with P1 = spec_p1 and P2 =
 * spec_p2. `log` receives the replayable game log, `diagnostics` (optional)
 * every agent report.
 */
CARC_API carc_status carc_play(const carc_deck* deck, const char* sequence_text, int index, const char* spec_p1,
                               const char* spec_p2, uint64_t seed, carc_play_result* result, char** log,
                               char** diagnostics);

typedef struct carc_match_output {
  char* results_csv;
  char* curves_csv;
  char* log;
  char* summary;   /* aggregate table */
  char* manifest;  /* the resolved manifest as JSON */
  int games;
  int forfeits;
} carc_match_output;

/*
 * Runs the mirrored match described by a JSON manifest. Relative sequence
 * paths resolve against `base_dir`. `workers` > 0 overrides the manifest.
 * Release the output with carc_match_output_free.
 */
CARC_API carc_status carc_match(const carc_deck* deck, const char* manifest_json, const char* base_dir, int workers,
                                carc_match_output* out);
CARC_API void carc_match_output_free(carc_match_output* out);

/*
 * Re-applies every game of a log and compares all logged scores. `report`
 * is "OK, N turns verified" or the first divergence, which returns
 * CARC_ERR_DIVERGENCE.
 */
CARC_API carc_status carc_replay(const carc_deck* deck, const char* log_text, char** report);

#ifdef __cplusplus
}
#endif

#endif
