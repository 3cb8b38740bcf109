// carc: deck inspection, sequence generation, single games, mirrored
// matches and log replay. Talks to the engine only through the C API.
//
// Exit codes: 0 success, 1 validation failure (bad input, failed check,
// replay divergence), 2 runtime failure (I/O, internal errors).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "carcassonne/carcassonne.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_of(carc_status s) {
  switch (s) {
    case CARC_OK: return 0;
    case CARC_ERR_INVALID_ARGUMENT:
    case CARC_ERR_PARSE:
    case CARC_ERR_VALIDATION:
    case CARC_ERR_ILLEGAL_ACTION:
    case CARC_ERR_DIVERGENCE: return kExitValidation;
    default: return kExitRuntime;
  }
}

void check(carc_status s) {
  if (s != CARC_OK) throw Failure{exit_code_of(s), std::string(carc_status_name(s)) + ": " + carc_last_error()};
}

// Owns a string returned by the C API.
struct CString {
  char* p = nullptr;
  ~CString() { carc_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

using DeckPtr = std::unique_ptr<carc_deck, decltype(&carc_deck_free)>;

DeckPtr open_deck(const std::string& path) {
  carc_deck* d = nullptr;
  check(path.empty() ? carc_deck_standard(&d) : carc_deck_load(path.c_str(), &d));
  return DeckPtr(d, &carc_deck_free);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitRuntime, "cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{kExitRuntime, "cannot write " + path.string()};
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- commands

int deck_check(const std::string& deck_path) {
  CString report;
  carc_status s = carc_deck_check(deck_path.empty() ? nullptr : deck_path.c_str(), &report.p);
  if (s == CARC_ERR_IO) check(s);
  std::cout << report.str();
  return exit_code_of(s);
}

int gen_sequences(const std::string& deck_path, int count, std::uint64_t seed, const std::string& out_path) {
  DeckPtr deck = open_deck(deck_path);
  CString text;
  check(carc_sequences_generate(deck.get(), count, seed, &text.p));
  if (out_path.empty()) {
    std::cout << text.str();
  } else {
    write_file(out_path, text.str());
    std::cout << "wrote " << count << " sequences to " << out_path << '\n';
  }
  return 0;
}

struct PlayOptions {
  std::string deck;
  std::string sequences;
  int index = 0;
  std::string agent_a;
  std::string agent_b;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string diagnostics;
};

int play(const PlayOptions& o) {
  DeckPtr deck = open_deck(o.deck);
  std::string seq_text;
  int index = o.index;
  if (o.sequences.empty()) {
    // No sequence file: shuffle one pile from the game seed.
    CString generated;
    check(carc_sequences_generate(deck.get(), 1, o.seed, &generated.p));
    seq_text = generated.str();
    index = 0;
  } else {
    seq_text = read_file(o.sequences);
  }
  CString canon_a, canon_b;
  check(carc_agent_spec_canonical(o.agent_a.c_str(), &canon_a.p));
  check(carc_agent_spec_canonical(o.agent_b.c_str(), &canon_b.p));

  carc_play_result r{};
  CString log, diag;
  check(carc_play(deck.get(), seq_text.c_str(), index, o.agent_a.c_str(), o.agent_b.c_str(), o.seed, &r, &log.p,
                  o.diagnostics.empty() ? nullptr : &diag.p));

  const char* names[2] = {canon_a.p, canon_b.p};
  for (int p = 0; p < 2; ++p) {
    std::cout << "P" << p + 1 << " (" << (p == 0 ? 'A' : 'B') << ") " << names[p] << ": score " << r.final_scores[p]
              << ", mpg " << r.mpg[p] << ", twm " << fixed(r.twm[p], 3) << '\n';
  }
  const char* outcome = r.outcome == CARC_P1_WIN ? "P1 wins" : r.outcome == CARC_P2_WIN ? "P2 wins" : "draw";
  std::cout << "outcome: " << outcome << ", r_P1 = " << r.final_scores[0] - r.final_scores[1] << ", " << r.turns
            << " turns" << (r.forfeit ? ", ended by forfeit" : "") << '\n';

  const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  write_file(dir / "game.log", log.str());
  std::cout << "log: " << (dir / "game.log").string() << '\n';
  if (!o.diagnostics.empty()) write_file(o.diagnostics, diag.str());
  return 0;
}

int match(const std::string& deck_path, const std::string& manifest_path, int workers, const std::string& out_dir) {
  DeckPtr deck = open_deck(deck_path);
  const std::string manifest = read_file(manifest_path);
  const std::string base = fs::path(manifest_path).parent_path().string();
  carc_match_output out{};
  check(carc_match(deck.get(), manifest.c_str(), base.c_str(), workers, &out));
  std::unique_ptr<carc_match_output, decltype(&carc_match_output_free)> guard(&out, &carc_match_output_free);

  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  write_file(dir / "results.csv", out.results_csv);
  write_file(dir / "curves.csv", out.curves_csv);
  write_file(dir / "games.log", out.log);
  write_file(dir / "manifest.json", out.manifest);
  std::cout << out.summary;
  std::cout << '\n' << out.games << " games, " << out.forfeits << " forfeits\n";
  std::cout << "wrote results.csv, curves.csv, games.log, manifest.json to " << dir.string() << '\n';
  return 0;
}

int replay(const std::string& deck_path, const std::string& log_path) {
  DeckPtr deck = open_deck(deck_path);
  const std::string text = read_file(log_path);
  CString report;
  carc_status s = carc_replay(deck.get(), text.c_str(), &report.p);
  if (s == CARC_ERR_DIVERGENCE) {
    std::cout << report.str() << '\n';
    return kExitValidation;
  }
  check(s);
  std::cout << report.str() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-player Carcassonne engine, search agents and match harness"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string deck_path;
  app.add_option("--deck", deck_path, "Deck table file (default: the compiled-in base game)");

  auto* check_cmd = app.add_subcommand("deck-check", "Validate a deck table");

  int count = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-sequences", "Generate seeded tile sequences");
  gen_cmd->add_option("--count", count, "Number of sequences")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_seed, "Generator seed")->required();
  gen_cmd->add_option("--sequences", gen_out, "Output file (default: stdout)");

  PlayOptions play_opts;
  auto* play_cmd = app.add_subcommand("play", "Play one game, A as P1 and B as P2");
  play_cmd->add_option("--agent-a", play_opts.agent_a, "Spec of agent A, e.g. mcts:iterations=300,s=10")->required();
  play_cmd->add_option("--agent-b", play_opts.agent_b, "Spec of agent B")->required();
  play_cmd->add_option("--seed", play_opts.seed, "Agent seed; also shuffles the pile without --sequences")
      ->required();
  play_cmd->add_option("--sequences", play_opts.sequences, "Sequence file");
  play_cmd->add_option("--index", play_opts.index, "Sequence index in the file")->check(CLI::NonNegativeNumber);
  play_cmd->add_option("--out-dir", play_opts.out_dir, "Directory for game.log (default: .)");
  play_cmd->add_option("--diagnostics", play_opts.diagnostics, "Write per-move agent reports to this file");

  std::string manifest;
  int workers = 0;
  std::string match_out;
  auto* match_cmd = app.add_subcommand("match", "Run a mirrored match from a manifest");
  match_cmd->add_option("--manifest", manifest, "Match manifest (JSON)")->required();
  match_cmd->add_option("--workers", workers, "Worker threads (overrides the manifest)")->check(CLI::PositiveNumber);
  match_cmd->add_option("--out-dir", match_out, "Directory for the output files (default: .)");

  std::string log_path;
  auto* replay_cmd = app.add_subcommand("replay", "Verify a game log against the engine");
  replay_cmd->add_option("log", log_path, "Log file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*check_cmd) return deck_check(deck_path);
    if (*gen_cmd) return gen_sequences(deck_path, count, gen_seed, gen_out);
    if (*play_cmd) {
      play_opts.deck = deck_path;
      return play(play_opts);
    }
    if (*match_cmd) return match(deck_path, manifest, workers, match_out);
    if (*replay_cmd) return replay(deck_path, log_path);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
