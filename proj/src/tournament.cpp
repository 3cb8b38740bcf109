#include "carc/tournament.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "carc/errors.hpp"
#include "json.hpp"

namespace carc {

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

int agent_of(const GameRecord& g, Player p) { return (p == Player::P1) == g.a_first ? 0 : 1; }

bool agent_won(const GameRecord& g, int agent) {
  Player role = g.role_of(agent);
  return (g.outcome == Outcome::P1Win && role == Player::P1) || (g.outcome == Outcome::P2Win && role == Player::P2);
}

}  // namespace

std::vector<Sequence> generate_sequences(const Deck& deck, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "generate_sequences: count must be >= 1");
  const Sequence pile = deck.draw_pile();
  std::vector<Sequence> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Sequence s = pile;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    for (std::size_t k = s.size(); k > 1; --k) std::swap(s[k - 1], s[rng.below(k)]);
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_sequences(const Deck& deck, const std::vector<Sequence>& sequences) {
  std::string out = "# carcassonne tile sequences, deck " + format_checksum(deck.checksum()) + "\n";
  for (const Sequence& s : sequences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ' ';
      out += deck.kind(s[i]).id;
    }
    out += '\n';
  }
  return out;
}

std::vector<Sequence> parse_sequences(const Deck& deck, std::string_view text) {
  Sequence pile = deck.draw_pile();
  std::sort(pile.begin(), pile.end());
  std::vector<Sequence> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    Sequence s;
    std::string id;
    while (ls >> id) {
      auto k = deck.find(id);
      if (!k) throw Error(ErrorCode::Parse, "sequence line " + std::to_string(line_no) + ": unknown kind '" + id + "'");
      s.push_back(*k);
    }
    if (s.empty()) continue;
    Sequence sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != pile)
      throw Error(ErrorCode::Validation, "sequence line " + std::to_string(line_no) +
                                             ": not a permutation of the " + std::to_string(pile.size()) + "-tile pile");
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(ErrorCode::Validation, "sequence file holds no sequences");
  return out;
}

void MatchConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "match: " + what); };
  if (games < 2 || games % 2) fail("games must be even and >= 2");
  if (sequences.empty()) fail("no sequences");
  if (workers < 1) fail("workers must be >= 1");
  if (match_id.empty() || match_id.find_first_of(" \t\r\n,") != std::string::npos)
    fail("match_id must be non-empty without spaces or commas");
}

int MatchConfig::sequence_of(int game) const {
  const int half = games / 2;
  return (game % half) % static_cast<int>(sequences.size());
}

MatchRecord run_match(const std::shared_ptr<const Deck>& deck, const MatchConfig& config) {
  config.validate();
  MatchRecord record;
  record.config = config;
  record.games.resize(static_cast<std::size_t>(config.games));
  const int half = config.games / 2;

  auto play = [&](int i) {
    const bool a_first = i < half;
    const int pair = i % half;
    const int seq = config.sequence_of(i);
    const AgentSpec& p1 = a_first ? config.agent_a : config.agent_b;
    const AgentSpec& p2 = a_first ? config.agent_b : config.agent_a;
    GameRecord g = play_game(deck, config.sequences[static_cast<std::size_t>(seq)], p1, p2,
                             mix_seed(config.seed, static_cast<std::uint64_t>(pair)));
    g.match_id = config.match_id;
    g.game_index = i;
    g.sequence_id = seq;
    g.a_first = a_first;
    record.games[static_cast<std::size_t>(i)] = std::move(g);
  };

  const int workers = std::min(config.workers, config.games);
  if (workers <= 1) {
    for (int i = 0; i < config.games; ++i) play(i);
    return record;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < config.games; i = next++) {
        try {
          play(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return record;
}

int meeples_placed(const GameRecord& g, int agent) {
  const Player role = g.role_of(agent);
  int n = 0;
  for (const TurnRecord& t : g.turns) n += t.player == role && t.action.has_meeple();
  return n;
}

int turns_with_meeple(const GameRecord& g, int agent) {
  const Player role = g.role_of(agent);
  int n = 0;
  for (const TurnRecord& t : g.turns) n += t.player == role && t.meeples_before >= 1;
  return n;
}

double twm(const GameRecord& g, int agent) {
  const double denominator = g.role_of(agent) == Player::P1 ? 28.0 : 29.0;
  return turns_with_meeple(g, agent) / denominator;
}

double compute_mpg(const std::vector<GameRecord>& games, int agent) {
  if (games.empty()) return 0.0;
  double sum = 0.0;
  for (const GameRecord& g : games) sum += meeples_placed(g, agent);
  return sum / static_cast<double>(games.size());
}

double compute_twm(const std::vector<GameRecord>& games, int agent) {
  if (games.empty()) return 0.0;
  double sum = 0.0;
  for (const GameRecord& g : games) sum += twm(g, agent);
  return sum / static_cast<double>(games.size());
}

MatchSummary aggregate(const std::vector<GameRecord>& games, const std::string& match_id) {
  MatchSummary out;
  out.match_id = match_id;
  std::vector<const GameRecord*> sorted;
  for (const GameRecord& g : games) sorted.push_back(&g);
  auto key = [](const GameRecord* g) { return std::make_tuple(g->a_first ? 0 : 1, g->sequence_id, g->game_index); };
  std::sort(sorted.begin(), sorted.end(), [&](const GameRecord* a, const GameRecord* b) { return key(a) < key(b); });
  for (const GameRecord* g : sorted) {
    for (int a = 0; a < 2; ++a)
      if (out.agents[a].empty()) out.agents[a] = g->players[idx(g->role_of(a))];
  }

  for (int h = 0; h < 2; ++h) {
    HalfSummary& half = out.halves[h];
    half.first_agent = h;
    std::vector<GameRecord> mine;
    for (const GameRecord* g : sorted)
      if (g->a_first == (h == 0)) mine.push_back(*g);
    for (int a = 0; a < 2; ++a) {
      RoleSummary& r = half.agents[a];
      r.games = static_cast<int>(mine.size());
      double reward = 0.0, score = 0.0;
      for (const GameRecord& g : mine) {
        const int me = idx(g.role_of(a));
        if (g.outcome == Outcome::Draw)
          ++r.draws;
        else if (agent_won(g, a))
          ++r.wins;
        else
          ++r.losses;
        if (g.forfeiter && agent_of(g, *g.forfeiter) == a) ++r.forfeits;
        reward += g.final_scores[me] - g.final_scores[1 - me];
        score += g.final_scores[me];
      }
      if (r.games) {
        r.win_rate = static_cast<double>(r.wins) / r.games;
        r.mean_reward = reward / r.games;
        r.mean_score = score / r.games;
      }
      r.mpg = compute_mpg(mine, a);
      r.twm = compute_twm(mine, a);
    }
    std::size_t length = 0;
    for (const GameRecord& g : mine) length = std::max(length, g.turns.size());
    half.curve.assign(length, {0.0, 0.0});
    for (std::size_t t = 0; t < length; ++t) {
      std::array<double, 2> sum{0.0, 0.0};
      for (const GameRecord& g : mine) {
        const std::array<int, 2>& v = t < g.turns.size() ? g.turns[t].virtual_scores : g.final_scores;
        sum[0] += v[0];
        sum[1] += v[1];
      }
      half.curve[t] = {sum[0] / static_cast<double>(mine.size()), sum[1] / static_cast<double>(mine.size())};
    }
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<GameRecord>& games) {
  out << "match_id,game,sequence_id,first,winner,score_p1,score_p2,r_p1,mpg_a,mpg_b,twm_a,twm_b,"
         "unplayable_draws,end,forfeit\n";
  for (const GameRecord& g : games) {
    std::string winner = g.outcome == Outcome::Draw ? "draw" : agent_won(g, 0) ? "A" : "B";
    out << g.match_id << ',' << g.game_index << ',' << g.sequence_id << ',' << (g.a_first ? 'A' : 'B') << ','
        << winner << ',' << g.final_scores[0] << ',' << g.final_scores[1] << ',' << g.reward_p1() << ','
        << meeples_placed(g, 0) << ',' << meeples_placed(g, 1) << ',' << num(twm(g, 0)) << ',' << num(twm(g, 1))
        << ',' << g.unplayable_draws << ',' << to_string(g.end) << ',' << (g.forfeit() ? 1 : 0) << '\n';
  }
}

void write_curves_csv(std::ostream& out, const MatchSummary& summary) {
  out << "match_id,half,first,turn,mean_virtual_p1,mean_virtual_p2\n";
  for (int h = 0; h < 2; ++h) {
    const HalfSummary& half = summary.halves[h];
    for (std::size_t t = 0; t < half.curve.size(); ++t) {
      out << summary.match_id << ',' << h + 1 << ',' << (half.first_agent == 0 ? 'A' : 'B') << ',' << t + 1 << ','
          << num(half.curve[t][0]) << ',' << num(half.curve[t][1]) << '\n';
    }
  }
}

std::string format_summary(const MatchSummary& summary) {
  std::ostringstream out;
  out << "match " << summary.match_id << "\n  A = " << summary.agents[0] << "\n  B = " << summary.agents[1] << '\n';
  for (int h = 0; h < 2; ++h) {
    const HalfSummary& half = summary.halves[h];
    const int first = half.first_agent;
    const RoleSummary& f = half.agents[first];
    const RoleSummary& s = half.agents[1 - first];
    const char* fname = first == 0 ? "A" : "B";
    const char* sname = first == 0 ? "B" : "A";
    char buf[160];
    out << '\n' << "half " << h + 1 << ": " << fname << " plays first, " << f.games << " games\n";
    std::snprintf(buf, sizeof buf, "  %-14s %12s %12s\n", "criterion", (std::string(fname) + " (1st)").c_str(),
                  (std::string(sname) + " (2nd)").c_str());
    out << buf;
    auto row = [&](const char* name, const std::string& a, const std::string& b) {
      std::snprintf(buf, sizeof buf, "  %-14s %12s %12s\n", name, a.c_str(), b.c_str());
      out << buf;
    };
    row("Win rate (%)", fixed2(100.0 * f.win_rate), fixed2(100.0 * s.win_rate));
    row("Draws (%)", fixed2(f.games ? 100.0 * f.draws / f.games : 0.0), fixed2(s.games ? 100.0 * s.draws / s.games : 0.0));
    row("mean r", fixed2(f.mean_reward), fixed2(s.mean_reward));
    row("mean v", fixed2(f.mean_score), fixed2(s.mean_score));
    row("mpg", fixed2(f.mpg), fixed2(s.mpg));
    row("twm", fixed2(f.twm), fixed2(s.twm));
    row("Forfeits", std::to_string(f.forfeits), std::to_string(s.forfeits));
  }
  return out.str();
}

Manifest parse_manifest(std::string_view json_text, const Deck& deck, const std::string& base_dir) {
  auto fail = [](const std::string& what) -> void { throw Error(ErrorCode::Validation, "manifest: " + what); };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("manifest: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("expected a JSON object");
  static const char* known[] = {"match_id", "games", "agent_a", "agent_b", "seed",
                                "workers", "sequences", "sequence_count", "sequence_seed"};
  for (const auto& [key, value] : j.items())
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) fail("unknown key '" + key + "'");

  Manifest m;
  try {
    if (j.contains("match_id")) m.config.match_id = j.at("match_id").get<std::string>();
    if (!j.contains("games")) fail("missing 'games'");
    m.config.games = j.at("games").get<int>();
    for (const char* key : {"agent_a", "agent_b"}) {
      if (!j.contains(key)) fail(std::string("missing '") + key + "'");
      const auto& v = j.at(key);
      AgentSpec spec = parse_agent_spec(v.is_string() ? v.get<std::string>() : v.dump());
      (std::string(key) == "agent_a" ? m.config.agent_a : m.config.agent_b) = spec;
    }
    if (!j.contains("seed")) fail("missing 'seed'");
    m.config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) m.config.workers = j.at("workers").get<int>();
    const bool has_file = j.contains("sequences");
    const bool has_count = j.contains("sequence_count");
    if (has_file == has_count) fail("give exactly one of 'sequences' and 'sequence_count'");
    if (has_file) {
      std::filesystem::path p = j.at("sequences").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      m.sequences_path = p.string();
      std::ifstream in(p);
      if (!in) throw Error(ErrorCode::Io, "manifest: cannot read sequence file " + p.string());
      std::stringstream buf;
      buf << in.rdbuf();
      m.config.sequences = parse_sequences(deck, buf.str());
    } else {
      m.sequence_count = j.at("sequence_count").get<int>();
      if (!j.contains("sequence_seed")) fail("'sequence_count' needs 'sequence_seed'");
      m.sequence_seed = j.at("sequence_seed").get<std::uint64_t>();
      m.config.sequences = generate_sequences(deck, m.sequence_count, m.sequence_seed);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("bad value: ") + e.what());
  }
  m.config.validate();
  return m;
}

std::string manifest_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["match_id"] = m.config.match_id;
  j["games"] = m.config.games;
  j["agent_a"] = m.config.agent_a.to_string();
  j["agent_b"] = m.config.agent_b.to_string();
  j["seed"] = m.config.seed;
  j["workers"] = m.config.workers;
  if (!m.sequences_path.empty()) {
    j["sequences"] = m.sequences_path;
  } else {
    j["sequence_count"] = m.sequence_count;
    j["sequence_seed"] = m.sequence_seed;
  }
  return j.dump(2) + "\n";
}

}  // namespace carc
