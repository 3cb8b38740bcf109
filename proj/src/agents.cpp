#include "carc/agents.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <vector>

#include "carc/errors.hpp"
#include "json.hpp"

namespace carc {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, "agent spec: " + what); }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    bad("'" + key + "' needs a number, got '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad("'" + key + "' needs an integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_seed(const std::string& v) {
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad("'seed' needs an unsigned integer, got '" + v + "'");
  return out;
}

int parse_count(const std::string& key, const std::string& v, long long min) {
  long long x = parse_int(key, v);
  if (x < min || x > 1'000'000'000) bad("'" + key + "' out of range: " + v);
  return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  bad("'" + key + "' needs 0/1/true/false, got '" + v + "'");
}

AgentType parse_type(const std::string& t) {
  if (t == "random") return AgentType::Random;
  if (t == "mcts") return AgentType::Mcts;
  if (t == "mcts-rave") return AgentType::MctsRave;
  if (t == "star") return AgentType::Star;
  bad("unknown agent type '" + t + "'");
}

void set_key(AgentSpec& spec, const std::string& key, const std::string& value) {
  if (key == "seed") {
    spec.seed = parse_seed(value);
    return;
  }
  switch (spec.type) {
    case AgentType::Random:
      break;
    case AgentType::Mcts:
    case AgentType::MctsRave:
      if (key == "C") return void(spec.mcts.exploration = parse_double(key, value));
      if (key == "s") return void(spec.mcts.simulations = parse_count(key, value, 1));
      if (key == "iterations") return void(spec.mcts.iterations = parse_count(key, value, 1));
      if (spec.type == AgentType::MctsRave) {
        if (key == "b") return void(spec.mcts.rave_bias = parse_double(key, value));
        if (key == "amaf") return void(spec.mcts.amaf_updates = parse_bool(key, value));
      }
      break;
    case AgentType::Star:
      if (key == "f") return void(spec.star.probing = parse_count(key, value, 0));
      if (key == "L") return void(spec.star.lower = parse_double(key, value));
      if (key == "U") return void(spec.star.upper = parse_double(key, value));
      if (key == "d_max") return void(spec.star.max_depth = parse_count(key, value, 1));
      break;
  }
  bad(std::string("unknown key '") + key + "' for type " + carc::to_string(spec.type));
}

void finish(AgentSpec& spec) {
  spec.mcts.rave = spec.type == AgentType::MctsRave;
  spec.mcts.seed = spec.seed;
  spec.star.seed = spec.seed;
  if (spec.type == AgentType::Mcts || spec.type == AgentType::MctsRave) spec.mcts.validate();
  if (spec.type == AgentType::Star) spec.star.validate();
}

std::string json_value_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  bad("unsupported JSON value " + v.dump());
}

std::uint64_t move_seed(std::uint64_t seed, std::uint64_t stream, int turn) {
  return mix_seed(mix_seed(seed, stream), static_cast<std::uint64_t>(turn));
}

class RandomAgent final : public Agent {
 public:
  RandomAgent(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
  Action choose(const GameState& s) override {
    Rng rng(move_seed(seed_, stream_, s.turn()));
    return s.random_action(rng, scratch_);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::vector<Placement> scratch_;
};

class MctsAgent final : public Agent {
 public:
  MctsAgent(const MctsConfig& config, std::uint64_t stream) : config_(config), stream_(stream) {}
  Action choose(const GameState& s) override {
    MctsConfig c = config_;
    c.seed = move_seed(config_.seed, stream_, s.turn());
    MctsSearch search(c);
    Action a = search.run(s);
    std::ostringstream out;
    out << "mcts turn " << s.turn() << " rollouts " << search.rollouts() << " nodes " << search.tree().size() << '\n';
    out << "  action n mean amaf_n amaf_mean beta\n";
    for (const auto& st : search.root_stats()) {
      out << "  " << carc::to_string(st.action) << ' ' << st.n << ' ' << format_double(st.mean) << ' ' << st.amaf_n
          << ' ' << format_double(st.amaf_mean) << ' ' << format_double(st.beta) << '\n';
    }
    diagnostics_ = out.str();
    return a;
  }
  std::string diagnostics() const override { return diagnostics_; }

 private:
  MctsConfig config_;
  std::uint64_t stream_;
  std::string diagnostics_;
};

class StarAgent final : public Agent {
 public:
  explicit StarAgent(const StarConfig& config) : config_(config) {}
  Action choose(const GameState& s) override {
    StarCounters c;
    double value = 0.0;
    Action a = star_best_action(s, config_, &c, &value);
    std::ostringstream out;
    out << "star turn " << s.turn() << " value " << format_double(value) << " expansions " << c.expansions
        << " leaves " << c.leaves << " clamped " << c.clamped_leaves << " chance_cuts " << c.chance_cuts
        << " probe_cuts " << c.probe_cuts << '\n';
    diagnostics_ = out.str();
    return a;
  }
  std::string diagnostics() const override { return diagnostics_; }

 private:
  StarConfig config_;
  std::string diagnostics_;
};

}  // namespace

const char* to_string(AgentType t) {
  switch (t) {
    case AgentType::Random: return "random";
    case AgentType::Mcts: return "mcts";
    case AgentType::MctsRave: return "mcts-rave";
    case AgentType::Star: return "star";
  }
  return "?";
}

std::string AgentSpec::to_string() const {
  std::string out = carc::to_string(type);
  out += ':';
  switch (type) {
    case AgentType::Random:
      break;
    case AgentType::Mcts:
    case AgentType::MctsRave:
      out += "C=" + format_double(mcts.exploration) + ",s=" + std::to_string(mcts.simulations) +
             ",iterations=" + std::to_string(mcts.iterations) + ',';
      if (type == AgentType::MctsRave)
        out += "b=" + format_double(mcts.rave_bias) + ",amaf=" + (mcts.amaf_updates ? "1" : "0") + ',';
      break;
    case AgentType::Star:
      out += "f=" + std::to_string(star.probing) + ",L=" + format_double(star.lower) +
             ",U=" + format_double(star.upper) + ",d_max=" + std::to_string(star.max_depth) + ',';
      break;
  }
  out += "seed=" + std::to_string(seed);
  return out;
}

AgentSpec parse_agent_spec(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) bad("empty");
  AgentSpec spec;
  std::set<std::string> seen;
  auto add = [&](const std::string& key, const std::string& value) {
    if (!seen.insert(key).second) bad("duplicate key '" + key + "'");
    set_key(spec, key, value);
  };

  if (t.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      bad(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) bad("JSON spec needs a string 'type'");
    spec.type = parse_type(j["type"].get<std::string>());
    for (const auto& [key, value] : j.items())
      if (key != "type") add(key, json_value_text(value));
  } else {
    auto colon = t.find(':');
    spec.type = parse_type(trim(t.substr(0, colon)));
    if (colon != std::string::npos) {
      std::string rest = t.substr(colon + 1);
      std::size_t pos = 0;
      while (pos <= rest.size()) {
        std::size_t comma = rest.find(',', pos);
        std::string item = trim(rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!item.empty()) {
          auto eq = item.find('=');
          if (eq == std::string::npos) bad("expected key=value, got '" + item + "'");
          add(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  }
  finish(spec);
  return spec;
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, std::uint64_t stream) {
  switch (spec.type) {
    case AgentType::Random: return std::make_unique<RandomAgent>(spec.seed, stream);
    case AgentType::Mcts:
    case AgentType::MctsRave: {
      MctsConfig c = spec.mcts;
      c.rave = spec.type == AgentType::MctsRave;
      c.seed = spec.seed;
      c.validate();
      return std::make_unique<MctsAgent>(c, stream);
    }
    case AgentType::Star: {
      spec.star.validate();
      return std::make_unique<StarAgent>(spec.star);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "agent spec: unknown type");
}

}  // namespace carc
