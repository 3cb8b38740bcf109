#include <gtest/gtest.h>

#include "carc/agents.hpp"
#include "carc/errors.hpp"
#include "support/fixtures.hpp"

using namespace carc;
using namespace carc::testing_support;

TEST(AgentSpec, DefaultsPerType) {
  AgentSpec r = parse_agent_spec("random");
  EXPECT_EQ(r.type, AgentType::Random);
  EXPECT_EQ(r.seed, 0u);

  AgentSpec m = parse_agent_spec("mcts");
  EXPECT_EQ(m.type, AgentType::Mcts);
  EXPECT_FALSE(m.mcts.rave);
  EXPECT_EQ(m.mcts.exploration, 3.0);

  AgentSpec v = parse_agent_spec("mcts-rave");
  EXPECT_TRUE(v.mcts.rave);
  EXPECT_EQ(v.mcts.rave_bias, 10.0);

  AgentSpec s = parse_agent_spec("star");
  EXPECT_EQ(s.star.probing, 5);
  EXPECT_EQ(s.star.lower, -100.0);
  EXPECT_EQ(s.star.upper, 100.0);
  EXPECT_EQ(s.star.max_depth, 3);
}

TEST(AgentSpec, KeyValueForm) {
  AgentSpec m = parse_agent_spec("mcts-rave:C=0.5,s=10,iterations=300,b=2,amaf=0,seed=7");
  EXPECT_EQ(m.mcts.exploration, 0.5);
  EXPECT_EQ(m.mcts.simulations, 10);
  EXPECT_EQ(m.mcts.iterations, 300);
  EXPECT_EQ(m.mcts.rave_bias, 2.0);
  EXPECT_FALSE(m.mcts.amaf_updates);
  EXPECT_EQ(m.seed, 7u);

  AgentSpec s = parse_agent_spec("star:f=0,L=-50,U=60,d_max=2");
  EXPECT_EQ(s.star.probing, 0);
  EXPECT_EQ(s.star.lower, -50.0);
  EXPECT_EQ(s.star.upper, 60.0);
  EXPECT_EQ(s.star.max_depth, 2);
}

TEST(AgentSpec, JsonForm) {
  AgentSpec a = parse_agent_spec(R"({"type": "mcts", "C": 1.5, "s": 4, "iterations": 20, "seed": 3})");
  AgentSpec b = parse_agent_spec("mcts:C=1.5,s=4,iterations=20,seed=3");
  EXPECT_EQ(a.to_string(), b.to_string());
  AgentSpec c = parse_agent_spec(R"({"type": "mcts-rave", "amaf": false})");
  EXPECT_FALSE(c.mcts.amaf_updates);
}

TEST(AgentSpec, CanonicalFormRoundTrips) {
  for (const char* text : {"random:seed=4", "mcts:C=3,s=10,iterations=300,seed=0",
                           "mcts-rave:C=0.25,s=1,iterations=9,b=0.5,amaf=1,seed=2",
                           "star:f=3,L=-10.5,U=12,d_max=4,seed=1"}) {
    AgentSpec spec = parse_agent_spec(text);
    EXPECT_EQ(spec.to_string(), text);
    EXPECT_EQ(parse_agent_spec(spec.to_string()).to_string(), text);
  }
}

TEST(AgentSpec, RejectsBadInput) {
  for (const char* text : {"", "alphabeta", "mcts:b=2", "random:C=1", "star:s=3", "mcts:C=1,C=2", "mcts:C",
                           "mcts:s=0", "mcts:s=two", "star:L=5,U=5", "star:d_max=0", "mcts-rave:amaf=maybe",
                           "{\"C\": 1}", "{not json", "mcts:seed=-1"}) {
    try {
      parse_agent_spec(text);
      ADD_FAILURE() << "accepted '" << text << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidArgument) << text;
    }
  }
}

TEST(Agents, EveryAgentAnswersLegally) {
  for (const char* text : {"random", "mcts:s=2,iterations=30", "mcts-rave:s=2,iterations=30", "star:d_max=1"}) {
    auto agent = make_agent(parse_agent_spec(text), 5);
    int moves = 0;
    random_game(17, [&](const GameState& s) {
      if (moves >= 6 || !s.drawn_tile()) return;
      ++moves;
      EXPECT_TRUE(s.is_legal(agent->choose(s))) << text;
    });
  }
}

TEST(Agents, SameSpecAndStreamGiveTheSameMoves) {
  GameState s = GameState::new_game(standard_deck(), shuffled_pile(8));
  s.draw_next();
  for (const char* text : {"random:seed=1", "mcts:s=2,iterations=40,seed=1"}) {
    AgentSpec spec = parse_agent_spec(text);
    EXPECT_EQ(make_agent(spec, 3)->choose(s), make_agent(spec, 3)->choose(s)) << text;
  }
}

TEST(Agents, RandomStreamsDiffer) {
  GameState s = GameState::new_game(standard_deck(), shuffled_pile(8));
  s.draw_next();
  AgentSpec spec = parse_agent_spec("random");
  std::set<Action> seen;
  for (std::uint64_t stream = 0; stream < 20; ++stream) seen.insert(make_agent(spec, stream)->choose(s));
  EXPECT_GT(seen.size(), 1u);
}

TEST(Agents, DiagnosticsDescribeTheLastDecision) {
  GameState s = GameState::new_game(standard_deck(), shuffled_pile(9));
  s.draw_next();
  auto mcts = make_agent(parse_agent_spec("mcts:s=1,iterations=20"), 0);
  EXPECT_TRUE(mcts->diagnostics().empty());
  mcts->choose(s);
  EXPECT_NE(mcts->diagnostics().find("rollouts 20"), std::string::npos);
  auto star = make_agent(parse_agent_spec("star:d_max=1"), 0);
  star->choose(s);
  EXPECT_NE(star->diagnostics().find("expansions"), std::string::npos);
}
