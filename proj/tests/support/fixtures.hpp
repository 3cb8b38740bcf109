#pragma once

#include <string_view>
#include <vector>

#include "carc/game_state.hpp"
#include "carc/rng.hpp"

namespace carc::testing_support {

inline KindId kind_id(std::string_view id) { return *standard_deck()->find(id); }

inline std::vector<KindId> kinds(std::initializer_list<std::string_view> ids) {
  std::vector<KindId> out;
  for (auto id : ids) out.push_back(kind_id(id));
  return out;
}

inline GameState game_with(std::initializer_list<std::string_view> ids, const GameSetup& setup = {}) {
  auto stack = kinds(ids);
  return GameState::new_game(standard_deck(), stack, setup);
}

inline Action at(int x, int y, int rot, int meeple = -1) {
  return Action{Position{static_cast<std::int8_t>(x), static_cast<std::int8_t>(y)},
                static_cast<std::uint8_t>(rot), static_cast<std::int8_t>(meeple)};
}

// Fisher-Yates over the 71-tile draw pile with the project RNG.
inline std::vector<KindId> shuffled_pile(std::uint64_t seed) {
  auto pile = standard_deck()->draw_pile();
  Rng rng(seed);
  for (std::size_t i = pile.size(); i > 1; --i) std::swap(pile[i - 1], pile[rng.below(i)]);
  return pile;
}

// Plays a random-agent game, calling visit(state) after every change.
template <typename Visit>
GameState random_game(std::uint64_t seed, Visit&& visit, std::vector<Action>* log = nullptr) {
  auto pile = shuffled_pile(seed);
  GameState s = GameState::new_game(standard_deck(), pile);
  Rng rng(mix_seed(seed, 1));
  std::vector<Placement> scratch;
  visit(s);
  while (!s.is_terminal()) {
    s.draw_next();
    if (s.is_terminal()) break;
    visit(s);
    Action a = s.random_action(rng, scratch);
    if (log) log->push_back(a);
    s.apply(a);
    visit(s);
  }
  return s;
}

// Figure-style opening: the start tile, a straight road east of it, and a
// one-edge city north of it that closes the start tile's city.
inline GameState fig1_state(std::initializer_list<std::string_view> rest = {}) {
  std::vector<KindId> stack = kinds({"U", "E"});
  for (auto id : rest) stack.push_back(kind_id(id));
  GameState s = GameState::new_game(standard_deck(), stack);
  s.draw_next();
  s.apply(at(1, 0, 1));
  s.draw_next();
  s.apply(at(0, 1, 2));
  return s;
}

}  // namespace carc::testing_support
