#pragma once

// Text serialization of tabulated games as JSON:
//   {"actions": [3, 3],
//    "constraints": [[[0,1,2], ...], ...],   optional, complete when absent
//    "objective": [...]}                     W over the extended grid, or
//    "utilities": [[...], ...], "potential": [...]   per joint action

#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptzgame/game.hpp"

namespace ptz {

inline ActionSpace action_space_from_json(const nlohmann::json& j) {
  const auto counts = j.at("actions").get<std::vector<std::size_t>>();
  if (!j.contains("constraints")) return ActionSpace::complete(counts);
  auto c = j.at("constraints").get<std::vector<ActionSpace::Neighborhoods>>();
  if (c.size() != counts.size()) throw std::invalid_argument("constraints list one entry per player");
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (c[i].size() != counts[i])
      throw std::invalid_argument("player " + std::to_string(i) + " constraint map has the wrong number of actions");
  return ActionSpace(std::move(c));
}

inline nlohmann::json action_space_to_json(const ActionSpace& space) {
  nlohmann::json j;
  j["actions"] = space.counts();
  j["constraints"] = nlohmann::json::array();
  for (std::size_t i = 0; i < space.players(); ++i) j["constraints"].push_back(space.neighborhoods(i));
  return j;
}

/// Reads either an objective-table game (utilities by marginal contribution)
/// or an explicit utility table.
inline TabularGame load_game(const nlohmann::json& j) {
  auto space = action_space_from_json(j);
  if (j.contains("objective")) {
    auto values = j.at("objective").get<std::vector<double>>();
    return tabulate(GameDefinition::from_objective(space, TableObjective(space.counts(), std::move(values))));
  }
  TabularGame t;
  t.space = space;
  t.indexer = space.indexer();
  t.utility = j.at("utilities").get<std::vector<std::vector<double>>>();
  if (t.utility.size() != space.players()) throw std::invalid_argument("utilities list one table per player");
  for (const auto& row : t.utility)
    if (row.size() != t.indexer.size()) throw std::invalid_argument("utility table has the wrong size");
  if (j.contains("potential")) {
    t.potential = j.at("potential").get<std::vector<double>>();
    if (t.potential.size() != t.indexer.size()) throw std::invalid_argument("potential table has the wrong size");
  }
  return t;
}

inline TabularGame load_game(std::istream& is) { return load_game(nlohmann::json::parse(is)); }

inline nlohmann::json game_to_json(const TabularGame& g) {
  auto j = action_space_to_json(g.space);
  j["utilities"] = g.utility;
  if (g.has_potential()) j["potential"] = g.potential;
  return j;
}

inline nlohmann::json game_to_json(const ActionSpace& space, const TableObjective& w) {
  auto j = action_space_to_json(space);
  j["objective"] = w.values();
  return j;
}

inline void save_game(std::ostream& os, const TabularGame& g) { os << game_to_json(g).dump(1) << "\n"; }

}  // namespace ptz
