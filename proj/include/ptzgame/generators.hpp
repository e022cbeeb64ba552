#pragma once

// Random game families used by tests, the acceptance suite and the demos.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ptzgame/game.hpp"
#include "ptzgame/random.hpp"

namespace ptz {

/// Symmetric, connected constraint map on n >= 3 actions: a ring (so every
/// |C(a)| >= 3 counting a itself) plus each extra chord with probability p.
inline ActionSpace::Neighborhoods random_constraints(std::size_t n, double chord_probability, Stream& rng) {
  ActionSpace::Neighborhoods c(n);
  for (std::size_t a = 0; a < n; ++a) {
    c[a].push_back(a);
    c[a].push_back((a + 1) % n);
    c[a].push_back((a + n - 1) % n);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 2; b < n; ++b) {
      if (a == 0 && b == n - 1) continue;
      if (rng.uniform() < chord_probability) {
        c[a].push_back(b);
        c[b].push_back(a);
      }
    }
  return c;
}

inline ActionSpace random_action_space(const std::vector<std::size_t>& counts, double chord_probability, Stream& rng) {
  std::vector<ActionSpace::Neighborhoods> all;
  all.reserve(counts.size());
  for (auto n : counts) all.push_back(random_constraints(n, chord_probability, rng));
  return ActionSpace(std::move(all));
}

/// W drawn uniformly from [0,1) on the extended grid (null participation
/// included), utilities by marginal contribution.
inline GameDefinition random_marginal_game(const ActionSpace& space, Stream& rng) {
  const auto counts = space.counts();
  std::vector<std::size_t> ext(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) ext[i] = counts[i] + 1;
  JointIndexer idx(ext);
  std::vector<double> values(idx.size());
  for (auto& v : values) v = rng.uniform();
  return GameDefinition::from_objective(space, TableObjective(counts, std::move(values)));
}

/// Marginal game whose objective has a single maximizer standing `margin`
/// above every other joint action. Non-maximizer values are uniform in
/// [0, 1 - margin); null entries are uniform in [0, 1).
inline GameDefinition random_separated_game(const ActionSpace& space, double margin, Stream& rng) {
  const auto counts = space.counts();
  std::vector<std::size_t> ext(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) ext[i] = counts[i] + 1;
  JointIndexer idx(ext);
  std::vector<double> values(idx.size());
  JointAction best(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) best[i] = rng.below(counts[i]);
  JointAction a(counts.size(), 0);
  for (std::uint64_t k = 0; k < idx.size(); ++k) {
    idx.decode_into(k, a);
    bool has_null = false;
    for (std::size_t i = 0; i < counts.size(); ++i) has_null |= (a[i] == counts[i]);
    if (has_null)
      values[k] = rng.uniform();
    else if (a == best)
      values[k] = 1.0;
    else
      values[k] = (1.0 - margin) * rng.uniform();
  }
  return GameDefinition::from_objective(space, TableObjective(counts, std::move(values)));
}

}  // namespace ptz
