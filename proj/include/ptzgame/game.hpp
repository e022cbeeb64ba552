#pragma once

// Constrained strategic games: action spaces with per-player constraint maps,
// marginal-contribution utilities, potential and Nash checks, and the utility
// scaling that keeps every unilateral payoff change below one half.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ptzgame/error.hpp"
#include "ptzgame/random.hpp"

namespace ptz {

/// Marks a player that takes part in the game without viewing anything.
inline constexpr std::size_t kNullAction = std::numeric_limits<std::size_t>::max();

/// Slack for identities that hold exactly in real arithmetic.
inline constexpr double kIdentityTolerance = 1e-12;

/// Default size guard for exhaustive enumeration of joint actions.
inline constexpr std::uint64_t kJointGuard = 1'000'000;

using JointAction = std::vector<std::size_t>;

/// Mixed-radix encoding of joint actions into dense indices. Player 0 is the
/// most significant digit.
class JointIndexer {
 public:
  JointIndexer() = default;
  explicit JointIndexer(std::vector<std::size_t> radix) : radix_(std::move(radix)) {
    size_ = 1;
    for (auto r : radix_) {
      if (r == 0) {
        size_ = 0;
        break;
      }
      if (size_ > std::numeric_limits<std::uint64_t>::max() / r) {
        size_ = std::numeric_limits<std::uint64_t>::max();
        overflow_ = true;
        break;
      }
      size_ *= r;
    }
  }

  /// Number of joint actions, saturated at uint64 max.
  std::uint64_t size() const noexcept { return size_; }
  bool overflowed() const noexcept { return overflow_; }
  std::size_t digits() const noexcept { return radix_.size(); }
  const std::vector<std::size_t>& radix() const noexcept { return radix_; }

  std::uint64_t index(const JointAction& a) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < radix_.size(); ++i) idx = idx * radix_[i] + a[i];
    return idx;
  }

  void decode_into(std::uint64_t idx, JointAction& out) const {
    out.resize(radix_.size());
    for (std::size_t i = radix_.size(); i-- > 0;) {
      out[i] = static_cast<std::size_t>(idx % radix_[i]);
      idx /= radix_[i];
    }
  }

  JointAction decode(std::uint64_t idx) const {
    JointAction a;
    decode_into(idx, a);
    return a;
  }

  /// Odometer increment; returns false after the last joint action.
  bool next(JointAction& a) const {
    for (std::size_t i = radix_.size(); i-- > 0;) {
      if (++a[i] < radix_[i]) return true;
      a[i] = 0;
    }
    return false;
  }

 private:
  std::vector<std::size_t> radix_;
  std::uint64_t size_ = 0;
  bool overflow_ = false;
};

/// Finite per-player action sets with constraint maps C_i. Each C_i(a) is kept
/// sorted and deduplicated; by convention it contains a itself.
class ActionSpace {
 public:
  using Neighborhoods = std::vector<std::vector<std::size_t>>;

  ActionSpace() = default;

  /// constraints[i][a] lists the actions reachable from a in one round; a
  /// itself is added when missing. No validation happens here; use
  /// validate_action_space.
  explicit ActionSpace(std::vector<Neighborhoods> constraints) : constraints_(std::move(constraints)) {
    for (auto& player : constraints_)
      for (std::size_t a = 0; a < player.size(); ++a) {
        auto& set = player[a];
        set.push_back(a);
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
      }
  }

  /// Every action reachable from every action.
  static ActionSpace complete(const std::vector<std::size_t>& counts) {
    std::vector<Neighborhoods> c(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      std::vector<std::size_t> all(counts[i]);
      for (std::size_t a = 0; a < counts[i]; ++a) all[a] = a;
      c[i].assign(counts[i], all);
    }
    return ActionSpace(std::move(c));
  }

  std::size_t players() const noexcept { return constraints_.size(); }
  std::size_t action_count(std::size_t i) const { return constraints_.at(i).size(); }
  const std::vector<std::size_t>& feasible(std::size_t i, std::size_t a) const { return constraints_.at(i).at(a); }
  const Neighborhoods& neighborhoods(std::size_t i) const { return constraints_.at(i); }

  bool allows(std::size_t i, std::size_t from, std::size_t to) const {
    const auto& set = feasible(i, from);
    return std::binary_search(set.begin(), set.end(), to);
  }

  /// C = max over players and actions of |C_i(a)|.
  std::size_t max_feasible() const {
    std::size_t c = 0;
    for (const auto& player : constraints_)
      for (const auto& set : player) c = std::max(c, set.size());
    return c;
  }

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> out;
    out.reserve(constraints_.size());
    for (const auto& p : constraints_) out.push_back(p.size());
    return out;
  }

  JointIndexer indexer() const { return JointIndexer(counts()); }
  std::uint64_t joint_count() const { return indexer().size(); }

  bool contains(const JointAction& a) const {
    if (a.size() != players()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] >= action_count(i)) return false;
    return true;
  }

  /// a' is reachable from a in one round when every a'_i lies in C_i(a_i).
  bool transition_allowed(const JointAction& from, const JointAction& to) const {
    for (std::size_t i = 0; i < players(); ++i)
      if (!allows(i, from[i], to[i])) return false;
    return true;
  }

 private:
  std::vector<Neighborhoods> constraints_;
};

enum class AssumptionItem { Range, Symmetry, Connectivity, Cardinality };

inline const char* to_string(AssumptionItem item) {
  switch (item) {
    case AssumptionItem::Range: return "range";
    case AssumptionItem::Symmetry: return "symmetry";
    case AssumptionItem::Connectivity: return "connectivity";
    case AssumptionItem::Cardinality: return "cardinality";
  }
  return "?";
}

struct Violation {
  std::size_t player = 0;
  std::vector<std::size_t> actions;
  AssumptionItem item = AssumptionItem::Range;
  std::string message;
};

/// Checks symmetry, connectivity and |C_i(a)| >= 3 for every player and action.
/// Returns every violation; an empty report means the space is valid.
inline std::vector<Violation> validate_action_space(const ActionSpace& space) {
  std::vector<Violation> report;
  auto add = [&](std::size_t i, std::vector<std::size_t> acts, AssumptionItem item, std::string msg) {
    report.push_back({i, std::move(acts), item, std::move(msg)});
  };

  for (std::size_t i = 0; i < space.players(); ++i) {
    const std::size_t n = space.action_count(i);
    if (n == 0) {
      add(i, {}, AssumptionItem::Cardinality, "player " + std::to_string(i) + " has no actions");
      continue;
    }
    bool in_range = true;
    for (std::size_t a = 0; a < n; ++a) {
      for (auto b : space.feasible(i, a)) {
        if (b >= n) {
          in_range = false;
          add(i, {a, b}, AssumptionItem::Range,
              "player " + std::to_string(i) + ": C(" + std::to_string(a) + ") lists unknown action " +
                  std::to_string(b));
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      const auto size = space.feasible(i, a).size();
      if (size < 3)
        add(i, {a}, AssumptionItem::Cardinality,
            "player " + std::to_string(i) + ": |C(" + std::to_string(a) + ")| = " + std::to_string(size) + " < 3");
    }
    if (!in_range) continue;

    for (std::size_t a = 0; a < n; ++a)
      for (auto b : space.feasible(i, a))
        if (!space.allows(i, b, a))
          add(i, {a, b}, AssumptionItem::Symmetry,
              "player " + std::to_string(i) + ": " + std::to_string(b) + " in C(" + std::to_string(a) +
                  ") but " + std::to_string(a) + " not in C(" + std::to_string(b) + ")");

    // Every action must reach action 0 and be reached from it.
    std::vector<std::vector<std::size_t>> reversed(n);
    for (std::size_t a = 0; a < n; ++a)
      for (auto b : space.feasible(i, a)) reversed[b].push_back(a);
    auto reach = [&](auto&& next) {
      std::vector<char> seen(n, 0);
      std::vector<std::size_t> stack{0};
      seen[0] = 1;
      while (!stack.empty()) {
        auto a = stack.back();
        stack.pop_back();
        for (auto b : next(a))
          if (!seen[b]) {
            seen[b] = 1;
            stack.push_back(b);
          }
      }
      return seen;
    };
    const auto forward = reach([&](std::size_t a) -> const std::vector<std::size_t>& { return space.feasible(i, a); });
    const auto backward = reach([&](std::size_t a) -> const std::vector<std::size_t>& { return reversed[a]; });
    std::vector<std::size_t> unreachable;
    for (std::size_t a = 0; a < n; ++a)
      if (!forward[a] || !backward[a]) unreachable.push_back(a);
    if (!unreachable.empty())
      add(i, unreachable, AssumptionItem::Connectivity,
          "player " + std::to_string(i) + ": constraint graph is disconnected (" +
              std::to_string(unreachable.size()) + " actions not mutually reachable with action 0)");
  }
  return report;
}

inline std::string describe(const std::vector<Violation>& report) {
  std::ostringstream out;
  for (const auto& v : report) out << "[" << to_string(v.item) << "] " << v.message << "\n";
  return out.str();
}

/// Per-player diameters of the constraint graphs and their maximum D.
struct Diameters {
  std::size_t D = 0;
  std::vector<std::size_t> per_player;
};

/// D_i is the largest shortest-path distance between two actions of player i
/// when moving along C_i. Throws AssumptionViolated on an invalid space.
inline Diameters compute_D(const ActionSpace& space) {
  auto report = validate_action_space(space);
  if (!report.empty()) throw AssumptionViolated("action space violates its structural assumptions:\n" + describe(report));

  Diameters out;
  out.per_player.resize(space.players(), 0);
  for (std::size_t i = 0; i < space.players(); ++i) {
    const std::size_t n = space.action_count(i);
    std::vector<std::size_t> dist(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::fill(dist.begin(), dist.end(), std::numeric_limits<std::size_t>::max());
      std::queue<std::size_t> q;
      dist[s] = 0;
      q.push(s);
      while (!q.empty()) {
        auto a = q.front();
        q.pop();
        for (auto b : space.feasible(i, a))
          if (dist[b] == std::numeric_limits<std::size_t>::max()) {
            dist[b] = dist[a] + 1;
            q.push(b);
          }
      }
      for (auto d : dist) {
        if (d == std::numeric_limits<std::size_t>::max())
          throw AssumptionViolated("player " + std::to_string(i) + ": constraint graph is disconnected");
        out.per_player[i] = std::max(out.per_player[i], d);
      }
    }
    out.D = std::max(out.D, out.per_player[i]);
  }
  return out;
}

/// U_i as a function of the joint action.
using UtilityOracle = std::function<double(std::size_t player, const JointAction&)>;

/// Global objective W. Entries equal to kNullAction mean "this player views
/// nothing"; an objective that supports marginal utilities must accept them.
using ObjectiveOracle = std::function<double(const JointAction&)>;

/// U_i(a) = W(a) - W^{-i}(a), where W^{-i} evaluates W with player i nullified.
inline double marginal_utility(const ObjectiveOracle& objective, std::size_t i, const JointAction& a) {
  JointAction without = a;
  without.at(i) = kNullAction;
  return objective(a) - objective(without);
}

/// A constrained strategic game.
struct GameDefinition {
  ActionSpace space;
  UtilityOracle utility;
  ObjectiveOracle objective;  // empty when the game has no global objective
  /// Upper bound on any unilateral |ΔU_i|, used when exhaustive scans are too big.
  std::optional<double> deviation_bound;

  std::size_t players() const noexcept { return space.players(); }
  bool has_objective() const noexcept { return static_cast<bool>(objective); }

  /// Game whose utilities are the marginal contributions to `objective`.
  static GameDefinition from_objective(ActionSpace space, ObjectiveOracle objective,
                                       std::optional<double> deviation_bound = std::nullopt) {
    GameDefinition g;
    g.space = std::move(space);
    g.objective = std::move(objective);
    g.utility = [w = g.objective](std::size_t i, const JointAction& a) { return marginal_utility(w, i, a); };
    g.deviation_bound = deviation_bound;
    return g;
  }
};

/// Dense objective table over the extended grid where index |A_i| of every
/// player stands for null participation.
class TableObjective {
 public:
  TableObjective(std::vector<std::size_t> counts, std::vector<double> values) : counts_(std::move(counts)) {
    std::vector<std::size_t> ext(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) ext[i] = counts_[i] + 1;
    extended_ = JointIndexer(std::move(ext));
    if (values.size() != extended_.size())
      throw std::invalid_argument("objective table has " + std::to_string(values.size()) + " entries, expected " +
                                  std::to_string(extended_.size()));
    values_ = std::make_shared<const std::vector<double>>(std::move(values));
  }

  double operator()(const JointAction& a) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      const std::size_t digit = a[i] == kNullAction ? counts_[i] : a[i];
      idx = idx * (counts_[i] + 1) + digit;
    }
    return (*values_)[idx];
  }

  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  const std::vector<double>& values() const noexcept { return *values_; }

 private:
  std::vector<std::size_t> counts_;
  JointIndexer extended_;
  std::shared_ptr<const std::vector<double>> values_;
};

/// Utilities (and potential, when known) tabulated over every joint action.
struct TabularGame {
  ActionSpace space;
  JointIndexer indexer;
  std::vector<std::vector<double>> utility;  // [player][joint index]
  std::vector<double> potential;             // empty when unknown

  std::size_t players() const noexcept { return space.players(); }
  std::uint64_t size() const noexcept { return indexer.size(); }
  bool has_potential() const noexcept { return !potential.empty(); }
  double u(std::size_t i, std::uint64_t idx) const { return utility[i][idx]; }
};

/// Evaluates every utility (and W) on every joint action.
inline TabularGame tabulate(const GameDefinition& game, std::uint64_t guard = kJointGuard) {
  TabularGame t;
  t.space = game.space;
  t.indexer = game.space.indexer();
  if (t.indexer.overflowed() || t.indexer.size() > guard)
    throw GuardExceeded("joint action space too large to enumerate (" + std::to_string(t.indexer.size()) +
                        " > " + std::to_string(guard) + ")");
  const auto total = t.indexer.size();
  const auto n = game.players();
  t.utility.assign(n, std::vector<double>(total));
  if (game.has_objective()) t.potential.resize(total);
  JointAction a(n, 0);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    t.indexer.decode_into(idx, a);
    for (std::size_t i = 0; i < n; ++i) t.utility[i][idx] = game.utility(i, a);
    if (game.has_objective()) t.potential[idx] = game.objective(a);
  }
  return t;
}

/// Calls fn(i, from_index, to_index) for every feasible unilateral deviation
/// with to != from.
template <class Fn>
void for_each_unilateral_deviation(const TabularGame& game, Fn&& fn) {
  const auto n = game.players();
  const auto& radix = game.indexer.radix();
  std::vector<std::uint64_t> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * radix[i];
  JointAction a(n, 0);
  for (std::uint64_t idx = 0; idx < game.size(); ++idx) {
    game.indexer.decode_into(idx, a);
    for (std::size_t i = 0; i < n; ++i)
      for (auto b : game.space.feasible(i, a[i])) {
        if (b == a[i]) continue;
        const std::uint64_t to = idx - a[i] * stride[i] + b * stride[i];
        fn(i, idx, to);
      }
  }
}

/// Largest |U_i(a') - U_i(a)| over feasible unilateral deviations.
inline double max_unilateral_deviation(const TabularGame& game) {
  double worst = 0.0;
  for_each_unilateral_deviation(game, [&](std::size_t i, std::uint64_t from, std::uint64_t to) {
    worst = std::max(worst, std::abs(game.u(i, to) - game.u(i, from)));
  });
  return worst;
}

/// Largest |ΔU_i - Δφ| over every feasible unilateral deviation.
inline double max_potential_deviation(const TabularGame& game) {
  if (!game.has_potential()) throw std::invalid_argument("game has no potential to compare against");
  double worst = 0.0;
  for_each_unilateral_deviation(game, [&](std::size_t i, std::uint64_t from, std::uint64_t to) {
    const double du = game.u(i, to) - game.u(i, from);
    const double dw = game.potential[to] - game.potential[from];
    worst = std::max(worst, std::abs(du - dw));
  });
  return worst;
}

/// Samples random feasible unilateral deviations and returns the largest
/// |ΔU_i - ΔW| seen. Zero up to roundoff for marginal-contribution games.
inline double check_potential_identity(const GameDefinition& game, std::size_t trials, std::uint64_t seed) {
  if (!game.has_objective()) throw std::invalid_argument("potential identity needs a global objective");
  Stream rng(seed);
  const auto n = game.players();
  double worst = 0.0;
  JointAction a(n);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < n; ++i) a[i] = rng.below(game.space.action_count(i));
    const std::size_t i = rng.below(n);
    const auto& set = game.space.feasible(i, a[i]);
    JointAction b = a;
    b[i] = set[rng.below(set.size())];
    const double du = game.utility(i, b) - game.utility(i, a);
    const double dw = game.objective(b) - game.objective(a);
    worst = std::max(worst, std::abs(du - dw));
  }
  return worst;
}

/// Joint actions a* where no player can improve within C_i(a*_i).
inline std::vector<JointAction> enumerate_constrained_nash(const TabularGame& game,
                                                           double tolerance = kIdentityTolerance) {
  std::vector<char> stable(game.size(), 1);
  for_each_unilateral_deviation(game, [&](std::size_t i, std::uint64_t from, std::uint64_t to) {
    if (game.u(i, to) > game.u(i, from) + tolerance) stable[from] = 0;
  });
  std::vector<JointAction> out;
  for (std::uint64_t idx = 0; idx < game.size(); ++idx)
    if (stable[idx]) out.push_back(game.indexer.decode(idx));
  return out;
}

/// Same as above, tabulating the game first. Refuses spaces above the guard.
inline std::vector<JointAction> enumerate_constrained_nash(const GameDefinition& game,
                                                           std::uint64_t guard = kJointGuard) {
  return enumerate_constrained_nash(tabulate(game, guard));
}

/// Indices of the potential maximizers (ties within `tolerance`).
inline std::vector<std::uint64_t> potential_maximizers(const TabularGame& game, double tolerance = 1e-12) {
  if (!game.has_potential()) throw std::invalid_argument("game has no potential");
  const double best = *std::max_element(game.potential.begin(), game.potential.end());
  std::vector<std::uint64_t> out;
  for (std::uint64_t idx = 0; idx < game.size(); ++idx)
    if (game.potential[idx] >= best - tolerance) out.push_back(idx);
  return out;
}

/// Target for the largest unilateral utility change after scaling.
inline constexpr double kScaleMargin = 0.01;
inline constexpr double kScaledDeviationTarget = 0.5 - kScaleMargin;

/// Factor s that brings a maximal deviation down to 0.5 - margin; 1 when
/// already there or when nothing varies.
inline double scale_factor_for(double max_deviation) {
  if (!(max_deviation > kScaledDeviationTarget)) return 1.0;
  return kScaledDeviationTarget / max_deviation;
}

struct ScaledGame {
  GameDefinition game;
  double factor = 1.0;
  double max_deviation = 0.0;  // before scaling; a bound when not exhaustive
  bool exhaustive = true;
};

inline GameDefinition scaled(const GameDefinition& game, double s) {
  GameDefinition out;
  out.space = game.space;
  out.utility = [u = game.utility, s](std::size_t i, const JointAction& a) { return s * u(i, a); };
  if (game.has_objective()) out.objective = [w = game.objective, s](const JointAction& a) { return s * w(a); };
  if (game.deviation_bound) out.deviation_bound = s * *game.deviation_bound;
  return out;
}

inline TabularGame scaled(const TabularGame& game, double s) {
  TabularGame out = game;
  for (auto& row : out.utility)
    for (auto& v : row) v *= s;
  for (auto& v : out.potential) v *= s;
  return out;
}

/// Multiplies utilities and W so that every feasible unilateral |ΔU_i| is at
/// most 0.5 - margin. Exhaustive below the joint guard, otherwise relies on
/// game.deviation_bound.
inline ScaledGame scale_to_assumption3(const GameDefinition& game, std::uint64_t guard = kJointGuard) {
  ScaledGame out;
  const auto count = game.space.indexer();
  if (!count.overflowed() && count.size() <= guard) {
    out.max_deviation = max_unilateral_deviation(tabulate(game, guard));
    out.exhaustive = true;
  } else if (game.deviation_bound) {
    out.max_deviation = *game.deviation_bound;
    out.exhaustive = false;
  } else {
    throw GuardExceeded("joint action space too large for an exhaustive deviation scan and no bound supplied");
  }
  out.factor = scale_factor_for(out.max_deviation);
  out.game = out.factor == 1.0 ? game : scaled(game, out.factor);
  return out;
}

/// Tabular counterpart; returns the scaled table and writes the factor.
inline TabularGame scale_to_assumption3(const TabularGame& game, double* factor_out) {
  const double s = scale_factor_for(max_unilateral_deviation(game));
  if (factor_out) *factor_out = s;
  return s == 1.0 ? game : scaled(game, s);
}

}  // namespace ptz
