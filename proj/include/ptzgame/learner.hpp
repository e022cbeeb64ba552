#pragma once

// Payoff-based learning with exploration, exploitation and irrational
// decisions. Each sensor keeps its last two actions and the utilities they
// earned; the exploration rate is either constant or decays with the round.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptzgame/game.hpp"
#include "ptzgame/random.hpp"

namespace ptz {

enum class Schedule { Homogeneous, Inhomogeneous };

enum class Branch { Init, Explore, Exploit, Irrational };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Init: return "init";
    case Branch::Explore: return "explore";
    case Branch::Exploit: return "exploit";
    case Branch::Irrational: return "irrational";
  }
  return "?";
}

/// ε(k) = k^(-1/(n(D+1))).
inline double epsilon_schedule(std::uint64_t k, std::size_t players, std::size_t D) {
  if (k == 0) throw std::invalid_argument("epsilon schedule is undefined at round 0");
  if (players == 0 || D == 0) throw std::invalid_argument("epsilon schedule needs n >= 1 and D >= 1");
  return std::pow(static_cast<double>(k), -1.0 / (static_cast<double>(players) * static_cast<double>(D + 1)));
}

/// Admissible κ interval (lower, upper] = (1/(C-1), 1/2].
struct KappaBounds {
  double lower = 0.0;  // exclusive
  double upper = 0.5;  // inclusive
  std::size_t C = 0;

  bool empty() const noexcept { return !(lower < upper); }
  bool contains(double kappa) const noexcept { return kappa > lower && kappa <= upper; }
};

inline KappaBounds kappa_bounds(const ActionSpace& space) {
  const auto C = space.max_feasible();
  if (C <= 2) throw AssumptionViolated("kappa bounds need C >= 3, got C = " + std::to_string(C));
  return {1.0 / static_cast<double>(C - 1), 0.5, C};
}

struct LearnerParams {
  Schedule mode = Schedule::Homogeneous;
  double epsilon = 0.015;  // used in homogeneous mode
  double kappa = 0.12;
  std::size_t players = 0;
  std::size_t D = 1;

  /// Exploration rate for round k. The decaying schedule is clamped to 1/2.
  double epsilon_at(std::uint64_t k) const {
    if (mode == Schedule::Homogeneous) return epsilon;
    return std::min(0.5, epsilon_schedule(k, players, D));
  }

  void validate() const {
    if (mode == Schedule::Homogeneous && !(epsilon > 0.0 && epsilon <= 0.5))
      throw std::invalid_argument("epsilon must lie in (0, 0.5], got " + std::to_string(epsilon));
    if (!(kappa >= 0.0 && kappa <= 0.5)) throw std::invalid_argument("kappa must lie in [0, 0.5], got " + std::to_string(kappa));
    if (players == 0) throw std::invalid_argument("learner needs at least one player");
  }
};

/// Two-deep memory of one sensor.
struct SensorMemory {
  std::size_t last = 0;      // a_i(k-1)
  std::size_t previous = 0;  // a_i(k-2)
  double u_last = 0.0;
  double u_previous = 0.0;

  double delta() const noexcept { return u_previous - u_last; }
  bool improved() const noexcept { return u_last >= u_previous; }

  friend bool operator==(const SensorMemory&, const SensorMemory&) = default;
};

struct BranchProbabilities {
  double explore = 0.0;
  double exploit = 0.0;
  double irrational = 0.0;
};

/// Probabilities of the three branches for a given memory.
inline BranchProbabilities branch_probabilities(const SensorMemory& m, double epsilon, double kappa) {
  if (m.improved()) return {epsilon, 1.0 - epsilon, 0.0};
  const double stay = kappa * std::pow(epsilon, m.delta());
  return {epsilon, (1.0 - epsilon) * (1.0 - stay), (1.0 - epsilon) * stay};
}

struct Choice {
  std::size_t action = 0;
  Branch branch = Branch::Exploit;
};

/// Uniform draw from `set` minus the excluded actions, by rejection.
template <UniformSource R>
std::size_t sample_excluding(const std::vector<std::size_t>& set, std::size_t skip_a, std::size_t skip_b, R& rng) {
  std::size_t allowed = 0;
  for (auto x : set) allowed += (x != skip_a && x != skip_b);
  if (allowed == 0) throw std::logic_error("empty exploration set");
  for (;;) {
    const auto x = set[rng.below(set.size())];
    if (x != skip_a && x != skip_b) return x;
  }
}

/// One sensor's decision for the next round. `feasible` is C_i(a_i^1).
/// A single uniform draw picks the branch: [0, ε) explores, and in the
/// "got worse" case the next (1-ε)κε^Δ of mass is the irrational stay.
template <UniformSource R>
Choice select_action(const SensorMemory& m, const std::vector<std::size_t>& feasible, double epsilon, double kappa,
                     R& rng) {
  const double u = rng.uniform();
  if (m.improved()) {
    if (u < epsilon) return {sample_excluding(feasible, m.last, m.last, rng), Branch::Explore};
    return {m.last, Branch::Exploit};
  }
  assert(m.delta() > 0.0);
  if (u < epsilon) return {sample_excluding(feasible, m.last, m.previous, rng), Branch::Explore};
  const double stay = (1.0 - epsilon) * kappa * std::pow(epsilon, m.delta());
  if (u < epsilon + stay) return {m.last, Branch::Irrational};
  return {m.previous, Branch::Exploit};
}

/// Utilities of every player and W for one executed joint action.
struct Evaluation {
  std::vector<double> utility;
  double objective = 0.0;
};

/// Anything that evaluates a joint action: returns every U_i and W.
template <class O>
concept JointOracle = requires(O o, std::uint64_t round, const JointAction& a) {
  { o(round, a) } -> std::convertible_to<Evaluation>;
};

struct RoundOutcome {
  std::uint64_t round = 0;
  double epsilon = 0.0;
  JointAction action;
  std::vector<Branch> branch;
  std::vector<double> utility;
  double objective = 0.0;
};

struct LearnerState {
  std::vector<SensorMemory> memory;
  std::vector<Stream> rng;  // one stream per sensor
  std::uint64_t round = 0;  // next round to play

  JointAction current() const {
    JointAction a(memory.size());
    for (std::size_t i = 0; i < memory.size(); ++i) a[i] = memory[i].last;
    return a;
  }
};

inline std::vector<Stream> sensor_streams(std::uint64_t seed, std::size_t players) {
  std::vector<Stream> out;
  out.reserve(players);
  for (std::size_t i = 0; i < players; ++i) out.push_back(Stream::derive(seed, i));
  return out;
}

/// Initialization: every sensor plays `start` (drawn uniformly where an entry
/// is kNullAction), both memory slots hold it, and rounds 0 and 1 are logged
/// with the same outcome.
template <JointOracle O>
std::pair<LearnerState, RoundOutcome> initialize(const ActionSpace& space, O& oracle, std::uint64_t seed,
                                                 JointAction start = {}) {
  const auto n = space.players();
  LearnerState s;
  s.rng = sensor_streams(seed, n);
  if (start.empty()) start.assign(n, kNullAction);
  if (start.size() != n) throw std::invalid_argument("initial joint action has the wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    if (start[i] == kNullAction) start[i] = s.rng[i].below(space.action_count(i));
    if (start[i] >= space.action_count(i)) throw std::invalid_argument("initial action out of range");
  }
  Evaluation e = oracle(std::uint64_t{0}, start);
  s.memory.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.memory[i] = {start[i], start[i], e.utility[i], e.utility[i]};
  s.round = 2;
  RoundOutcome out{0, 0.0, start, std::vector<Branch>(n, Branch::Init), e.utility, e.objective};
  return {std::move(s), std::move(out)};
}

/// One round: all sensors decide from the previous state, the joint action is
/// evaluated once, then every memory shifts. The input state is untouched if
/// the oracle throws.
template <JointOracle O>
std::pair<LearnerState, RoundOutcome> step(const ActionSpace& space, O& oracle, const LearnerState& state,
                                           const LearnerParams& params) {
  const auto n = state.memory.size();
  LearnerState next = state;
  RoundOutcome out;
  out.round = state.round;
  out.epsilon = params.epsilon_at(state.round);
  out.action.resize(n);
  out.branch.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = state.memory[i];
    const Choice c = select_action(m, space.feasible(i, m.last), out.epsilon, params.kappa, next.rng[i]);
    out.action[i] = c.action;
    out.branch[i] = c.branch;
  }
  Evaluation e = oracle(state.round, out.action);
  for (std::size_t i = 0; i < n; ++i) {
    auto& m = next.memory[i];
    m.previous = m.last;
    m.last = out.action[i];
    m.u_previous = m.u_last;
    m.u_last = e.utility[i];
  }
  out.utility = std::move(e.utility);
  out.objective = e.objective;
  ++next.round;
  return {std::move(next), std::move(out)};
}

/// Every round of a run, rounds 0 and 1 being the duplicated initialization.
struct RunLog {
  std::size_t players = 0;
  std::vector<RoundOutcome> rows;
};

template <JointOracle O>
RunLog run(const ActionSpace& space, O& oracle, const LearnerParams& params, std::uint64_t rounds, std::uint64_t seed,
           const JointAction& start = {}) {
  if (rounds < 2) throw std::invalid_argument("a run needs at least 2 rounds");
  params.validate();
  RunLog log;
  log.players = space.players();
  log.rows.reserve(rounds);
  auto [state, first] = initialize(space, oracle, seed, start);
  log.rows.push_back(first);
  first.round = 1;
  log.rows.push_back(first);
  for (std::uint64_t k = 2; k < rounds; ++k) {
    auto [next, outcome] = step(space, oracle, state, params);
    state = std::move(next);
    log.rows.push_back(std::move(outcome));
  }
  return log;
}

/// Oracle over a tabulated game.
struct TableOracle {
  const TabularGame* game;

  Evaluation operator()(std::uint64_t, const JointAction& a) const {
    const auto idx = game->indexer.index(a);
    Evaluation e;
    e.utility.resize(game->players());
    for (std::size_t i = 0; i < game->players(); ++i) e.utility[i] = game->u(i, idx);
    e.objective = game->has_potential() ? game->potential[idx] : 0.0;
    return e;
  }
};

/// Oracle over a GameDefinition's utility and objective functions.
struct DefinitionOracle {
  const GameDefinition* game;

  Evaluation operator()(std::uint64_t, const JointAction& a) const {
    Evaluation e;
    e.utility.resize(game->players());
    for (std::size_t i = 0; i < game->players(); ++i) e.utility[i] = game->utility(i, a);
    e.objective = game->has_objective() ? game->objective(a) : 0.0;
    return e;
  }
};

/// %.12g formatting used by every CSV this library writes.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::vector<std::string> csv_header(std::size_t players) {
  std::vector<std::string> h{"round", "epsilon"};
  for (std::size_t i = 0; i < players; ++i) h.push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < players; ++i) h.push_back("branch" + std::to_string(i));
  for (std::size_t i = 0; i < players; ++i) h.push_back("u" + std::to_string(i));
  h.push_back("W");
  return h;
}

/// Header row then one row per round.
inline void write_csv(std::ostream& os, const RunLog& log) {
  const auto header = csv_header(log.players);
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << "\n";
  for (const auto& r : log.rows) {
    os << r.round << "," << format_real(r.epsilon);
    for (auto a : r.action) os << "," << a;
    for (auto b : r.branch) os << "," << to_string(b);
    for (auto u : r.utility) os << "," << format_real(u);
    os << "," << format_real(r.objective) << "\n";
  }
}

inline Branch parse_branch(const std::string& s) {
  if (s == "init") return Branch::Init;
  if (s == "explore") return Branch::Explore;
  if (s == "exploit") return Branch::Exploit;
  if (s == "irrational") return Branch::Irrational;
  throw std::invalid_argument("unknown branch label '" + s + "'");
}

/// Parses what write_csv produced. Real values come back as parsed doubles.
inline RunLog read_csv(std::istream& is) {
  RunLog log;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty run log");
  auto split = [](const std::string& l) {
    std::vector<std::string> f;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    return f;
  };
  const auto header = split(line);
  if (header.size() < 3 || (header.size() - 3) % 3 != 0) throw std::runtime_error("malformed run log header");
  log.players = (header.size() - 3) / 3;
  if (header != csv_header(log.players)) throw std::runtime_error("unexpected run log columns");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw std::runtime_error("run log line " + std::to_string(lineno) + ": wrong field count");
    RoundOutcome r;
    const auto n = log.players;
    try {
      r.round = std::stoull(f[0]);
      r.epsilon = std::stod(f[1]);
      for (std::size_t i = 0; i < n; ++i) r.action.push_back(std::stoull(f[2 + i]));
      for (std::size_t i = 0; i < n; ++i) r.branch.push_back(parse_branch(f[2 + n + i]));
      for (std::size_t i = 0; i < n; ++i) r.utility.push_back(std::stod(f[2 + 2 * n + i]));
      r.objective = std::stod(f[2 + 3 * n]);
    } catch (const std::exception& e) {
      throw std::runtime_error("run log line " + std::to_string(lineno) + ": " + e.what());
    }
    log.rows.push_back(std::move(r));
  }
  return log;
}

}  // namespace ptz
