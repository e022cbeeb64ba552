#pragma once

// Exact Markov chain of the constant-rate learner on a tabulated game. States
// are pairs (older, newer) of consecutive joint actions. Provides transition
// probabilities and resistances, recurrent classes of the unperturbed chain,
// the resistance graph between them, stochastic potentials and stationary
// distributions.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ptzgame/arborescence.hpp"
#include "ptzgame/error.hpp"
#include "ptzgame/game.hpp"

namespace ptz {

inline constexpr std::uint64_t kChainStateGuard = 100'000;
inline constexpr std::uint64_t kClassGuard = 10'000;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// How one sensor moves along a transition (older, newer) -> (newer, next).
enum class SensorCase {
  Explore,           // did not lose, tries a new action
  Stay,              // did not lose, keeps its action
  ExploreAfterLoss,  // lost, tries an action other than the last two
  Irrational,        // lost, keeps the worse action
  Revert,            // lost, returns to the better action
  Hold,              // lost although its own action did not change; keeps it
  Infeasible,
};

inline const char* to_string(SensorCase c) {
  switch (c) {
    case SensorCase::Explore: return "explore";
    case SensorCase::Stay: return "stay";
    case SensorCase::ExploreAfterLoss: return "explore-after-loss";
    case SensorCase::Irrational: return "irrational";
    case SensorCase::Revert: return "revert";
    case SensorCase::Hold: return "hold";
    case SensorCase::Infeasible: return "infeasible";
  }
  return "?";
}

struct SensorStep {
  SensorCase kind = SensorCase::Infeasible;
  std::size_t divisor = 1;  // number of exploration candidates
  double delta = 0.0;       // U_i(older) - U_i(newer) when the sensor lost
};

/// Classifies sensor i given its three consecutive actions and the two
/// utilities it earned.
inline SensorStep classify_sensor(const ActionSpace& space, std::size_t i, std::size_t a0, std::size_t a1,
                                  std::size_t a2, double u0, double u1) {
  SensorStep s;
  if (!space.allows(i, a1, a2)) return s;
  const auto C = space.feasible(i, a1).size();
  if (u1 >= u0) {
    s.kind = a2 == a1 ? SensorCase::Stay : SensorCase::Explore;
    s.divisor = C - 1;
    return s;
  }
  s.delta = u0 - u1;
  if (a0 == a1) {
    s.kind = a2 == a1 ? SensorCase::Hold : SensorCase::ExploreAfterLoss;
    s.divisor = C - 1;
    return s;
  }
  if (a2 == a1)
    s.kind = SensorCase::Irrational;
  else if (a2 == a0)
    s.kind = SensorCase::Revert;
  else
    s.kind = SensorCase::ExploreAfterLoss;
  s.divisor = C - 2;
  return s;
}

inline double sensor_probability(const SensorStep& s, double eps, double kappa) {
  switch (s.kind) {
    case SensorCase::Explore:
    case SensorCase::ExploreAfterLoss: return eps / static_cast<double>(s.divisor);
    case SensorCase::Stay:
    case SensorCase::Hold: return 1.0 - eps;
    case SensorCase::Irrational: return (1.0 - eps) * kappa * std::pow(eps, s.delta);
    case SensorCase::Revert: return (1.0 - eps) * (1.0 - kappa * std::pow(eps, s.delta));
    case SensorCase::Infeasible: return 0.0;
  }
  return 0.0;
}

/// Exponent of ε in the sensor's factor; nothing when the factor vanishes.
inline std::optional<double> sensor_resistance(const SensorStep& s, double kappa) {
  switch (s.kind) {
    case SensorCase::Explore:
    case SensorCase::ExploreAfterLoss: return 1.0;
    case SensorCase::Stay:
    case SensorCase::Hold:
    case SensorCase::Revert: return 0.0;
    case SensorCase::Irrational:
      if (kappa > 0.0) return s.delta;
      return std::nullopt;
    case SensorCase::Infeasible: return std::nullopt;
  }
  return std::nullopt;
}

/// Pair of joint-action indices (a(k-1), a(k)).
struct ChainState {
  std::uint64_t older = 0;
  std::uint64_t newer = 0;

  bool diagonal() const noexcept { return older == newer; }
  friend bool operator==(const ChainState&, const ChainState&) = default;
};

/// Enumeration of B = {(a, a') : a'_i in C_i(a_i)}.
class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(const ActionSpace& space, std::uint64_t guard = kChainStateGuard) : indexer_(space.indexer()) {
    if (indexer_.overflowed() || indexer_.size() > guard)
      throw GuardExceeded("chain state space too large: " + std::to_string(indexer_.size()) +
                          " joint actions; shrink the scenario");
    const auto total = indexer_.size();
    diag_.resize(total);
    JointAction a, b;
    for (std::uint64_t x = 0; x < total; ++x) {
      indexer_.decode_into(x, a);
      for_each_successor(space, a, b, [&](std::uint64_t y) {
        if (states_.size() >= guard)
          throw GuardExceeded("chain state space exceeds " + std::to_string(guard) + " states; shrink the scenario");
        if (x == y) diag_[x] = static_cast<std::uint32_t>(states_.size());
        lookup_.emplace(key(x, y), static_cast<std::uint32_t>(states_.size()));
        states_.push_back({x, y});
      });
    }
  }

  std::size_t size() const noexcept { return states_.size(); }
  const ChainState& operator[](std::size_t s) const { return states_[s]; }
  const std::vector<ChainState>& states() const noexcept { return states_; }
  const JointIndexer& indexer() const noexcept { return indexer_; }

  std::optional<std::uint32_t> find(std::uint64_t older, std::uint64_t newer) const {
    auto it = lookup_.find(key(older, newer));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  /// State id of (a, a).
  std::uint32_t diagonal(std::uint64_t a) const { return diag_.at(a); }

  /// Calls fn(index of a') for every a' with a'_i in C_i(a_i).
  template <class Fn>
  void for_each_successor(const ActionSpace& space, const JointAction& a, JointAction& scratch, Fn&& fn) const {
    const auto n = a.size();
    std::vector<std::size_t> pos(n, 0);
    scratch.resize(n);
    for (std::size_t i = 0; i < n; ++i) scratch[i] = space.feasible(i, a[i])[0];
    for (;;) {
      fn(indexer_.index(scratch));
      std::size_t i = n;
      while (i-- > 0) {
        const auto& set = space.feasible(i, a[i]);
        if (++pos[i] < set.size()) {
          scratch[i] = set[pos[i]];
          break;
        }
        pos[i] = 0;
        scratch[i] = set[0];
      }
      if (i == static_cast<std::size_t>(-1)) return;
    }
  }

 private:
  std::uint64_t key(std::uint64_t x, std::uint64_t y) const { return x * indexer_.size() + y; }

  JointIndexer indexer_;
  std::vector<ChainState> states_;
  std::vector<std::uint32_t> diag_;
  std::unordered_map<std::uint64_t, std::uint32_t> lookup_;
};

/// Per-sensor classification of z1 -> z2; empty when z2 does not start
/// where z1 ends.
inline std::vector<SensorStep> classify_transition(const TabularGame& g, const ChainState& z1, const ChainState& z2) {
  if (z2.older != z1.newer) return {};
  const auto a0 = g.indexer.decode(z1.older);
  const auto a1 = g.indexer.decode(z1.newer);
  const auto a2 = g.indexer.decode(z2.newer);
  std::vector<SensorStep> out(g.players());
  for (std::size_t i = 0; i < g.players(); ++i)
    out[i] = classify_sensor(g.space, i, a0[i], a1[i], a2[i], g.u(i, z1.older), g.u(i, z1.newer));
  return out;
}

/// P^ε(z1 -> z2) as the product of the per-sensor factors.
inline double transition_probability(const TabularGame& g, const ChainState& z1, const ChainState& z2, double eps,
                                     double kappa) {
  const auto steps = classify_transition(g, z1, z2);
  if (steps.empty()) return 0.0;
  double p = 1.0;
  for (const auto& s : steps) p *= sensor_probability(s, eps, kappa);
  return p;
}

/// Sum of the per-sensor exponents; nothing when the transition cannot
/// happen for small ε > 0.
inline std::optional<double> transition_resistance(const TabularGame& g, const ChainState& z1, const ChainState& z2,
                                                   double kappa) {
  const auto steps = classify_transition(g, z1, z2);
  if (steps.empty()) return std::nullopt;
  double r = 0.0;
  for (const auto& s : steps) {
    auto x = sensor_resistance(s, kappa);
    if (!x) return std::nullopt;
    r += *x;
  }
  return r;
}

/// Least-squares slope of log P^ε against log ε.
inline double resistance_slope(const TabularGame& g, const ChainState& z1, const ChainState& z2, double kappa,
                               const std::vector<double>& eps = {1e-2, 1e-3, 1e-4}) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (auto e : eps) {
    const double x = std::log(e);
    const double y = std::log(transition_probability(g, z1, z2, e, kappa));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Transition {
  std::uint32_t to = 0;
  double resistance = kInfinity;  // infinite when the ε -> 0 factor vanishes
  std::vector<SensorStep> steps;
};

/// The chain on B for a tabulated game and a fixed κ. Successor lists are
/// built once; probabilities are evaluated per ε on demand.
class ChainModel {
 public:
  ChainModel(TabularGame game, double kappa, std::uint64_t guard = kChainStateGuard)
      : game_(std::move(game)), kappa_(kappa), space_(game_.space, guard) {
    if (!(kappa >= 0.0 && kappa <= 0.5)) throw std::invalid_argument("kappa must lie in [0, 0.5]");
    rows_.resize(space_.size());
    JointAction a0, a1, a2, scratch;
    for (std::uint32_t s = 0; s < space_.size(); ++s) {
      const auto& z = space_[s];
      game_.indexer.decode_into(z.older, a0);
      game_.indexer.decode_into(z.newer, a1);
      space_.for_each_successor(game_.space, a1, scratch, [&](std::uint64_t next) {
        game_.indexer.decode_into(next, a2);
        Transition t;
        t.to = *space_.find(z.newer, next);
        t.steps.resize(game_.players());
        double r = 0.0;
        for (std::size_t i = 0; i < game_.players(); ++i) {
          t.steps[i] = classify_sensor(game_.space, i, a0[i], a1[i], a2[i], game_.u(i, z.older), game_.u(i, z.newer));
          auto x = sensor_resistance(t.steps[i], kappa_);
          r = x ? r + *x : kInfinity;
          if (!x) break;
        }
        t.resistance = r;
        rows_[s].push_back(std::move(t));
      });
    }
  }

  const TabularGame& game() const noexcept { return game_; }
  const StateSpace& states() const noexcept { return space_; }
  double kappa() const noexcept { return kappa_; }
  std::size_t size() const noexcept { return space_.size(); }
  const std::vector<Transition>& row(std::size_t s) const { return rows_.at(s); }

  double probability(const Transition& t, double eps) const {
    double p = 1.0;
    for (const auto& s : t.steps) p *= sensor_probability(s, eps, kappa_);
    return p;
  }

  /// Dense P^ε.
  Eigen::MatrixXd dense(double eps) const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < size(); ++s)
      for (const auto& t : rows_[s]) P(static_cast<Eigen::Index>(s), t.to) += probability(t, eps);
    return P;
  }

  /// Largest |Σ_z2 P(z1, z2) - 1| over rows.
  double row_sum_error(double eps) const {
    double worst = 0.0;
    for (std::size_t s = 0; s < size(); ++s) {
      double sum = 0.0;
      for (const auto& t : rows_[s]) sum += probability(t, eps);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
  }

 private:
  TabularGame game_;
  double kappa_;
  StateSpace space_;
  std::vector<std::vector<Transition>> rows_;
};

/// Closed strongly connected components of the zero-resistance graph, i.e.
/// the recurrent classes of the unperturbed chain. Each class is a sorted
/// list of state ids; classes are ordered by their smallest state.
inline std::vector<std::vector<std::uint32_t>> recurrent_classes(const ChainModel& chain) {
  const auto n = chain.size();
  std::vector<std::uint32_t> index(n, UINT32_MAX), low(n, 0), comp(n, UINT32_MAX);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::uint32_t counter = 0, comps = 0;
  // Iterative Tarjan.
  struct Frame {
    std::uint32_t v;
    std::size_t edge;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != UINT32_MAX) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& f = call.back();
      const auto& row = chain.row(f.v);
      if (f.edge < row.size()) {
        const auto& t = row[f.edge++];
        if (t.resistance != 0.0) continue;
        const auto w = t.to;
        if (index[w] == UINT32_MAX) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const auto v = f.v;
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  std::vector<char> closed(comps, 1);
  for (std::uint32_t s = 0; s < n; ++s)
    for (const auto& t : chain.row(s))
      if (t.resistance == 0.0 && comp[t.to] != comp[s]) closed[comp[s]] = 0;
  std::vector<std::vector<std::uint32_t>> members(comps);
  for (std::uint32_t s = 0; s < n; ++s)
    if (closed[comp[s]]) members[comp[s]].push_back(s);
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& m : members)
    if (!m.empty()) out.push_back(std::move(m));
  std::sort(out.begin(), out.end());
  return out;
}

/// Index of the only player whose action differs between x and y, when y is
/// a feasible unilateral move from x.
inline std::optional<std::size_t> single_deviator(const TabularGame& g, std::uint64_t x, std::uint64_t y) {
  const auto a = g.indexer.decode(x), b = g.indexer.decode(y);
  std::optional<std::size_t> who;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) {
      if (who) return std::nullopt;
      who = i;
    }
  if (!who || !g.space.allows(*who, a[*who], b[*who])) return std::nullopt;
  return who;
}

/// (a, a) -> (b, b) is a straight-route edge when exactly one player moves
/// and the move is feasible.
inline bool is_straight_pair(const TabularGame& g, std::uint64_t a, std::uint64_t b) {
  return single_deviator(g, a, b).has_value();
}

/// Resistance of the two-step route (a,a) -> (a,b) -> (b,b): one exploration,
/// plus the loss the deviator accepts by staying.
inline double straight_route_resistance(const TabularGame& g, std::uint64_t a, std::uint64_t b) {
  const auto who = single_deviator(g, a, b);
  if (!who) throw std::invalid_argument("joint actions are not a feasible single-player deviation pair");
  return 1.0 + std::max(0.0, g.u(*who, a) - g.u(*who, b));
}

/// Minimal path resistances from a set of source states to every state.
inline std::vector<double> resistance_distances(const ChainModel& chain, const std::vector<std::uint32_t>& sources) {
  std::vector<double> dist(chain.size(), kInfinity);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (auto s : sources) {
    dist[s] = 0.0;
    pq.push({0.0, s});
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (const auto& t : chain.row(v)) {
      if (t.resistance == kInfinity) continue;
      const double nd = d + t.resistance;
      if (nd < dist[t.to]) {
        dist[t.to] = nd;
        pq.push({nd, t.to});
      }
    }
  }
  return dist;
}

/// Minimal resistance over all paths from (a, a) to (b, b).
inline double min_resistance_between(const ChainModel& chain, std::uint64_t a, std::uint64_t b) {
  const auto& S = chain.states();
  return resistance_distances(chain, {S.diagonal(a)})[S.diagonal(b)];
}

enum class EdgeClass { Straight, Distant };

/// Complete weighted digraph over the recurrent classes.
struct ResistanceGraph {
  std::vector<std::vector<std::uint32_t>> classes;
  std::vector<std::vector<double>> weight;  // [from][to]
  std::vector<std::vector<EdgeClass>> tag;

  std::size_t size() const noexcept { return classes.size(); }

  /// Joint-action index of a singleton diagonal class.
  std::optional<std::uint64_t> joint(const ChainModel& chain, std::size_t l) const {
    if (classes[l].size() != 1) return std::nullopt;
    const auto& z = chain.states()[classes[l][0]];
    if (!z.diagonal()) return std::nullopt;
    return z.older;
  }
};

inline ResistanceGraph build_resistance_graph(const ChainModel& chain) {
  ResistanceGraph G;
  G.classes = recurrent_classes(chain);
  const auto L = G.classes.size();
  if (L > kClassGuard) throw GuardExceeded("too many recurrent classes for the tree analysis: " + std::to_string(L));
  std::vector<std::uint32_t> owner(chain.size(), UINT32_MAX);
  for (std::uint32_t l = 0; l < L; ++l)
    for (auto s : G.classes[l]) owner[s] = l;
  G.weight.assign(L, std::vector<double>(L, kInfinity));
  G.tag.assign(L, std::vector<EdgeClass>(L, EdgeClass::Distant));
  for (std::size_t l = 0; l < L; ++l) {
    const auto dist = resistance_distances(chain, G.classes[l]);
    for (std::uint32_t s = 0; s < chain.size(); ++s)
      if (owner[s] != UINT32_MAX && owner[s] != l) G.weight[l][owner[s]] = std::min(G.weight[l][owner[s]], dist[s]);
    G.weight[l][l] = 0.0;
    const auto x = G.joint(chain, l);
    for (std::size_t m = 0; m < L; ++m) {
      const auto y = G.joint(chain, m);
      if (m != l && x && y && is_straight_pair(chain.game(), *x, *y)) G.tag[l][m] = EdgeClass::Straight;
    }
  }
  return G;
}

struct StochasticPotentials {
  ResistanceGraph graph;
  std::vector<double> potential;     // per class
  std::vector<Arborescence> trees;   // per class, edges point toward the root
};

/// For every class, the least total weight of a spanning tree in which every
/// other class has a path to it.
inline StochasticPotentials stochastic_potentials(const ChainModel& chain) {
  StochasticPotentials out;
  out.graph = build_resistance_graph(chain);
  const auto L = out.graph.size();
  std::vector<WeightedEdge> edges;
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t m = 0; m < L; ++m)
      if (l != m && out.graph.weight[l][m] < kInfinity) edges.push_back({l, m, out.graph.weight[l][m]});
  for (std::size_t root = 0; root < L; ++root) {
    auto tree = min_in_arborescence(L, edges, root);
    if (!tree) throw std::runtime_error("resistance graph is not strongly connected");
    out.potential.push_back(tree->weight);
    out.trees.push_back(std::move(*tree));
  }
  return out;
}

/// Tolerance used to call two stochastic potentials equal.
inline constexpr double kPotentialTieTolerance = 1e-9;

/// Joint actions of the diagonal classes with minimal stochastic potential;
/// ties are all reported.
inline std::vector<std::uint64_t> stochastically_stable_states(const ChainModel& chain,
                                                               const StochasticPotentials& sp) {
  const double best = *std::min_element(sp.potential.begin(), sp.potential.end());
  std::vector<std::uint64_t> out;
  for (std::size_t l = 0; l < sp.potential.size(); ++l)
    if (sp.potential[l] <= best + kPotentialTieTolerance) {
      auto x = sp.graph.joint(chain, l);
      if (!x) throw std::logic_error("minimal class is not a diagonal singleton");
      out.push_back(*x);
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::uint64_t> stochastically_stable_states(const ChainModel& chain) {
  return stochastically_stable_states(chain, stochastic_potentials(chain));
}

inline constexpr std::size_t kDenseStationaryLimit = 1500;
inline constexpr double kStationaryResidual = 1e-12;

/// Stationary distribution of an irreducible stochastic matrix by the
/// Grassmann-Taksar-Heyman elimination (no subtractions).
inline Eigen::VectorXd gth_stationary(Eigen::MatrixXd P) {
  const auto n = P.rows();
  for (Eigen::Index k = n - 1; k > 0; --k) {
    const double s = P.row(k).head(k).sum();
    if (!(s > 0)) throw std::runtime_error("chain is reducible; no unique stationary distribution");
    P.col(k).head(k) /= s;
    P.topLeftCorner(k, k).noalias() += P.col(k).head(k) * P.row(k).head(k);
  }
  Eigen::VectorXd pi(n);
  pi(0) = 1.0;
  for (Eigen::Index j = 1; j < n; ++j) pi(j) = pi.head(j).dot(P.col(j).head(j));
  return pi / pi.sum();
}

struct StationaryResult {
  Eigen::VectorXd mu;
  double residual = 0.0;  // ||μP - μ||_inf
  std::size_t iterations = 0;
  bool dense = true;
};

/// μ with μP^ε = μ and Σμ = 1. Direct elimination up to kDenseStationaryLimit
/// states, sparse power iteration beyond.
inline StationaryResult stationary_distribution(const ChainModel& chain, double eps,
                                                std::size_t max_iterations = 2'000'000) {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 0.5]");
  const auto n = chain.size();
  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t s = 0; s < n; ++s)
      for (const auto& t : chain.row(s)) y(t.to) += x(static_cast<Eigen::Index>(s)) * chain.probability(t, eps);
    return y;
  };
  StationaryResult r;
  if (n <= kDenseStationaryLimit) {
    r.mu = gth_stationary(chain.dense(eps));
    r.residual = (apply(r.mu) - r.mu).lpNorm<Eigen::Infinity>();
    return r;
  }
  r.dense = false;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  for (r.iterations = 1; r.iterations <= max_iterations; ++r.iterations) {
    Eigen::VectorXd y = apply(x);
    y /= y.sum();
    r.residual = (y - x).lpNorm<Eigen::Infinity>();
    x = std::move(y);
    if (r.residual <= kStationaryResidual) {
      r.mu = std::move(x);
      r.residual = (apply(r.mu) - r.mu).lpNorm<Eigen::Infinity>();
      return r;
    }
  }
  throw std::runtime_error("power iteration did not reach residual " + std::to_string(kStationaryResidual) + " in " +
                           std::to_string(max_iterations) + " iterations");
}

/// Stationary mass on the diagonal states of the given joint actions.
inline double diagonal_mass(const ChainModel& chain, const Eigen::VectorXd& mu, const std::vector<std::uint64_t>& joint) {
  double m = 0.0;
  for (auto a : joint) m += mu(chain.states().diagonal(a));
  return m;
}

/// Graphviz text of the resistance graph; edges of `tree` are drawn bold.
inline void write_dot(std::ostream& os, const ChainModel& chain, const ResistanceGraph& G,
                      const Arborescence* tree = nullptr) {
  os << "digraph resistance {\n";
  for (std::size_t l = 0; l < G.size(); ++l) {
    os << "  n" << l << " [label=\"";
    if (auto x = G.joint(chain, l)) {
      const auto a = chain.game().indexer.decode(*x);
      os << "(";
      for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
      os << ")";
    } else {
      os << "class " << l;
    }
    os << "\"];\n";
  }
  auto in_tree = [&](std::size_t l, std::size_t m) {
    if (!tree) return false;
    for (const auto& e : tree->edges)
      if (e.from == l && e.to == m) return true;
    return false;
  };
  for (std::size_t l = 0; l < G.size(); ++l)
    for (std::size_t m = 0; m < G.size(); ++m) {
      if (l == m || G.weight[l][m] == kInfinity) continue;
      os << "  n" << l << " -> n" << m << " [weight=" << G.weight[l][m] << ", label=\"" << G.weight[l][m]
         << (G.tag[l][m] == EdgeClass::Straight ? " s" : " d") << "\"";
      if (in_tree(l, m)) os << ", penwidth=3";
      os << "];\n";
    }
  os << "}\n";
}

}  // namespace ptz
