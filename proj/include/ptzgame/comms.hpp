#pragma once

// Neighbor graph of sensors that can see a common polygon, and the one-hop
// message round that lets every sensor compute its marginal utility from its
// own rewards and what its neighbors report.

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptzgame/environment.hpp"
#include "ptzgame/learner.hpp"

namespace ptz {

class CommGraph {
 public:
  CommGraph() = default;
  explicit CommGraph(std::size_t n) : adj_(n) {}

  std::size_t size() const noexcept { return adj_.size(); }

  void connect(std::size_t i, std::size_t k) {
    if (i == k) return;
    auto add = [](std::vector<std::size_t>& v, std::size_t x) {
      auto it = std::lower_bound(v.begin(), v.end(), x);
      if (it == v.end() || *it != x) v.insert(it, x);
    };
    add(adj_.at(i), k);
    add(adj_.at(k), i);
  }

  bool adjacent(std::size_t i, std::size_t k) const {
    const auto& v = adj_.at(i);
    return std::binary_search(v.begin(), v.end(), k);
  }

  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adj_.at(i); }

  std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& v : adj_) e += v.size();
    return e / 2;
  }

 private:
  std::vector<std::vector<std::size_t>> adj_;
};

/// Edge (i, k) iff some action of i and some action of k see a common polygon.
inline CommGraph build_comm_graph(const std::vector<std::vector<VisibilityMap>>& maps, std::size_t polygons) {
  const auto n = maps.size();
  std::vector<std::vector<char>> reach(n, std::vector<char>(polygons, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& m : maps[i])
      for (auto j : m.visible_set()) reach[i][j] = 1;
  CommGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = 0; j < polygons; ++j)
        if (reach[i][j] && reach[k][j]) {
          g.connect(i, k);
          break;
        }
  return g;
}

inline CommGraph build_comm_graph(const Environment& env) {
  std::vector<std::vector<VisibilityMap>> maps(env.sensors().size());
  for (std::size_t i = 0; i < maps.size(); ++i)
    for (std::size_t a = 0; a < env.sensors()[i].action_count(); ++a) maps[i].push_back(env.visibility(i, a));
  return build_comm_graph(maps, env.polygons().size());
}

/// Same test from reward tables: a polygon counts as seen when it has an entry.
inline CommGraph build_comm_graph(const RewardTable& t) {
  const auto n = t.sensors();
  std::vector<std::vector<char>> reach(n, std::vector<char>(t.polygons, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& row : t.entries[i])
      for (const auto& [j, w] : row) reach[i][j] = 1;
  CommGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = 0; j < t.polygons; ++j)
        if (reach[i][j] && reach[k][j]) {
          g.connect(i, k);
          break;
        }
  return g;
}

/// What sensor `sender` broadcasts: W_sender,j for every polygon it sees.
struct UtilityMessage {
  std::size_t sender = 0;
  RewardTable::Entries entries;
};

/// Inbox keyed by sender.
using Inbox = std::map<std::size_t, UtilityMessage>;

/// U_i from i's own entries and its neighbors' messages only. Throws when a
/// neighbor's message is missing.
inline double local_utility(std::size_t i, const RewardTable::Entries& own, const std::vector<std::size_t>& neighbors,
                            const Inbox& inbox, RegionRule rule, Concave h = Concave::Sqrt, double scale = 1.0) {
  for (auto k : neighbors)
    if (!inbox.count(k))
      throw std::runtime_error("sensor " + std::to_string(i) + " has no message from neighbor " + std::to_string(k));
  double u = 0.0;
  std::vector<double> others;
  for (const auto& [j, w] : own) {
    others.clear();
    for (auto k : neighbors)
      for (const auto& [jj, ww] : inbox.at(k).entries)
        if (jj == j) others.push_back(ww);
    const double without = region_reward(others, rule, h);
    others.push_back(w);
    u += region_reward(others, rule, h) - without;
  }
  return scale * u;
}

/// One logged message.
struct MessageRecord {
  std::uint64_t round = 0;
  std::size_t sender = 0;
  std::size_t receiver = 0;
  RewardTable::Entries payload;
};

inline void write_message_csv(std::ostream& os, const std::vector<MessageRecord>& log) {
  os << "round,sender,receiver,payload\n";
  for (const auto& m : log) {
    os << m.round << "," << m.sender << "," << m.receiver << ",";
    for (std::size_t k = 0; k < m.payload.size(); ++k)
      os << (k ? ";" : "") << m.payload[k].first << ":" << format_real(m.payload[k].second);
    os << "\n";
  }
}

/// Synchronous round: every sensor sends its message to its neighbors, then
/// each computes its own utility from what it received.
inline std::vector<double> round_exchange(const RewardTable& t, const JointAction& a, const CommGraph& g,
                                          double scale = 1.0, std::vector<MessageRecord>* log = nullptr,
                                          std::uint64_t round = 0) {
  const auto n = t.sensors();
  static const RewardTable::Entries kNothing;
  std::vector<UtilityMessage> outgoing(n);
  for (std::size_t i = 0; i < n; ++i) outgoing[i] = {i, a[i] == kNullAction ? kNothing : t.at(i, a[i])};
  std::vector<Inbox> inbox(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto k : g.neighbors(i)) {
      inbox[k][i] = outgoing[i];
      if (log) log->push_back({round, i, k, outgoing[i].entries});
    }
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = local_utility(i, outgoing[i].entries, g.neighbors(i), inbox[i], t.rule, t.concave, scale);
  return u;
}

/// Learner oracle that computes utilities through the message round and W
/// centrally, reading the reward table in force at each round.
struct EnvironmentOracle {
  const Environment* env;
  const CommGraph* graph;
  double scale = 1.0;

  Evaluation operator()(std::uint64_t round, const JointAction& a) const {
    const auto& t = env->table_at_round(round);
    return {round_exchange(t, a, *graph, scale), objective_value(t, a, scale)};
  }
};

}  // namespace ptz
