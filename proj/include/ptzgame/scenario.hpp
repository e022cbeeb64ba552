#pragma once

// Scenario files, experiment runs with scheduled scene changes, CSV export
// with a metadata sidecar, replay and small-scale certification.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptzgame/chain.hpp"
#include "ptzgame/comms.hpp"
#include "ptzgame/environment.hpp"
#include "ptzgame/error.hpp"
#include "ptzgame/game.hpp"
#include "ptzgame/learner.hpp"

namespace ptz {

using nlohmann::json;

enum class ConstraintRule { Box, Complete };

struct GridSpec {
  std::size_t cols = 6;
  std::size_t rows = 5;
  double cell = 0.1;  // m
  double x0 = 0.0;
  double y0 = 0.0;
  double height = 1.2;
};

struct SensorSpec {
  Vec3 position = Vec3::Zero();
  std::vector<double> pan_deg;
  std::vector<double> tilt_deg;
  std::vector<double> zoom_mm;
  double half_width_mm = 2.4;
  std::size_t cols = 32;
  std::size_t rows = 24;
  ConstraintRule rule = ConstraintRule::Box;
  double pan_step_deg = 5.0;
  double tilt_step_deg = 5.0;
  std::optional<std::size_t> start;  // action index
};

struct EventSpec {
  std::uint64_t round = 0;
  std::vector<std::size_t> cells;
  int value = 0;
};

struct LearnerSpec {
  Schedule mode = Schedule::Homogeneous;
  double epsilon = 0.015;
  double kappa = 0.12;
  std::uint64_t rounds = 2000;
  std::uint64_t seed = 1;
};

struct CertifySpec {
  std::vector<double> epsilons{0.05, 0.02, 0.01, 0.005};
  std::size_t version = 0;
};

struct ScenarioConfig {
  std::string name;
  GridSpec grid;
  std::vector<int> initial;  // y0 source, one value per cell
  std::vector<int> start;    // scene in force at round 0
  std::vector<SensorSpec> sensors;
  RewardConfig reward;
  LearnerSpec learner;
  std::vector<EventSpec> events;
  CertifySpec certify;
  json source;

  std::size_t cells() const noexcept { return grid.cols * grid.rows; }
};

namespace detail {

// Collects every problem found while reading a config.
struct Reader {
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

  const json* child(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "." + key, "missing");
      return nullptr;
    }
    return &*it;
  }

  template <class T>
  void read(const json& obj, const std::string& key, const std::string& path, T& out, bool required = false) {
    const json* v = child(obj, key, path, required);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      fail(path + "." + key, "has the wrong type (" + std::string(v->type_name()) + ")");
    }
  }

  template <class E>
  void read_enum(const json& obj, const std::string& key, const std::string& path, E& out,
                 const std::vector<std::pair<std::string, E>>& names) {
    std::string s;
    const json* v = child(obj, key, path, false);
    if (!v) return;
    if (!v->is_string()) {
      fail(path + "." + key, "expected a string");
      return;
    }
    s = v->get<std::string>();
    for (const auto& [n, e] : names)
      if (n == s) {
        out = e;
        return;
      }
    std::string allowed;
    for (const auto& [n, e] : names) allowed += (allowed.empty() ? "" : ", ") + n;
    fail(path + "." + key, "unknown value '" + s + "' (expected one of " + allowed + ")");
  }

  // Explicit list, or {"min","max","step"} range.
  std::vector<double> values(const json& obj, const std::string& key, const std::string& path) {
    const json* v = child(obj, key, path, true);
    std::vector<double> out;
    if (!v) return out;
    const auto p = path + "." + key;
    if (v->is_array()) {
      try {
        out = v->get<std::vector<double>>();
      } catch (const json::exception&) {
        fail(p, "expected a list of numbers");
      }
    } else if (v->is_object()) {
      double lo = 0, hi = 0, step = 0;
      read(*v, "min", p, lo, true);
      read(*v, "max", p, hi, true);
      read(*v, "step", p, step, true);
      if (!(step > 0)) {
        fail(p + ".step", "must be positive");
        return out;
      }
      if (hi < lo) {
        fail(p, "max is below min");
        return out;
      }
      const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
      for (std::size_t k = 0; k < n; ++k) out.push_back(lo + step * static_cast<double>(k));
    } else {
      fail(p, "expected a list or a {min, max, step} range");
    }
    if (out.empty() && errors.empty()) fail(p, "is empty");
    return out;
  }
};

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Action index of a (pan, tilt, zoom) grid position.
inline std::size_t sensor_action_index(const SensorSpec& s, std::size_t pan, std::size_t tilt, std::size_t zoom) {
  return (pan * s.tilt_deg.size() + tilt) * s.zoom_mm.size() + zoom;
}

inline std::size_t sensor_action_count(const SensorSpec& s) {
  return s.pan_deg.size() * s.tilt_deg.size() * s.zoom_mm.size();
}

/// Constraint map of one sensor: pan and tilt may move by at most one step,
/// zoom is free. The complete rule allows every action.
inline ActionSpace::Neighborhoods sensor_constraints(const SensorSpec& s) {
  const auto P = s.pan_deg.size(), T = s.tilt_deg.size(), Z = s.zoom_mm.size();
  ActionSpace::Neighborhoods c(P * T * Z);
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t z = 0; z < Z; ++z) {
        auto& set = c[sensor_action_index(s, p, t, z)];
        for (std::size_t p2 = 0; p2 < P; ++p2)
          for (std::size_t t2 = 0; t2 < T; ++t2)
            for (std::size_t z2 = 0; z2 < Z; ++z2) {
              const bool ok = s.rule == ConstraintRule::Complete ||
                              (std::abs(s.pan_deg[p2] - s.pan_deg[p]) <= s.pan_step_deg + 1e-9 &&
                               std::abs(s.tilt_deg[t2] - s.tilt_deg[t]) <= s.tilt_step_deg + 1e-9);
              if (ok) set.push_back(sensor_action_index(s, p2, t2, z2));
            }
      }
  return c;
}

inline ActionSpace scenario_action_space(const ScenarioConfig& cfg) {
  std::vector<ActionSpace::Neighborhoods> all;
  for (const auto& s : cfg.sensors) all.push_back(sensor_constraints(s));
  return ActionSpace(std::move(all));
}

inline SensorModel sensor_model(const SensorSpec& s) {
  SensorModel m;
  m.position = s.position;
  m.mount = horizon_mount();
  m.half_width = s.half_width_mm;
  m.cols = s.cols;
  m.rows = s.rows;
  constexpr double deg = std::numbers::pi / 180.0;
  for (auto p : s.pan_deg)
    for (auto t : s.tilt_deg)
      for (auto z : s.zoom_mm) m.poses.push_back({p * deg, t * deg, z});
  return m;
}

inline std::vector<Polygon> grid_polygons(const GridSpec& g, const std::vector<int>& values) {
  std::vector<Polygon> out;
  for (std::size_t r = 0; r < g.rows; ++r)
    for (std::size_t c = 0; c < g.cols; ++c) {
      const double x = g.x0 + g.cell * static_cast<double>(c);
      const double y = g.y0 + g.cell * static_cast<double>(r);
      out.push_back(Polygon::horizontal_rectangle(out.size(), x, y, x + g.cell, y + g.cell, g.height,
                                                  values.at(out.size())));
    }
  return out;
}

/// Parses and validates a scenario. Throws ConfigError listing every problem.
inline ScenarioConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({"parse error at " + detail::line_column(text, e.byte) + ": " + e.what()});
  }
  detail::Reader rd;
  ScenarioConfig cfg;
  cfg.source = root;
  if (!root.is_object()) throw ConfigError({"$: expected an object"});
  rd.read(root, "name", "$", cfg.name);

  if (const json* env = rd.child(root, "environment", "$", true)) {
    const std::string p = "$.environment";
    if (const json* grid = rd.child(*env, "grid", p, true)) {
      const std::string g = p + ".grid";
      rd.read(*grid, "cols", g, cfg.grid.cols, true);
      rd.read(*grid, "rows", g, cfg.grid.rows, true);
      rd.read(*grid, "cell_size", g, cfg.grid.cell);
      rd.read(*grid, "height", g, cfg.grid.height);
      std::vector<double> origin{cfg.grid.x0, cfg.grid.y0};
      rd.read(*grid, "origin", g, origin);
      if (origin.size() != 2)
        rd.fail(g + ".origin", "expected [x, y]");
      else
        cfg.grid.x0 = origin[0], cfg.grid.y0 = origin[1];
      if (cfg.grid.cols == 0 || cfg.grid.rows == 0) rd.fail(g, "needs at least one cell");
      if (!(cfg.grid.cell > 0)) rd.fail(g + ".cell_size", "must be positive");
    }
    const auto n = cfg.cells();
    int fill = 100;
    rd.read(*env, "initial_value", p, fill);
    cfg.initial.assign(n, fill);
    if (env->contains("initial")) {
      rd.read(*env, "initial", p, cfg.initial);
      if (cfg.initial.size() != n)
        rd.fail(p + ".initial", "has " + std::to_string(cfg.initial.size()) + " values for " + std::to_string(n) + " cells");
    }
    cfg.start = cfg.initial;
    if (const json* ov = rd.child(*env, "start_overrides", p, false)) {
      if (!ov->is_array()) rd.fail(p + ".start_overrides", "expected a list");
      for (std::size_t k = 0; ov->is_array() && k < ov->size(); ++k) {
        const auto q = p + ".start_overrides[" + std::to_string(k) + "]";
        std::vector<std::size_t> cells;
        int value = 0;
        rd.read((*ov)[k], "cells", q, cells, true);
        rd.read((*ov)[k], "value", q, value, true);
        for (auto c : cells) {
          if (c >= n)
            rd.fail(q + ".cells", "cell " + std::to_string(c) + " out of range");
          else if (cfg.start.size() == n)
            cfg.start[c] = value;
        }
        if (value < 0 || value > 255) rd.fail(q + ".value", "grayscale must lie in [0, 255]");
      }
    }
    for (std::size_t c = 0; c < cfg.initial.size(); ++c)
      if (cfg.initial[c] < 0 || cfg.initial[c] > 255)
        rd.fail(p + ".initial[" + std::to_string(c) + "]", "grayscale must lie in [0, 255]");
  }

  if (const json* sensors = rd.child(root, "sensors", "$", true)) {
    if (!sensors->is_array() || sensors->empty()) rd.fail("$.sensors", "expected a nonempty list");
    for (std::size_t k = 0; sensors->is_array() && k < sensors->size(); ++k) {
      const auto& js = (*sensors)[k];
      const auto p = "$.sensors[" + std::to_string(k) + "]";
      SensorSpec s;
      std::vector<double> pos;
      rd.read(js, "position", p, pos, true);
      if (pos.size() == 3)
        s.position = Vec3(pos[0], pos[1], pos[2]);
      else if (!pos.empty())
        rd.fail(p + ".position", "expected [x, y, z]");
      s.pan_deg = rd.values(js, "pan_deg", p);
      s.tilt_deg = rd.values(js, "tilt_deg", p);
      s.zoom_mm = rd.values(js, "zoom_mm", p);
      for (auto z : s.zoom_mm)
        if (!(z > 0)) rd.fail(p + ".zoom_mm", "focal lengths must be positive");
      rd.read(js, "half_width_mm", p, s.half_width_mm);
      if (!(s.half_width_mm > 0)) rd.fail(p + ".half_width_mm", "must be positive");
      std::vector<std::size_t> px{s.cols, s.rows};
      rd.read(js, "pixels", p, px);
      if (px.size() != 2 || px[0] == 0 || px[1] == 0)
        rd.fail(p + ".pixels", "expected [cols, rows] with positive entries");
      else
        s.cols = px[0], s.rows = px[1];
      if (const json* c = rd.child(js, "constraint", p, false)) {
        const auto q = p + ".constraint";
        rd.read_enum(*c, "rule", q, s.rule, {{"box", ConstraintRule::Box}, {"complete", ConstraintRule::Complete}});
        rd.read(*c, "pan_step_deg", q, s.pan_step_deg);
        rd.read(*c, "tilt_step_deg", q, s.tilt_step_deg);
      }
      if (const json* st = rd.child(js, "start", p, false)) {
        const auto q = p + ".start";
        double pan = 0, tilt = 0, zoom = 0;
        rd.read(*st, "pan_deg", q, pan, true);
        rd.read(*st, "tilt_deg", q, tilt, true);
        rd.read(*st, "zoom_mm", q, zoom, true);
        auto locate = [](const std::vector<double>& v, double x) -> std::optional<std::size_t> {
          for (std::size_t k = 0; k < v.size(); ++k)
            if (std::abs(v[k] - x) < 1e-9) return k;
          return std::nullopt;
        };
        auto pi = locate(s.pan_deg, pan), ti = locate(s.tilt_deg, tilt), zi = locate(s.zoom_mm, zoom);
        if (pi && ti && zi)
          s.start = sensor_action_index(s, *pi, *ti, *zi);
        else if (rd.errors.empty())
          rd.fail(q, "is not one of the sensor's actions");
      }
      cfg.sensors.push_back(std::move(s));
    }
  }

  if (const json* r = rd.child(root, "reward", "$", false)) {
    const std::string p = "$.reward";
    auto& R = cfg.reward;
    rd.read_enum(*r, "info", p, R.metric, {{"change-count", InfoMetric::ChangeCount}, {"entropy", InfoMetric::Entropy}});
    rd.read(*r, "threshold", p, R.threshold);
    rd.read(*r, "gamma", p, R.gamma);
    rd.read_enum(*r, "variant", p, R.variant, {{"experiment", RewardVariant::Experiment}, {"product", RewardVariant::Product}});
    rd.read_enum(*r, "region_rule", p, R.rule, {{"max", RegionRule::Max}, {"concave-sum", RegionRule::ConcaveSum}});
    rd.read_enum(*r, "concave", p, R.concave, {{"sqrt", Concave::Sqrt}, {"log1p", Concave::Log1p}});
    rd.read_enum(*r, "qual", p, R.qual, {{"identity", QualFunction::Identity}, {"sqrt", QualFunction::Sqrt}});
    if (R.threshold < 0) rd.fail(p + ".threshold", "must be nonnegative");
    if (!(R.gamma > 0)) rd.fail(p + ".gamma", "must be positive");
  }

  if (const json* l = rd.child(root, "learner", "$", true)) {
    const std::string p = "$.learner";
    auto& L = cfg.learner;
    rd.read_enum(*l, "mode", p, L.mode, {{"homogeneous", Schedule::Homogeneous}, {"inhomogeneous", Schedule::Inhomogeneous}});
    rd.read(*l, "epsilon", p, L.epsilon);
    rd.read(*l, "kappa", p, L.kappa, true);
    rd.read(*l, "rounds", p, L.rounds, true);
    rd.read(*l, "seed", p, L.seed);
    if (L.mode == Schedule::Homogeneous && !(L.epsilon > 0 && L.epsilon <= 0.5))
      rd.fail(p + ".epsilon", "must lie in (0, 0.5], got " + format_real(L.epsilon));
    if (!(L.kappa >= 0 && L.kappa <= 0.5)) rd.fail(p + ".kappa", "must lie in [0, 0.5], got " + format_real(L.kappa));
    if (L.rounds < 2) rd.fail(p + ".rounds", "must be at least 2");
  }

  if (const json* ev = rd.child(root, "events", "$", false)) {
    if (!ev->is_array()) rd.fail("$.events", "expected a list");
    for (std::size_t k = 0; ev->is_array() && k < ev->size(); ++k) {
      const auto p = "$.events[" + std::to_string(k) + "]";
      EventSpec e;
      rd.read((*ev)[k], "round", p, e.round, true);
      rd.read((*ev)[k], "cells", p, e.cells, true);
      rd.read((*ev)[k], "value", p, e.value, true);
      for (auto c : e.cells)
        if (c >= cfg.cells()) rd.fail(p + ".cells", "cell " + std::to_string(c) + " out of range");
      if (e.value < 0 || e.value > 255) rd.fail(p + ".value", "grayscale must lie in [0, 255]");
      if (e.round < 2) rd.fail(p + ".round", "events apply from round 2 on");
      cfg.events.push_back(std::move(e));
    }
    std::stable_sort(cfg.events.begin(), cfg.events.end(),
                     [](const EventSpec& a, const EventSpec& b) { return a.round < b.round; });
  }

  if (const json* c = rd.child(root, "certify", "$", false)) {
    rd.read(*c, "epsilons", "$.certify", cfg.certify.epsilons);
    rd.read(*c, "version", "$.certify", cfg.certify.version);
    for (auto e : cfg.certify.epsilons)
      if (!(e > 0 && e <= 0.5)) rd.fail("$.certify.epsilons", "every epsilon must lie in (0, 0.5]");
    if (cfg.certify.version > cfg.events.size()) rd.fail("$.certify.version", "no such scene version");
  }

  // Structural checks on the derived game, only when the parts parsed.
  if (rd.errors.empty()) {
    const auto space = scenario_action_space(cfg);
    for (const auto& v : validate_action_space(space))
      rd.fail("$.sensors[" + std::to_string(v.player) + "]", std::string("action space violates ") + to_string(v.item) +
                                                                  ": " + v.message);
    if (space.max_feasible() >= 3) {
      const auto kb = kappa_bounds(space);
      if (cfg.learner.mode == Schedule::Inhomogeneous && !kb.contains(cfg.learner.kappa))
        rd.fail("$.learner.kappa", "must lie in (1/(C-1), 1/2] = (" + format_real(kb.lower) + ", 0.5] for C = " +
                                       std::to_string(kb.C) + ", got " + format_real(cfg.learner.kappa));
    }
  }
  if (!rd.errors.empty()) throw ConfigError(rd.errors);
  return cfg;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(cfg.source.dump());
  return os.str();
}

/// Everything derived from a config that a run needs.
struct Scenario {
  ScenarioConfig config;
  std::shared_ptr<const Environment> env;
  ActionSpace space;
  CommGraph graph;
  Diameters diameters;
  double scale = 1.0;
  double deviation = 0.0;  // before scaling; a bound when not exhaustive
  bool exhaustive_scale = true;
  JointAction start;  // kNullAction where the start is drawn at random

  const RewardTable& table(std::size_t version) const { return env->table(version); }
};

inline std::shared_ptr<const Environment> build_environment(const ScenarioConfig& cfg) {
  std::vector<SensorModel> sensors;
  for (const auto& s : cfg.sensors) sensors.push_back(sensor_model(s));
  SceneState scene;
  scene.initial = cfg.initial;
  scene.start = cfg.start;
  for (const auto& e : cfg.events) {
    ChangeEvent ce;
    ce.round = e.round;
    for (auto c : e.cells) ce.values[c] = e.value;
    scene.events.push_back(std::move(ce));
  }
  return std::make_shared<const Environment>(grid_polygons(cfg.grid, cfg.initial), std::move(sensors), std::move(scene),
                                              cfg.reward);
}

/// Builds the environment, communication graph and the scale factor that
/// keeps every unilateral utility change at most 0.49 across all scene
/// versions.
inline Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t guard = kJointGuard) {
  Scenario s;
  s.config = cfg;
  s.env = build_environment(cfg);
  s.space = scenario_action_space(cfg);
  s.graph = build_comm_graph(*s.env);
  s.diameters = compute_D(s.space);
  const auto count = s.space.indexer();
  if (!count.overflowed() && count.size() <= guard) {
    for (std::size_t v = 0; v < s.env->versions(); ++v)
      s.deviation = std::max(s.deviation, max_unilateral_deviation(tabulate(
                                              game_from_table(s.env->table(v), s.space.counts(), s.space), guard)));
  } else {
    s.exhaustive_scale = false;
    s.deviation = s.env->utility_bound();
  }
  s.scale = scale_factor_for(s.deviation);
  s.start.assign(cfg.sensors.size(), kNullAction);
  for (std::size_t i = 0; i < cfg.sensors.size(); ++i)
    if (cfg.sensors[i].start) s.start[i] = *cfg.sensors[i].start;
  return s;
}

inline LearnerParams learner_params(const Scenario& s) {
  LearnerParams p;
  p.mode = s.config.learner.mode;
  p.epsilon = s.config.learner.epsilon;
  p.kappa = s.config.learner.kappa;
  p.players = s.space.players();
  p.D = s.diameters.D;
  return p;
}

struct WindowSummary {
  std::uint64_t begin = 0;  // first round of the scene version
  std::uint64_t end = 0;    // one past the last
  double mean = 0.0;
  double final_quarter_mean = 0.0;
  double best = 0.0;                   // best W logged in the window
  std::optional<double> optimum;       // exhaustive max of W, scaled
  bool optimum_exhaustive = false;
};

struct RunSummary {
  std::vector<WindowSummary> windows;
  double best = 0.0;
  JointAction best_action;
  double final_occupancy = 0.0;  // share of the final 10% spent at best_action
};

struct Experiment {
  RunLog log;
  RunSummary summary;
  double scale = 1.0;
  std::uint64_t seed = 0;
};

/// Mean, final-quarter mean and best W per scene version, and the occupancy
/// of the best action of the last version during the final 10% of rounds.
inline RunSummary summarize(const Scenario& s, const RunLog& log, bool with_optimum,
                            std::uint64_t optimum_guard = 100'000'000) {
  RunSummary out;
  const auto R = static_cast<std::uint64_t>(log.rows.size());
  std::vector<std::uint64_t> bounds{0};
  for (const auto& e : s.config.events)
    if (e.round < R) bounds.push_back(e.round);
  bounds.push_back(R);
  for (std::size_t w = 0; w + 1 < bounds.size(); ++w) {
    WindowSummary ws;
    ws.begin = bounds[w];
    ws.end = bounds[w + 1];
    if (ws.end <= ws.begin) continue;
    const auto q0 = ws.end - (ws.end - ws.begin) / 4;
    double sum = 0, qsum = 0;
    ws.best = log.rows[ws.begin].objective;
    for (auto k = ws.begin; k < ws.end; ++k) {
      const double W = log.rows[k].objective;
      sum += W;
      if (k >= q0) qsum += W;
      ws.best = std::max(ws.best, W);
    }
    ws.mean = sum / static_cast<double>(ws.end - ws.begin);
    ws.final_quarter_mean = qsum / static_cast<double>(ws.end - q0);
    if (with_optimum) {
      try {
        const auto& t = s.env->table_at_round(ws.begin);
        ws.optimum = s.scale * exhaustive_optimum(t, s.space.counts(), optimum_guard).first;
        ws.optimum_exhaustive = true;
      } catch (const GuardExceeded&) {
        ws.optimum = ws.best;
      }
    }
    out.windows.push_back(ws);
  }
  const auto last = out.windows.back();
  out.best = log.rows[last.begin].objective;
  out.best_action = log.rows[last.begin].action;
  for (auto k = last.begin; k < last.end; ++k)
    if (log.rows[k].objective > out.best) {
      out.best = log.rows[k].objective;
      out.best_action = log.rows[k].action;
    }
  const auto tail = R - R / 10;
  std::uint64_t hits = 0;
  for (auto k = tail; k < R; ++k) hits += log.rows[k].action == out.best_action;
  out.final_occupancy = static_cast<double>(hits) / static_cast<double>(R - tail);
  return out;
}

inline Experiment run_experiment(const Scenario& s, std::optional<std::uint64_t> seed = std::nullopt,
                                 bool with_optimum = false) {
  Experiment ex;
  ex.seed = seed.value_or(s.config.learner.seed);
  ex.scale = s.scale;
  EnvironmentOracle oracle{s.env.get(), &s.graph, s.scale};
  ex.log = run(s.space, oracle, learner_params(s), s.config.learner.rounds, ex.seed, s.start);
  ex.summary = summarize(s, ex.log, with_optimum);
  return ex;
}

inline void write_summary(std::ostream& os, const Scenario& s, const Experiment& ex) {
  os << "scenario " << (s.config.name.empty() ? "(unnamed)" : s.config.name) << "\n";
  os << "sensors " << s.space.players() << ", cells " << s.config.cells() << ", D " << s.diameters.D
     << ", comm edges " << s.graph.edge_count() << "\n";
  os << "seed " << ex.seed << ", rounds " << ex.log.rows.size() << ", scale " << format_real(ex.scale)
     << (s.exhaustive_scale ? " (exhaustive)" : " (bound)") << "\n";
  for (const auto& w : ex.summary.windows) {
    os << "rounds [" << w.begin << ", " << w.end << "): mean W " << format_real(w.mean) << ", final quarter "
       << format_real(w.final_quarter_mean) << ", best " << format_real(w.best);
    if (w.optimum) os << ", optimum " << format_real(*w.optimum) << (w.optimum_exhaustive ? "" : " (sampled)");
    os << "\n";
  }
  os << "best W " << format_real(ex.summary.best) << " at (";
  for (std::size_t i = 0; i < ex.summary.best_action.size(); ++i) os << (i ? "," : "") << ex.summary.best_action[i];
  os << "), final 10% occupancy " << format_real(ex.summary.final_occupancy) << "\n";
}

/// Writes the CSV and `<path>.meta.json` with the config, seed, scale and
/// config hash.
inline void export_csv(const Scenario& s, const Experiment& ex, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, ex.log);
    if (!out) throw std::runtime_error("write failed: " + path.string());
  }
  json meta;
  meta["config"] = s.config.source;
  meta["config_hash"] = config_hash(s.config);
  meta["seed"] = ex.seed;
  meta["scale"] = ex.scale;
  meta["rounds"] = ex.log.rows.size();
  std::ofstream m(path.string() + ".meta.json", std::ios::binary);
  if (!m) throw std::runtime_error("cannot write " + path.string() + ".meta.json");
  m << meta.dump(2) << "\n";
  if (!m) throw std::runtime_error("write failed: " + path.string() + ".meta.json");
}

struct ReplayReport {
  std::size_t rows = 0;
  std::size_t mismatches = 0;
  std::optional<std::size_t> first_mismatch;  // row index
  bool ok() const noexcept { return mismatches == 0; }
};

/// Recomputes W from every logged joint action and compares the printed
/// values with the W column.
inline ReplayReport replay(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot read " + csv.string());
  const RunLog log = read_csv(in);
  std::ifstream m(csv.string() + ".meta.json");
  if (!m) throw std::runtime_error("missing metadata sidecar " + csv.string() + ".meta.json");
  const json meta = json::parse(m);
  const auto cfg = parse_config(meta.at("config").dump());
  const double scale = meta.at("scale").get<double>();
  const auto env = build_environment(cfg);
  ReplayReport r;
  r.rows = log.rows.size();
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const auto& row = log.rows[k];
    const double W = objective_value(env->table_at_round(row.round), row.action, scale);
    if (format_real(W) != format_real(row.objective)) {
      ++r.mismatches;
      if (!r.first_mismatch) r.first_mismatch = k;
    }
  }
  return r;
}

struct CertifyReport {
  std::vector<JointAction> argmax;
  std::vector<JointAction> stable;
  bool contained = false;
  bool all_tied = false;
  std::vector<std::pair<double, double>> mass;  // (ε, stationary mass on diag(argmax))
  std::size_t states = 0;
  double scale = 1.0;
  KappaBounds kappa;
};

/// Chain certification of a small scenario: reduces one scene version to a
/// utility table and compares the stochastically stable set with argmax W.
inline CertifyReport certify(const Scenario& s) {
  const auto kb = kappa_bounds(s.space);
  if (!kb.contains(s.config.learner.kappa))
    throw ConfigError({"$.learner.kappa: certification needs kappa in (" + format_real(kb.lower) + ", 0.5] for C = " +
                       std::to_string(kb.C) + ", got " + format_real(s.config.learner.kappa)});
  const auto& t = s.env->table(s.config.certify.version);
  std::optional<ChainModel> built;
  try {
    built.emplace(tabulate(game_from_table(t, s.space.counts(), s.space, s.scale), kChainStateGuard),
                  s.config.learner.kappa);
  } catch (const GuardExceeded& e) {
    throw GuardExceeded(std::string(e.what()) + " (certification needs a smaller scenario: fewer sensors or actions)");
  }
  const ChainModel& chain = *built;
  const TabularGame& g = chain.game();
  CertifyReport r;
  r.kappa = kb;
  r.scale = s.scale;
  r.states = chain.size();
  const auto best = potential_maximizers(g, 1e-12);
  const auto sp = stochastic_potentials(chain);
  const auto stable = stochastically_stable_states(chain, sp);
  for (auto x : best) r.argmax.push_back(g.indexer.decode(x));
  for (auto x : stable) r.stable.push_back(g.indexer.decode(x));
  r.contained = std::includes(best.begin(), best.end(), stable.begin(), stable.end());
  const double lo = *std::min_element(sp.potential.begin(), sp.potential.end());
  const double hi = *std::max_element(sp.potential.begin(), sp.potential.end());
  r.all_tied = hi - lo <= kPotentialTieTolerance;
  for (auto e : s.config.certify.epsilons) {
    const auto st = stationary_distribution(chain, e);
    r.mass.emplace_back(e, diagonal_mass(chain, st.mu, best));
  }
  return r;
}

inline void write_certify_report(std::ostream& os, const CertifyReport& r) {
  auto list = [&](const std::vector<JointAction>& v) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      os << (k ? " " : "") << "(";
      for (std::size_t i = 0; i < v[k].size(); ++i) os << (i ? "," : "") << v[k][i];
      os << ")";
    }
  };
  os << "states " << r.states << ", scale " << format_real(r.scale) << ", kappa bounds (" << format_real(r.kappa.lower)
     << ", 0.5], C " << r.kappa.C << "\n";
  os << "argmax W: ";
  list(r.argmax);
  os << "\nstable:   ";
  list(r.stable);
  os << "\ncontained: " << (r.contained ? "yes" : "no") << (r.all_tied ? " (all potentials tied)" : "") << "\n";
  for (const auto& [e, m] : r.mass) os << "eps " << format_real(e) << ": mass on argmax " << format_real(m) << "\n";
}

}  // namespace ptz
