#pragma once

// Geometry and photometry of the monitored scene: planar polygons, PTZ pose
// tables, per-pixel ray casting with nearest-hit occlusion, grayscale renders
// and the reward hierarchy W_ij -> W_j -> W.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptzgame/game.hpp"

namespace ptz {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kGeometryTolerance = 1e-9;
inline constexpr double kParallelTolerance = 1e-12;

/// Planar convex polygon {q : n.q = d, A q <= b} carrying one grayscale value.
struct Polygon {
  std::size_t id = 0;
  Vec3 normal = Vec3::UnitZ();  // unit
  double offset = 0.0;          // n.q = offset
  Eigen::Matrix<double, Eigen::Dynamic, 3> A;
  Eigen::VectorXd b;
  std::vector<Vec3> vertices;
  int value = 0;

  bool contains(const Vec3& q, double tol = kGeometryTolerance) const {
    if (std::abs(normal.dot(q) - offset) > tol) return false;
    for (Eigen::Index k = 0; k < A.rows(); ++k)
      if (A.row(k).dot(q) > b(k) + tol) return false;
    return true;
  }

  double area() const {
    Vec3 acc = Vec3::Zero();
    for (std::size_t k = 0; k < vertices.size(); ++k) acc += vertices[k].cross(vertices[(k + 1) % vertices.size()]);
    return 0.5 * std::abs(acc.dot(normal));
  }

  Vec3 centroid() const {
    Vec3 c = Vec3::Zero();
    for (const auto& v : vertices) c += v;
    return c / static_cast<double>(vertices.size());
  }

  /// Same polygon moved by t.
  Polygon translated(const Vec3& t) const {
    Polygon p = *this;
    p.offset += normal.dot(t);
    for (Eigen::Index k = 0; k < A.rows(); ++k) p.b(k) += A.row(k).dot(t);
    for (auto& v : p.vertices) v += t;
    return p;
  }

  /// Builds the half-space description from vertices listed in order around
  /// a convex face. Throws on fewer than three vertices, zero area, or
  /// non-coplanar input.
  static Polygon from_convex_vertices(std::size_t id, std::vector<Vec3> vertices, int value) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    Vec3 n = Vec3::Zero();
    for (std::size_t k = 0; k < vertices.size(); ++k) n += vertices[k].cross(vertices[(k + 1) % vertices.size()]);
    const double norm = n.norm();
    if (norm < kGeometryTolerance) throw std::invalid_argument("polygon " + std::to_string(id) + " is degenerate");
    n /= norm;
    Polygon p;
    p.id = id;
    p.normal = n;
    p.offset = n.dot(vertices[0]);
    p.value = value;
    for (const auto& v : vertices)
      if (std::abs(n.dot(v) - p.offset) > kGeometryTolerance)
        throw std::invalid_argument("polygon " + std::to_string(id) + " vertices are not coplanar");
    const auto m = static_cast<Eigen::Index>(vertices.size());
    p.A.resize(m, 3);
    p.b.resize(m);
    const Vec3 centre = [&] {
      Vec3 c = Vec3::Zero();
      for (const auto& v : vertices) c += v;
      return Vec3(c / static_cast<double>(vertices.size()));
    }();
    for (Eigen::Index k = 0; k < m; ++k) {
      const Vec3& u = vertices[static_cast<std::size_t>(k)];
      const Vec3& w = vertices[static_cast<std::size_t>((k + 1) % m)];
      Vec3 out = (w - u).cross(n);
      if (out.dot(centre - u) > 0) out = -out;
      out.normalize();
      p.A.row(k) = out.transpose();
      p.b(k) = out.dot(u);
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto i = static_cast<std::size_t>(k), j = static_cast<std::size_t>((k + 1) % m),
                 l = static_cast<std::size_t>((k + 2) % m);
      const double turn = (vertices[j] - vertices[i]).cross(vertices[l] - vertices[j]).dot(n);
      if (p.A.row(k).dot(centre) > p.b(k) - kGeometryTolerance || turn < -kGeometryTolerance)
        throw std::invalid_argument("polygon " + std::to_string(id) + " is not convex");
    }
    p.vertices = std::move(vertices);
    return p;
  }

  /// Axis-aligned rectangle [x0,x1]x[y0,y1] in the plane z = height.
  static Polygon horizontal_rectangle(std::size_t id, double x0, double y0, double x1, double y1, double height,
                                      int value) {
    return from_convex_vertices(id, {Vec3(x0, y0, height), Vec3(x1, y0, height), Vec3(x1, y1, height), Vec3(x0, y1, height)},
                                value);
  }
};

inline Mat3 rotation_x(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix(); }
inline Mat3 rotation_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

/// Mount that points the optical axis (sensor +z) along world +y, so that
/// the tilt angle reads as elevation above the horizon.
inline Mat3 horizon_mount() { return rotation_x(-std::numbers::pi / 2); }

/// One pan/tilt/zoom setting. Angles in radians, focal length in mm.
struct Pose {
  double pan = 0.0;
  double tilt = 0.0;
  double focal = 1.0;
};

/// A PTZ camera: fixed position, a table of poses indexed by action, and a
/// pixel grid. Pixel rays pass through pixel centres of an image plane at
/// distance `focal`. `half_width` is measured along the image diagonal, so
/// the view cone circumscribes the pixel grid.
struct SensorModel {
  Vec3 position = Vec3::Zero();
  Mat3 mount = Mat3::Identity();
  double half_width = 2.4;  // mm
  std::size_t cols = 32;
  std::size_t rows = 24;
  std::vector<Pose> poses;

  std::size_t pixel_count() const noexcept { return cols * rows; }
  std::size_t action_count() const noexcept { return poses.size(); }

  Mat3 rotation(std::size_t a) const {
    const auto& p = poses.at(a);
    return rotation_z(p.pan) * rotation_x(p.tilt) * mount;
  }

  /// Maximal view half-angle for action a.
  double beta_bar(std::size_t a) const { return std::atan(half_width / poses.at(a).focal); }

  /// Unit ray through the centre of pixel l (row-major), in the sensor frame.
  Vec3 ray(std::size_t a, std::size_t l) const {
    const double diag = std::hypot(static_cast<double>(cols), static_cast<double>(rows));
    const double half_x = half_width * static_cast<double>(cols) / diag;
    const double half_height = half_width * static_cast<double>(rows) / diag;
    const auto r = l / cols;
    const auto c = l % cols;
    const double x = half_x * ((2.0 * static_cast<double>(c) + 1.0) / static_cast<double>(cols) - 1.0);
    const double y = half_height * ((2.0 * static_cast<double>(r) + 1.0) / static_cast<double>(rows) - 1.0);
    return Vec3(x, y, poses.at(a).focal).normalized();
  }

  /// atan(|b_xy| / b_z) <= beta_bar for a sensor-frame direction b.
  bool in_view_cone(std::size_t a, const Vec3& b) const {
    if (b.z() <= 0) return false;
    return std::atan2(std::hypot(b.x(), b.y()), b.z()) <= beta_bar(a) + kGeometryTolerance;
  }

  SensorModel translated(const Vec3& t) const {
    SensorModel s = *this;
    s.position += t;
    return s;
  }
};

/// α with p + α R ray on the polygon, when positive and inside it.
inline std::optional<double> ray_polygon_alpha(const Vec3& position, const Mat3& rotation, const Vec3& ray,
                                               const Polygon& poly) {
  const Vec3 dir = rotation * ray;
  const double denom = poly.normal.dot(dir);
  if (std::abs(denom) < kParallelTolerance) return std::nullopt;
  const double alpha = (poly.offset - poly.normal.dot(position)) / denom;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) return std::nullopt;
  const Vec3 q = position + alpha * dir;
  for (Eigen::Index k = 0; k < poly.A.rows(); ++k)
    if (poly.A.row(k).dot(q) > poly.b(k) + kGeometryTolerance) return std::nullopt;
  return alpha;
}

inline std::optional<double> ray_polygon_alpha(const SensorModel& s, std::size_t a, std::size_t pixel,
                                               const Polygon& poly) {
  return ray_polygon_alpha(s.position, s.rotation(a), s.ray(a, pixel), poly);
}

inline constexpr long kOutsideCone = -2;
inline constexpr long kNoHit = -1;

/// Pixel sets F_ij for one sensor action, plus the owner of every pixel.
struct VisibilityMap {
  std::vector<long> owner;                      // polygon index, kNoHit or kOutsideCone
  std::vector<std::vector<std::size_t>> pixels;  // [polygon] -> pixel indices

  std::size_t count(std::size_t j) const { return pixels.at(j).size(); }
  bool visible(std::size_t j) const { return !pixels.at(j).empty(); }

  std::vector<std::size_t> visible_set() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < pixels.size(); ++j)
      if (!pixels[j].empty()) out.push_back(j);
    return out;
  }

  std::size_t in_cone() const {
    return static_cast<std::size_t>(std::count_if(owner.begin(), owner.end(), [](long o) { return o != kOutsideCone; }));
  }
  std::size_t covered() const {
    return static_cast<std::size_t>(std::count_if(owner.begin(), owner.end(), [](long o) { return o >= 0; }));
  }
};

/// Each in-cone pixel belongs to the polygon with the smallest α along its ray.
inline VisibilityMap build_visibility_map(const SensorModel& s, std::size_t a, const std::vector<Polygon>& polygons) {
  VisibilityMap m;
  const auto S = s.pixel_count();
  m.owner.assign(S, kOutsideCone);
  m.pixels.assign(polygons.size(), {});
  const Mat3 R = s.rotation(a);
  for (std::size_t l = 0; l < S; ++l) {
    const Vec3 ray = s.ray(a, l);
    if (!s.in_view_cone(a, ray)) continue;
    double best = std::numeric_limits<double>::infinity();
    long who = kNoHit;
    for (std::size_t j = 0; j < polygons.size(); ++j) {
      auto alpha = ray_polygon_alpha(s.position, R, ray, polygons[j]);
      if (alpha && *alpha < best) {
        best = *alpha;
        who = static_cast<long>(j);
      }
    }
    m.owner[l] = who;
    if (who >= 0) m.pixels[static_cast<std::size_t>(who)].push_back(l);
  }
  return m;
}

using Image = std::vector<std::uint8_t>;

/// Pixel values for the given per-polygon grayscale values; background is 0.
inline Image render(const VisibilityMap& map, const std::vector<int>& values) {
  Image img(map.owner.size(), 0);
  for (std::size_t l = 0; l < img.size(); ++l)
    if (map.owner[l] >= 0) img[l] = static_cast<std::uint8_t>(values.at(static_cast<std::size_t>(map.owner[l])));
  return img;
}

/// Binary PGM of a render, for debugging.
inline void write_pgm(std::ostream& os, const Image& img, std::size_t cols, std::size_t rows) {
  if (img.size() != cols * rows) throw std::invalid_argument("image size does not match its dimensions");
  os << "P5\n" << cols << " " << rows << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

/// Number of pixels in F_ij whose value moved strictly more than the threshold.
inline std::vector<double> info_change(const VisibilityMap& map, const Image& current, const Image* initial,
                                       double threshold) {
  if (!initial) throw std::invalid_argument("no stored initial image for this action");
  if (initial->size() != current.size()) throw std::invalid_argument("initial image has the wrong size");
  std::vector<double> out(map.pixels.size(), 0.0);
  for (std::size_t j = 0; j < map.pixels.size(); ++j)
    for (auto l : map.pixels[j])
      if (std::abs(static_cast<int>(current[l]) - static_cast<int>((*initial)[l])) > threshold) out[j] += 1.0;
  return out;
}

/// Shannon entropy in bits of the 256-bin histogram of the given values.
inline double info_entropy(const std::vector<std::uint8_t>& values) {
  if (values.empty()) throw std::invalid_argument("entropy of an empty pixel set");
  std::array<std::size_t, 256> hist{};
  for (auto v : values) ++hist[v];
  const double n = static_cast<double>(values.size());
  double h = 0.0;
  for (auto c : hist)
    if (c) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log2(p);
    }
  return h;
}

enum class QualFunction { Identity, Sqrt };

inline double qual_fraction(std::size_t pixels, std::size_t total, QualFunction f = QualFunction::Identity) {
  if (total == 0) throw std::invalid_argument("sensor has no pixels");
  const double x = static_cast<double>(pixels) / static_cast<double>(total);
  return f == QualFunction::Sqrt ? std::sqrt(x) : x;
}

enum class RewardVariant { Product, Experiment };

inline constexpr double kDefaultGamma = 0.015;

/// W_ij from information and quality. The experiment variant ignores quality
/// and floors visible regions at γ.
inline double reward_wij(double info, double qual, bool visible, RewardVariant variant, double gamma = kDefaultGamma) {
  if (info < 0 || qual < 0) throw std::invalid_argument("reward inputs must be nonnegative");
  if (!visible) return 0.0;
  if (variant == RewardVariant::Product) return info * qual;
  return 2.0 * info > gamma ? 2.0 * info : gamma;
}

enum class RegionRule { Max, ConcaveSum };
enum class Concave { Sqrt, Log1p };

inline double apply_concave(Concave h, double x) { return h == Concave::Sqrt ? std::sqrt(x) : std::log1p(x); }

/// W_j from the values of the sensors currently capturing r_j.
inline double region_reward(const std::vector<double>& values, RegionRule rule, Concave h = Concave::Sqrt) {
  if (values.empty()) return 0.0;
  if (rule == RegionRule::Max) return *std::max_element(values.begin(), values.end());
  double s = 0.0;
  for (auto v : values) s += v;
  return apply_concave(h, s);
}

enum class InfoMetric { ChangeCount, Entropy };

struct RewardConfig {
  InfoMetric metric = InfoMetric::ChangeCount;
  double threshold = 20.0;
  double gamma = kDefaultGamma;
  RewardVariant variant = RewardVariant::Experiment;
  RegionRule rule = RegionRule::Max;
  Concave concave = Concave::Sqrt;
  QualFunction qual = QualFunction::Identity;
};

/// Sparse W_ij(a_i) for every sensor and action: (polygon, value) pairs over
/// the visible polygons, in increasing polygon order.
struct RewardTable {
  using Entries = std::vector<std::pair<std::size_t, double>>;
  std::size_t polygons = 0;
  RegionRule rule = RegionRule::Max;
  Concave concave = Concave::Sqrt;
  std::vector<std::vector<Entries>> entries;  // [sensor][action]

  std::size_t sensors() const noexcept { return entries.size(); }
  const Entries& at(std::size_t i, std::size_t a) const { return entries.at(i).at(a); }
};

/// W(a) and its ingredients.
struct ObjectiveBreakdown {
  double total = 0.0;                 // scaled
  std::vector<double> region;         // W_j, unscaled
  std::vector<std::vector<double>> wij;  // [sensor][polygon], unscaled; zero for null players
};

/// Per-polygon values gathered from every participating sensor.
inline std::vector<std::vector<double>> gather(const RewardTable& t, const JointAction& a) {
  std::vector<std::vector<double>> per(t.polygons);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == kNullAction) continue;
    for (const auto& [j, w] : t.at(i, a[i])) per[j].push_back(w);
  }
  return per;
}

inline ObjectiveBreakdown global_objective(const RewardTable& t, const JointAction& a, double scale = 1.0) {
  ObjectiveBreakdown out;
  out.wij.assign(a.size(), std::vector<double>(t.polygons, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != kNullAction)
      for (const auto& [j, w] : t.at(i, a[i])) out.wij[i][j] = w;
  const auto per = gather(t, a);
  out.region.resize(t.polygons);
  double sum = 0.0;
  for (std::size_t j = 0; j < t.polygons; ++j) {
    out.region[j] = region_reward(per[j], t.rule, t.concave);
    sum += out.region[j];
  }
  out.total = scale * sum;
  return out;
}

/// W(a) without the breakdown. Allocation-light: this is the learner's hot path.
inline double objective_value(const RewardTable& t, const JointAction& a, double scale = 1.0) {
  thread_local std::vector<double> acc;
  thread_local std::vector<char> seen;
  acc.assign(t.polygons, 0.0);
  seen.assign(t.polygons, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == kNullAction) continue;
    for (const auto& [j, w] : t.at(i, a[i])) {
      if (t.rule == RegionRule::Max)
        acc[j] = seen[j] ? std::max(acc[j], w) : w;
      else
        acc[j] += w;
      seen[j] = 1;
    }
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < t.polygons; ++j)
    if (seen[j]) sum += t.rule == RegionRule::Max ? acc[j] : apply_concave(t.concave, acc[j]);
  return scale * sum;
}

/// Upper bound on any unilateral |ΔU_i| for marginal utilities over the table:
/// U_i lies in [0, Σ_j h(W_ij)] (h the identity for the max rule).
inline double utility_bound(const RewardTable& t) {
  double worst = 0.0;
  for (const auto& sensor : t.entries)
    for (const auto& row : sensor) {
      double s = 0.0;
      for (const auto& [j, w] : row) s += t.rule == RegionRule::Max ? w : apply_concave(t.concave, w);
      worst = std::max(worst, s);
    }
  return worst;
}

/// Exact max of W over all joint actions by depth-first search with partial
/// per-polygon accumulators. Returns (best value unscaled, a maximizer).
inline std::pair<double, JointAction> exhaustive_optimum(const RewardTable& t, const std::vector<std::size_t>& counts,
                                                         std::uint64_t guard = 100'000'000) {
  JointIndexer idx(counts);
  if (idx.overflowed() || idx.size() > guard)
    throw GuardExceeded("joint action space of " + std::to_string(idx.size()) + " exceeds the optimum search guard");
  const auto n = counts.size();
  const auto m = t.polygons;
  const bool use_max = t.rule == RegionRule::Max;
  std::vector<std::vector<double>> acc(n + 1, std::vector<double>(m, 0.0));
  std::vector<std::vector<char>> seen(n + 1, std::vector<char>(m, 0));
  JointAction a(n, 0), best_a(n, 0);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
    if (depth == n) {
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        if (seen[n][j]) sum += use_max ? acc[n][j] : apply_concave(t.concave, acc[n][j]);
      if (sum > best) {
        best = sum;
        best_a = a;
      }
      return;
    }
    for (std::size_t x = 0; x < counts[depth]; ++x) {
      a[depth] = x;
      acc[depth + 1] = acc[depth];
      seen[depth + 1] = seen[depth];
      for (const auto& [j, w] : t.at(depth, x)) {
        auto& v = acc[depth + 1][j];
        v = seen[depth + 1][j] ? (use_max ? std::max(v, w) : v + w) : w;
        seen[depth + 1][j] = 1;
      }
      dfs(depth + 1);
    }
  };
  dfs(0);
  return {best, best_a};
}

/// A scheduled change of polygon values, applied before round `round` is
/// evaluated.
struct ChangeEvent {
  std::uint64_t round = 0;
  std::map<std::size_t, int> values;  // polygon -> new value
};

/// Polygon values over time. Version v is the scene after the first v events.
struct SceneState {
  std::vector<int> initial;  // source of the stored sample images y0
  std::vector<int> start;    // values in force at round 0
  std::vector<ChangeEvent> events;  // sorted by round

  std::size_t versions() const noexcept { return events.size() + 1; }

  std::size_t version_at(std::uint64_t round) const {
    std::size_t v = 0;
    while (v < events.size() && events[v].round <= round) ++v;
    return v;
  }

  std::vector<int> values(std::size_t version) const {
    auto out = start;
    for (std::size_t v = 0; v < version && v < events.size(); ++v)
      for (const auto& [j, val] : events[v].values) out.at(j) = val;
    return out;
  }
};

/// Sensors, polygons and scene with every visibility map, stored sample image
/// and reward table precomputed.
class Environment {
 public:
  Environment(std::vector<Polygon> polygons, std::vector<SensorModel> sensors, SceneState scene, RewardConfig reward)
      : polygons_(std::move(polygons)), sensors_(std::move(sensors)), scene_(std::move(scene)), reward_(reward) {
    if (scene_.initial.size() != polygons_.size() || scene_.start.size() != polygons_.size())
      throw std::invalid_argument("scene values do not match the polygon count");
    std::stable_sort(scene_.events.begin(), scene_.events.end(),
                     [](const ChangeEvent& x, const ChangeEvent& y) { return x.round < y.round; });
    for (std::size_t j = 0; j < polygons_.size(); ++j) polygons_[j].value = scene_.start[j];
    visibility_.resize(sensors_.size());
    initial_images_.resize(sensors_.size());
    for (std::size_t i = 0; i < sensors_.size(); ++i)
      for (std::size_t a = 0; a < sensors_[i].action_count(); ++a) {
        visibility_[i].push_back(build_visibility_map(sensors_[i], a, polygons_));
        initial_images_[i].push_back(render(visibility_[i].back(), scene_.initial));
      }
    for (std::size_t v = 0; v < scene_.versions(); ++v) tables_.push_back(compute_table(scene_.values(v)));
  }

  const std::vector<Polygon>& polygons() const noexcept { return polygons_; }
  const std::vector<SensorModel>& sensors() const noexcept { return sensors_; }
  const SceneState& scene() const noexcept { return scene_; }
  const RewardConfig& reward() const noexcept { return reward_; }
  const VisibilityMap& visibility(std::size_t i, std::size_t a) const { return visibility_.at(i).at(a); }
  const Image& initial_image(std::size_t i, std::size_t a) const { return initial_images_.at(i).at(a); }
  const RewardTable& table(std::size_t version) const { return tables_.at(version); }
  const RewardTable& table_at_round(std::uint64_t round) const { return tables_.at(scene_.version_at(round)); }
  std::size_t versions() const noexcept { return tables_.size(); }

  std::vector<std::size_t> action_counts() const {
    std::vector<std::size_t> c;
    for (const auto& s : sensors_) c.push_back(s.action_count());
    return c;
  }

  Image render_current(std::size_t i, std::size_t a, std::size_t version) const {
    return render(visibility(i, a), scene_.values(version));
  }

  /// Largest utility bound over every scene version.
  double utility_bound() const {
    double b = 0.0;
    for (const auto& t : tables_) b = std::max(b, ptz::utility_bound(t));
    return b;
  }

 private:
  RewardTable compute_table(const std::vector<int>& values) const {
    RewardTable t;
    t.polygons = polygons_.size();
    t.rule = reward_.rule;
    t.concave = reward_.concave;
    t.entries.resize(sensors_.size());
    for (std::size_t i = 0; i < sensors_.size(); ++i) {
      const auto S = sensors_[i].pixel_count();
      for (std::size_t a = 0; a < sensors_[i].action_count(); ++a) {
        const auto& map = visibility_[i][a];
        const Image img = render(map, values);
        std::vector<double> info(polygons_.size(), 0.0);
        if (reward_.metric == InfoMetric::ChangeCount) {
          info = info_change(map, img, &initial_images_[i][a], reward_.threshold);
          for (auto& x : info) x /= static_cast<double>(S);
        } else {
          for (std::size_t j = 0; j < polygons_.size(); ++j) {
            if (!map.visible(j)) continue;
            std::vector<std::uint8_t> px;
            for (auto l : map.pixels[j]) px.push_back(img[l]);
            info[j] = info_entropy(px) / 8.0;
          }
        }
        RewardTable::Entries row;
        for (std::size_t j = 0; j < polygons_.size(); ++j) {
          if (!map.visible(j)) continue;
          const double q = qual_fraction(map.count(j), S, reward_.qual);
          row.emplace_back(j, reward_wij(info[j], q, true, reward_.variant, reward_.gamma));
        }
        t.entries[i].push_back(std::move(row));
      }
    }
    return t;
  }

  std::vector<Polygon> polygons_;
  std::vector<SensorModel> sensors_;
  SceneState scene_;
  RewardConfig reward_;
  std::vector<std::vector<VisibilityMap>> visibility_;
  std::vector<std::vector<Image>> initial_images_;
  std::vector<RewardTable> tables_;
};

/// Marginal-contribution game over one reward table.
inline GameDefinition game_from_table(const RewardTable& t, const std::vector<std::size_t>& counts,
                                      ActionSpace space, double scale = 1.0) {
  if (space.counts() != counts) throw std::invalid_argument("action space does not match the sensors");
  auto table = std::make_shared<const RewardTable>(t);
  return GameDefinition::from_objective(
      std::move(space), [table, scale](const JointAction& a) { return objective_value(*table, a, scale); },
      scale * utility_bound(t));
}

}  // namespace ptz
