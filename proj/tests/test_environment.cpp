#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ptzgame/environment.hpp"
#include "ptzgame/random.hpp"

using namespace ptz;

namespace {

// Camera at `pos` whose optical axis points straight down.
SensorModel downward(Vec3 pos, std::vector<double> focals, std::size_t cols = 16, std::size_t rows = 12) {
  SensorModel s;
  s.position = pos;
  s.mount = rotation_x(std::numbers::pi);
  s.cols = cols;
  s.rows = rows;
  for (auto f : focals) s.poses.push_back({0.0, 0.0, f});
  return s;
}

std::vector<Polygon> floor_grid(std::size_t cols, std::size_t rows, double cell, double x0, double y0, double z) {
  std::vector<Polygon> out;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out.push_back(Polygon::horizontal_rectangle(out.size(), x0 + c * cell, y0 + r * cell, x0 + (c + 1) * cell,
                                                  y0 + (r + 1) * cell, z, 100));
  return out;
}

RewardTable random_table(std::size_t sensors, std::size_t actions, std::size_t polygons, RegionRule rule, Stream& rng) {
  RewardTable t;
  t.polygons = polygons;
  t.rule = rule;
  t.entries.resize(sensors);
  for (auto& s : t.entries)
    for (std::size_t a = 0; a < actions; ++a) {
      RewardTable::Entries row;
      for (std::size_t j = 0; j < polygons; ++j)
        if (rng.uniform() < 0.6) row.emplace_back(j, rng.uniform());
      s.push_back(row);
    }
  return t;
}

}  // namespace

TEST(RayPolygon, StraightDown) {
  auto floor = Polygon::horizontal_rectangle(0, -1, -1, 1, 1, 0.0, 0);
  auto alpha = ray_polygon_alpha(Vec3(0, 0, 2), Mat3::Identity(), Vec3(0, 0, -1), floor);
  ASSERT_TRUE(alpha);
  EXPECT_DOUBLE_EQ(*alpha, 2.0);
  const Vec3 hit = Vec3(0, 0, 2) + *alpha * Vec3(0, 0, -1);
  EXPECT_TRUE(hit.isApprox(Vec3::Zero()) || hit.norm() < 1e-15);
}

TEST(RayPolygon, AwayAndParallel) {
  auto floor = Polygon::horizontal_rectangle(0, -1, -1, 1, 1, 0.0, 0);
  EXPECT_FALSE(ray_polygon_alpha(Vec3(0, 0, 2), Mat3::Identity(), Vec3(0, 0, 1), floor));
  EXPECT_FALSE(ray_polygon_alpha(Vec3(0, 0, 2), Mat3::Identity(), Vec3(1, 0, 0), floor));
}

TEST(RayPolygon, MissOutsideEdges) {
  auto floor = Polygon::horizontal_rectangle(0, -1, -1, 1, 1, 0.0, 0);
  EXPECT_FALSE(ray_polygon_alpha(Vec3(0, 0, 2), Mat3::Identity(), Vec3(0.8, 0, -0.6), floor));
  EXPECT_TRUE(ray_polygon_alpha(Vec3(0, 0, 2), Mat3::Identity(), Vec3(0.3, 0, -0.954), floor));
}

TEST(Polygon, VerticesSatisfyDescription) {
  Stream rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 3 + rng.below(6);
    const Mat3 R = (Eigen::AngleAxisd(6.0 * rng.uniform(), Vec3(rng.uniform(), rng.uniform(), 1).normalized()))
                       .toRotationMatrix();
    const Vec3 c(rng.uniform(), rng.uniform(), rng.uniform());
    std::vector<Vec3> v;
    for (std::size_t m = 0; m < k; ++m) {
      const double t = 2 * std::numbers::pi * m / k;
      v.push_back(c + R * Vec3(std::cos(t), std::sin(t), 0));
    }
    auto p = Polygon::from_convex_vertices(trial, v, 0);
    EXPECT_NEAR(p.normal.norm(), 1.0, 1e-12);
    EXPECT_GT(p.area(), 0.0);
    for (const auto& q : v) {
      EXPECT_NEAR(p.normal.dot(q), p.offset, 1e-9);
      for (Eigen::Index r = 0; r < p.A.rows(); ++r) EXPECT_LE(p.A.row(r).dot(q), p.b(r) + 1e-9);
    }
    EXPECT_TRUE(p.contains(p.centroid()));
  }
}

TEST(Polygon, RejectsDegenerateInput) {
  EXPECT_THROW(Polygon::from_convex_vertices(0, {Vec3(0, 0, 0), Vec3(1, 0, 0)}, 0), std::invalid_argument);
  EXPECT_THROW(Polygon::from_convex_vertices(0, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, 0),
               std::invalid_argument);
  EXPECT_THROW(Polygon::from_convex_vertices(0, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0.5)}, 0),
               std::invalid_argument);
  EXPECT_THROW(
      Polygon::from_convex_vertices(0, {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(1, 0.2, 0), Vec3(2, 2, 0), Vec3(0, 2, 0)}, 0),
      std::invalid_argument);
}

TEST(Polygon, PlaneThroughOrigin) {
  // A wall through the origin: the n.q = d form handles d = 0.
  auto p = Polygon::from_convex_vertices(0, {Vec3(0, -1, 0), Vec3(0, 1, 0), Vec3(0, 1, 1), Vec3(0, -1, 1)}, 0);
  EXPECT_NEAR(p.offset, 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.normal.x()), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.area(), 2.0);
}

TEST(SensorModel, RotationsAreProper) {
  SensorModel s;
  s.mount = horizon_mount();
  for (double pan = -3; pan <= 3; pan += 0.7)
    for (double tilt = -1.5; tilt <= 1.5; tilt += 0.3) s.poses.push_back({pan, tilt, 8.0});
  for (std::size_t a = 0; a < s.action_count(); ++a) {
    const Mat3 R = s.rotation(a);
    EXPECT_LE((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-9);
  }
}

TEST(SensorModel, ZoomInNarrowsView) {
  SensorModel s;
  for (double f = 2; f < 40; f += 1.5) s.poses.push_back({0, 0, f});
  for (std::size_t a = 1; a < s.action_count(); ++a) EXPECT_LT(s.beta_bar(a), s.beta_bar(a - 1));
}

TEST(SensorModel, EveryPixelRayIsInCone) {
  auto s = downward(Vec3::Zero(), {4.0, 9.0}, 32, 24);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t l = 0; l < s.pixel_count(); ++l) {
      EXPECT_NEAR(s.ray(a, l).norm(), 1.0, 1e-12);
      EXPECT_TRUE(s.in_view_cone(a, s.ray(a, l)));
    }
  EXPECT_FALSE(s.in_view_cone(0, Vec3(1, 0, 0.01).normalized()));
}

TEST(SensorModel, TiltReadsAsElevation) {
  SensorModel s;
  s.mount = horizon_mount();
  s.poses = {{0, 0, 8}, {0, std::numbers::pi / 2, 8}, {std::numbers::pi / 2, 0, 8}};
  EXPECT_TRUE((s.rotation(0) * Vec3::UnitZ()).isApprox(Vec3::UnitY(), 1e-12));
  EXPECT_TRUE((s.rotation(1) * Vec3::UnitZ()).isApprox(Vec3::UnitZ(), 1e-12));
  EXPECT_TRUE((s.rotation(2) * Vec3::UnitZ()).isApprox(-Vec3::UnitX(), 1e-12));
}

TEST(Visibility, FullViewPolygon) {
  auto s = downward(Vec3(0, 0, 2), {8.0});
  std::vector<Polygon> polys = {Polygon::horizontal_rectangle(0, -50, -50, 50, 50, 0.0, 10)};
  auto m = build_visibility_map(s, 0, polys);
  EXPECT_EQ(m.count(0), s.pixel_count());
  EXPECT_EQ(m.visible_set(), std::vector<std::size_t>{0});
}

TEST(Visibility, NearPlaneOccludesFarPlane) {
  auto s = downward(Vec3(0, 0, 3), {6.0, 12.0});
  std::vector<Polygon> polys = {Polygon::horizontal_rectangle(0, -10, -10, 10, 10, 0.0, 10),
                                Polygon::horizontal_rectangle(1, -10, -10, 10, 10, 1.0, 20)};
  for (std::size_t a = 0; a < 2; ++a) {
    auto m = build_visibility_map(s, a, polys);
    EXPECT_EQ(m.count(0), 0u);
    // Oracle: α to plane z = h is (3 - h) / -dir_z, so the z = 1 plane wins
    // wherever both are hit.
    for (std::size_t l = 0; l < s.pixel_count(); ++l) {
      const Vec3 d = s.rotation(a) * s.ray(a, l);
      const double far = 3.0 / -d.z(), near = 2.0 / -d.z();
      ASSERT_LT(near, far);
      EXPECT_EQ(m.owner[l], 1);
    }
  }
}

TEST(Visibility, PartialOcclusionMatchesPerRayOracle) {
  auto s = downward(Vec3(0, 0, 3), {6.0});
  std::vector<Polygon> polys = {Polygon::horizontal_rectangle(0, -10, -10, 10, 10, 0.0, 10),
                                Polygon::horizontal_rectangle(1, 0.0, -10, 10, 10, 1.0, 20)};
  auto m = build_visibility_map(s, 0, polys);
  for (std::size_t l = 0; l < s.pixel_count(); ++l) {
    const Vec3 d = s.rotation(0) * s.ray(0, l);
    const double x_at_near = 0 + (2.0 / -d.z()) * d.x();
    EXPECT_EQ(m.owner[l], x_at_near >= 0.0 ? 1 : 0) << "pixel " << l;
  }
  EXPECT_GT(m.count(0), 0u);
  EXPECT_GT(m.count(1), 0u);
}

TEST(Visibility, OutsideConeIsInvisible) {
  auto s = downward(Vec3(0, 0, 2), {8.0});
  std::vector<Polygon> polys = {Polygon::horizontal_rectangle(0, 20, 20, 30, 30, 0.0, 10)};
  auto m = build_visibility_map(s, 0, polys);
  EXPECT_EQ(m.count(0), 0u);
  EXPECT_TRUE(m.visible_set().empty());
}

TEST(Visibility, PixelSetsDisjointAndBounded) {
  Stream rng(2);
  auto polys = floor_grid(5, 4, 0.2, -0.5, -0.4, 0.0);
  polys.push_back(Polygon::horizontal_rectangle(polys.size(), -0.1, -0.1, 0.1, 0.3, 0.5, 60));
  SensorModel s = downward(Vec3(0.05, 0.02, 1.5), {3.0, 5.0, 8.0, 13.0});
  for (std::size_t a = 0; a < s.action_count(); ++a) {
    auto m = build_visibility_map(s, a, polys);
    std::vector<int> seen(s.pixel_count(), 0);
    std::size_t total = 0;
    for (std::size_t j = 0; j < polys.size(); ++j) {
      total += m.count(j);
      for (auto l : m.pixels[j]) ++seen[l];
    }
    for (auto c : seen) EXPECT_LE(c, 1);
    EXPECT_LE(total, s.pixel_count());
    EXPECT_EQ(total == m.in_cone(), m.covered() == m.in_cone());
    std::size_t hits = 0;
    for (auto o : m.owner) hits += o >= 0;
    EXPECT_EQ(total, hits);
  }
}

TEST(Visibility, CoverageEqualityIffEveryRayHits) {
  auto s = downward(Vec3(0, 0, 2), {4.0});
  std::vector<Polygon> full = {Polygon::horizontal_rectangle(0, -50, -50, 50, 50, 0.0, 10)};
  std::vector<Polygon> part = {Polygon::horizontal_rectangle(0, -0.2, -0.2, 0.2, 0.2, 0.0, 10)};
  auto a = build_visibility_map(s, 0, full);
  auto b = build_visibility_map(s, 0, part);
  EXPECT_EQ(a.covered(), a.in_cone());
  EXPECT_LT(b.covered(), b.in_cone());
}

TEST(Visibility, TranslationInvariance) {
  Stream rng(3);
  auto polys = floor_grid(4, 3, 0.25, -0.5, -0.4, 0.0);
  SensorModel s;
  s.position = Vec3(0.1, -1.0, 0.8);
  s.mount = horizon_mount();
  s.cols = 16;
  s.rows = 12;
  for (double pan : {-0.2, 0.0, 0.15})
    for (double tilt : {-0.7, -0.5}) s.poses.push_back({pan, tilt, 6.0});
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 t(4 * rng.uniform() - 2, 4 * rng.uniform() - 2, 4 * rng.uniform() - 2);
    std::vector<Polygon> moved;
    for (const auto& p : polys) moved.push_back(p.translated(t));
    auto s2 = s.translated(t);
    for (std::size_t a = 0; a < s.action_count(); ++a) {
      auto m1 = build_visibility_map(s, a, polys);
      auto m2 = build_visibility_map(s2, a, moved);
      EXPECT_EQ(m1.pixels, m2.pixels);
    }
  }
}

TEST(Visibility, ZoomTradeoff) {
  auto polys = floor_grid(9, 9, 0.1, -0.45, -0.45, 0.0);
  const std::size_t centre = 40;
  auto s = downward(Vec3(0, 0, 1.2), {3.0, 4.0, 6.0, 9.0, 14.0});
  std::size_t last_count = 0, last_visible = polys.size() + 1;
  for (std::size_t a = 0; a < s.action_count(); ++a) {
    auto m = build_visibility_map(s, a, polys);
    EXPECT_GE(m.count(centre), last_count);
    EXPECT_LE(m.visible_set().size(), last_visible);
    EXPECT_EQ(m.in_cone(), s.pixel_count());
    last_count = m.count(centre);
    last_visible = m.visible_set().size();
  }
}

TEST(Render, UniformBackgroundAndPartition) {
  auto s = downward(Vec3(0, 0, 2), {6.0});
  std::vector<Polygon> uniform = {Polygon::horizontal_rectangle(0, -50, -50, 50, 50, 0.0, 128)};
  auto img = render(build_visibility_map(s, 0, uniform), {128});
  for (auto v : img) EXPECT_EQ(v, 128);

  std::vector<Polygon> small = {Polygon::horizontal_rectangle(0, -0.1, -0.1, 0.1, 0.1, 0.0, 128)};
  auto m = build_visibility_map(s, 0, small);
  auto img2 = render(m, {128});
  for (std::size_t l = 0; l < img2.size(); ++l) EXPECT_EQ(img2[l], m.owner[l] == 0 ? 128 : 0);
  EXPECT_EQ(img2[0], 0);

  std::vector<Polygon> split = {Polygon::horizontal_rectangle(0, -50, -50, 0, 50, 0.0, 50),
                                Polygon::horizontal_rectangle(1, 0, -50, 50, 50, 0.0, 200)};
  auto ms = build_visibility_map(s, 0, split);
  auto img3 = render(ms, {50, 200});
  std::size_t lo = 0, hi = 0;
  for (std::size_t l = 0; l < img3.size(); ++l) {
    ASSERT_GE(ms.owner[l], 0);
    EXPECT_EQ(img3[l], ms.owner[l] == 0 ? 50 : 200);
    lo += img3[l] == 50;
    hi += img3[l] == 200;
  }
  EXPECT_EQ(lo, ms.count(0));
  EXPECT_EQ(hi, ms.count(1));
  EXPECT_EQ(lo, hi);
}

TEST(Render, PgmHeader) {
  std::ostringstream os;
  write_pgm(os, Image(6, 7), 3, 2);
  EXPECT_EQ(os.str().substr(0, 11), "P5\n3 2\n255\n");
  EXPECT_EQ(os.str().size(), 17u);
  EXPECT_THROW(write_pgm(os, Image(5), 3, 2), std::invalid_argument);
}

TEST(Info, ChangeCount) {
  auto s = downward(Vec3(0, 0, 2), {6.0});
  std::vector<Polygon> polys = {Polygon::horizontal_rectangle(0, -50, -50, 0, 50, 0.0, 100),
                                Polygon::horizontal_rectangle(1, 0, -50, 50, 50, 0.0, 100)};
  auto m = build_visibility_map(s, 0, polys);
  auto y0 = render(m, {100, 100});
  auto same = info_change(m, y0, &y0, 20);
  EXPECT_EQ(same, (std::vector<double>{0, 0}));
  auto jumped = render(m, {180, 100});
  auto c = info_change(m, jumped, &y0, 20);
  EXPECT_EQ(c[0], static_cast<double>(m.count(0)));
  EXPECT_EQ(c[1], 0.0);
  auto edge = render(m, {120, 80});
  EXPECT_EQ(info_change(m, edge, &y0, 20), (std::vector<double>{0, 0}));
  EXPECT_THROW(info_change(m, y0, nullptr, 20), std::invalid_argument);
}

TEST(Info, Entropy) {
  EXPECT_EQ(info_entropy(std::vector<std::uint8_t>(40, 7)), 0.0);
  std::vector<std::uint8_t> half(40, 3);
  std::fill(half.begin(), half.begin() + 20, 9);
  EXPECT_DOUBLE_EQ(info_entropy(half), 1.0);
  std::vector<std::uint8_t> all(256);
  for (int v = 0; v < 256; ++v) all[v] = static_cast<std::uint8_t>(v);
  EXPECT_NEAR(info_entropy(all), 8.0, 1e-12);
  EXPECT_THROW(info_entropy({}), std::invalid_argument);

  Stream rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> px(1 + rng.below(500));
    const auto spread = 1 + rng.below(256);
    for (auto& p : px) p = static_cast<std::uint8_t>(rng.below(spread));
    const double h = info_entropy(px);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 8.0 + 1e-12);
  }
}

TEST(Info, QualFraction) {
  EXPECT_EQ(qual_fraction(0, 300), 0.0);
  EXPECT_EQ(qual_fraction(300, 300), 1.0);
  EXPECT_DOUBLE_EQ(qual_fraction(75, 300), 0.25);
  EXPECT_DOUBLE_EQ(qual_fraction(75, 300, QualFunction::Sqrt), 0.5);
}

TEST(Reward, SensorRegionValues) {
  EXPECT_EQ(reward_wij(0.4, 0.5, false, RewardVariant::Experiment), 0.0);
  EXPECT_EQ(reward_wij(0.4, 0.5, false, RewardVariant::Product), 0.0);
  EXPECT_DOUBLE_EQ(reward_wij(0.0, 0.3, true, RewardVariant::Experiment, 0.015), 0.015);
  EXPECT_DOUBLE_EQ(reward_wij(0.2, 0.3, true, RewardVariant::Experiment, 0.015), 0.4);
  EXPECT_DOUBLE_EQ(reward_wij(0.2, 0.3, true, RewardVariant::Product), 0.06);
  EXPECT_THROW(reward_wij(-0.1, 0.3, true, RewardVariant::Product), std::invalid_argument);
}

TEST(Reward, RegionRules) {
  EXPECT_EQ(region_reward({}, RegionRule::Max), 0.0);
  EXPECT_EQ(region_reward({}, RegionRule::ConcaveSum), 0.0);
  EXPECT_EQ(region_reward({0.3, 0.5}, RegionRule::Max), 0.5);
  EXPECT_DOUBLE_EQ(region_reward({0.09, 0.16}, RegionRule::ConcaveSum, Concave::Sqrt), 0.5);
  EXPECT_DOUBLE_EQ(region_reward({0.5, 0.5}, RegionRule::ConcaveSum, Concave::Log1p), std::log(2.0));
}

TEST(Reward, MonotoneInInputs) {
  Stream rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const double i = rng.uniform(), q = rng.uniform(), di = rng.uniform() * 0.1, dq = rng.uniform() * 0.1;
    for (auto v : {RewardVariant::Product, RewardVariant::Experiment}) {
      EXPECT_LE(reward_wij(i, q, true, v), reward_wij(i + di, q, true, v));
      EXPECT_LE(reward_wij(i, q, true, v), reward_wij(i, q + dq, true, v));
    }
    std::vector<double> vals(1 + rng.below(4));
    for (auto& x : vals) x = rng.uniform();
    for (auto rule : {RegionRule::Max, RegionRule::ConcaveSum}) {
      auto bumped = vals;
      bumped[rng.below(bumped.size())] += di;
      EXPECT_LE(region_reward(vals, rule), region_reward(bumped, rule));
    }
  }
}

TEST(Objective, EmptyAndSingle) {
  RewardTable t;
  t.polygons = 2;
  t.entries = {{{}, {{1, 0.7}}}};
  EXPECT_EQ(global_objective(t, {0}).total, 0.0);
  EXPECT_EQ(objective_value(t, {0}), 0.0);
  auto b = global_objective(t, {1});
  EXPECT_EQ(b.total, 0.7);
  EXPECT_EQ(b.region[1], 0.7);
  EXPECT_EQ(b.wij[0][1], 0.7);
  EXPECT_DOUBLE_EQ(global_objective(t, {1}, 0.5).total, 0.35);
}

TEST(Objective, MatchesSumOfMaxOracle) {
  Stream rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = random_table(2, 4, 3, RegionRule::Max, rng);
    JointAction a = {rng.below(4), rng.below(4)};
    double expected = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      double best = 0;
      for (std::size_t i = 0; i < 2; ++i)
        for (const auto& [jj, w] : t.at(i, a[i]))
          if (jj == j) best = std::max(best, w);
      expected += best;
    }
    EXPECT_DOUBLE_EQ(global_objective(t, a).total, expected);
    EXPECT_DOUBLE_EQ(objective_value(t, a), expected);
  }
}

TEST(Objective, ConcaveSumOracleAndMonotonicity) {
  Stream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = random_table(3, 3, 4, RegionRule::ConcaveSum, rng);
    JointAction a = {rng.below(3), rng.below(3), rng.below(3)};
    std::vector<double> sum(4, 0.0);
    std::vector<char> any(4, 0);
    for (std::size_t i = 0; i < 3; ++i)
      for (const auto& [j, w] : t.at(i, a[i])) sum[j] += w, any[j] = 1;
    double expected = 0;
    for (std::size_t j = 0; j < 4; ++j)
      if (any[j]) expected += std::sqrt(sum[j]);
    EXPECT_NEAR(objective_value(t, a), expected, 1e-12);
    EXPECT_NEAR(global_objective(t, a).total, expected, 1e-12);

    auto bumped = t;
    auto& row = bumped.entries[0][a[0]];
    if (!row.empty()) {
      row[0].second += 0.1;
      EXPECT_GE(objective_value(bumped, a), objective_value(t, a));
    }
  }
}

TEST(Objective, ExhaustiveOptimumMatchesEnumeration) {
  Stream rng(8);
  for (auto rule : {RegionRule::Max, RegionRule::ConcaveSum})
    for (int trial = 0; trial < 20; ++trial) {
      auto t = random_table(3, 4, 5, rule, rng);
      auto [best, arg] = exhaustive_optimum(t, {4, 4, 4});
      double brute = -1;
      JointIndexer idx({4, 4, 4});
      for (std::uint64_t k = 0; k < idx.size(); ++k) brute = std::max(brute, objective_value(t, idx.decode(k)));
      EXPECT_NEAR(best, brute, 1e-12);
      EXPECT_NEAR(objective_value(t, arg), best, 1e-12);
    }
}

TEST(Scene, VersionsAndValues) {
  SceneState s;
  s.initial = {100, 100, 100};
  s.start = {100, 200, 100};
  s.events = {{10, {{0, 50}}}, {20, {{2, 30}, {0, 60}}}};
  EXPECT_EQ(s.versions(), 3u);
  EXPECT_EQ(s.version_at(9), 0u);
  EXPECT_EQ(s.version_at(10), 1u);
  EXPECT_EQ(s.version_at(19), 1u);
  EXPECT_EQ(s.version_at(500), 2u);
  EXPECT_EQ(s.values(0), (std::vector<int>{100, 200, 100}));
  EXPECT_EQ(s.values(1), (std::vector<int>{50, 200, 100}));
  EXPECT_EQ(s.values(2), (std::vector<int>{60, 200, 30}));
}

TEST(Environment, TablesFollowRewardPipeline) {
  auto polys = floor_grid(3, 1, 0.4, -0.6, -0.2, 0.0);
  auto s = downward(Vec3(0, 0, 1.0), {3.0, 8.0});
  SceneState scene{{100, 100, 100}, {100, 180, 100}, {{5, {{2, 90}}}}};
  RewardConfig rc;
  Environment env(polys, {s}, scene, rc);
  ASSERT_EQ(env.versions(), 2u);
  for (std::size_t a = 0; a < 2; ++a) {
    const auto& m = env.visibility(0, a);
    const auto& row = env.table(0).at(0, a);
    ASSERT_EQ(row.size(), m.visible_set().size());
    for (const auto& [j, w] : row) {
      const double frac = (j == 1 ? static_cast<double>(m.count(j)) : 0.0) / s.pixel_count();
      EXPECT_DOUBLE_EQ(w, 2 * frac > rc.gamma ? 2 * frac : rc.gamma);
    }
  }
  // Version 1 changes cell 2 by 10, below the threshold.
  for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(env.table(1).at(0, a), env.table(0).at(0, a));
  EXPECT_EQ(&env.table_at_round(4), &env.table(0));
  EXPECT_EQ(&env.table_at_round(5), &env.table(1));
}
