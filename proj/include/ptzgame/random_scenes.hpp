#pragma once

// Random camera scenes for property tests and the acceptance suite: a floor
// of grid cells under downward-looking PTZ sensors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "ptzgame/environment.hpp"
#include "ptzgame/random.hpp"

namespace ptz {

struct RandomSceneOptions {
  std::size_t sensors = 3;
  std::size_t polygons = 8;
  RegionRule rule = RegionRule::Max;
  double cell = 0.2;
  std::size_t cols = 12;
  std::size_t rows = 9;
};

/// Cells laid out row-major on z = 0; each sensor hangs 0.8-1.4 m above a
/// random point of the floor and has four poses (two pans, two zooms) around
/// straight down. Scene values, the stored sample image, reward variant and
/// info metric are all drawn at random.
inline Environment random_environment(const RandomSceneOptions& opt, Stream& rng) {
  const auto width = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(opt.polygons))));
  std::vector<Polygon> polys;
  for (std::size_t j = 0; j < opt.polygons; ++j) {
    const double x = static_cast<double>(j % width) * opt.cell, y = static_cast<double>(j / width) * opt.cell;
    polys.push_back(Polygon::horizontal_rectangle(j, x, y, x + opt.cell, y + opt.cell, 0.0, 0));
  }
  const double span_x = static_cast<double>(width) * opt.cell;
  const double span_y = static_cast<double>((opt.polygons + width - 1) / width) * opt.cell;

  std::vector<SensorModel> sensors;
  for (std::size_t i = 0; i < opt.sensors; ++i) {
    SensorModel s;
    s.position = Vec3(span_x * rng.uniform(), span_y * rng.uniform(), 0.8 + 0.6 * rng.uniform());
    s.mount = horizon_mount();
    s.cols = opt.cols;
    s.rows = opt.rows;
    const double pan0 = 2 * std::numbers::pi * rng.uniform();
    for (double dp : {-0.25, 0.25})
      for (double f : {3.0 + 2.0 * rng.uniform(), 8.0 + 4.0 * rng.uniform()})
        s.poses.push_back({pan0 + dp, -std::numbers::pi / 2 + 0.3 * rng.uniform(), f});
    sensors.push_back(std::move(s));
  }

  SceneState scene;
  for (std::size_t j = 0; j < opt.polygons; ++j) {
    scene.initial.push_back(static_cast<int>(rng.below(256)));
    scene.start.push_back(rng.uniform() < 0.5 ? scene.initial.back() : static_cast<int>(rng.below(256)));
  }
  RewardConfig rc;
  rc.rule = opt.rule;
  rc.concave = rng.uniform() < 0.5 ? Concave::Sqrt : Concave::Log1p;
  rc.variant = rng.uniform() < 0.5 ? RewardVariant::Experiment : RewardVariant::Product;
  rc.metric = rng.uniform() < 0.5 ? InfoMetric::ChangeCount : InfoMetric::Entropy;
  return Environment(std::move(polys), std::move(sensors), std::move(scene), rc);
}

}  // namespace ptz
