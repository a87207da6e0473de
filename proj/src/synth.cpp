// Copyright (c) 2026 the hnmpgd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hnmpgd/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace hnmpgd {

namespace {

double cross(double oy, double ox, double ay, double ax, double by, double bx) {
  return (ay - oy) * (bx - ox) - (ax - ox) * (by - oy);
}

}  // namespace

bool Shape::contains(double y, double x) const {
  switch (kind) {
    case Kind::disk: {
      const double dy = y - cy, dx = x - cx;
      return dy * dy + dx * dx <= r * r;
    }
    case Kind::square:
      return std::abs(y - cy) <= r && std::abs(x - cx) <= r;
    case Kind::triangle: {
      const double d0 = cross(vy[0], vx[0], vy[1], vx[1], y, x);
      const double d1 = cross(vy[1], vx[1], vy[2], vx[2], y, x);
      const double d2 = cross(vy[2], vx[2], vy[0], vx[0], y, x);
      const bool has_neg = d0 < 0 || d1 < 0 || d2 < 0;
      const bool has_pos = d0 > 0 || d1 > 0 || d2 > 0;
      return !(has_neg && has_pos);
    }
  }
  return false;
}

SyntheticScene compose_scene(Index side, int grid, int classes, const std::vector<Shape>& shapes,
                             std::uint64_t noise_seed) {
  if (side < 1 || grid < 1 || side % grid != 0)
    throw InvalidArgumentError("compose_scene: side must be divisible by grid");
  if (classes < 1) throw InvalidArgumentError("compose_scene: needs at least one class");

  SyntheticScene sc;
  sc.image = ImageD(side, side, 3);
  sc.objectness = Mask::Zero(grid, grid);
  sc.cls = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(grid, grid,
                                                                                        classes);

  std::mt19937_64 rng(noise_seed);
  std::uniform_real_distribution<double> noise(0.02, 0.25);
  for (int c = 0; c < 3; ++c)
    for (Index y = 0; y < side; ++y)
      for (Index x = 0; x < side; ++x) sc.image(y, x, c) = noise(rng);

  for (const Shape& sh : shapes) {
    for (Index y = 0; y < side; ++y)
      for (Index x = 0; x < side; ++x)
        if (sh.contains(static_cast<double>(y) + 0.5, static_cast<double>(x) + 0.5))
          for (int c = 0; c < 3; ++c) sc.image(y, x, c) = sh.color[static_cast<std::size_t>(c)];
  }

  const double cell = static_cast<double>(side) / grid;
  for (int r = 0; r < grid; ++r)
    for (int c = 0; c < grid; ++c) {
      const double cyy = (r + 0.5) * cell, cxx = (c + 0.5) * cell;
      for (const Shape& sh : shapes)
        if (sh.contains(cyy, cxx)) {
          sc.objectness(r, c) = 1;
          sc.cls(r, c) = static_cast<int>(sh.kind) % classes;
        }
    }
  return sc;
}

SyntheticScene generate_scene(std::uint64_t seed, Index side, int grid, int classes,
                              int force_num_shapes) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(1, 3);

  const double s = static_cast<double>(side);
  std::uniform_real_distribution<double> center(0.2 * s, 0.8 * s);
  std::uniform_real_distribution<double> radius(0.055 * s, 0.085 * s);
  std::uniform_real_distribution<double> tri_radius(0.08 * s, 0.12 * s);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> bright(0.80, 0.98);
  std::uniform_int_distribution<int> kind_dist(0, std::min(classes, 3) - 1);

  // Rejection loop: a usable scene has at least one cell whose center sits
  // well inside a shape, so draws that only graze cell centers get resampled
  // (bounded, seed-determined).
  const double cell = s / grid;
  SyntheticScene sc;
  for (int attempt = 0; attempt < 20; ++attempt) {
    const int n = force_num_shapes >= 0 ? force_num_shapes : count_dist(rng);
    std::vector<Shape> shapes;
    shapes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Shape sh;
      sh.kind = static_cast<Shape::Kind>(kind_dist(rng));
      sh.cy = center(rng);
      sh.cx = center(rng);
      sh.color = {bright(rng), bright(rng), bright(rng)};
      if (sh.kind == Shape::Kind::triangle) {
        const double base = angle(rng);
        for (int v = 0; v < 3; ++v) {
          const double th = base + v * (2.0 * std::numbers::pi / 3.0) + jitter(rng);
          const double rr = tri_radius(rng);
          sh.vy[static_cast<std::size_t>(v)] = sh.cy + rr * std::sin(th);
          sh.vx[static_cast<std::size_t>(v)] = sh.cx + rr * std::cos(th);
        }
      } else {
        sh.r = radius(rng);
      }
      shapes.push_back(sh);
    }
    sc = compose_scene(side, grid, classes, shapes, rng());

    bool anchored = force_num_shapes == 0;
    for (int r = 0; r < grid && !anchored; ++r)
      for (int c = 0; c < grid && !anchored; ++c) {
        if (!sc.objectness(r, c)) continue;
        const double cy = (r + 0.5) * cell, cx = (c + 0.5) * cell;
        for (const Shape& sh : shapes)
          if (sh.contains(cy, cx) && sh.contains(cy - 2, cx) && sh.contains(cy + 2, cx) &&
              sh.contains(cy, cx - 2) && sh.contains(cy, cx + 2)) {
            anchored = true;
            break;
          }
      }
    if (anchored) break;
  }
  return sc;
}

std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count, Index side, int grid,
                                            int classes) {
  std::vector<SyntheticScene> scenes;
  scenes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    scenes.push_back(generate_scene(seed + static_cast<std::uint64_t>(i), side, grid, classes));
  return scenes;
}

}  // namespace hnmpgd
