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

#ifndef HNMPGD_SYNTH_HPP_
#define HNMPGD_SYNTH_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "hnmpgd/core.hpp"

namespace hnmpgd {

/// Analytic bright shape drawn over the noise background. Coordinates are
/// continuous pixel positions; pixel (y, x) samples at (y+0.5, x+0.5).
struct Shape {
  enum class Kind { disk = 0, square = 1, triangle = 2 };

  Kind kind = Kind::disk;
  double cy = 0, cx = 0;  // disk/square center
  double r = 0;           // disk radius or square half-side
  std::array<double, 3> vy{}, vx{};  // triangle vertices
  std::array<double, 3> color{};

  bool contains(double y, double x) const;
};

/// Training scene: image plus per-grid-cell ground truth. `cls` uses 0-based
/// class ids 0..C-1 for foreground shapes and C for background.
struct SyntheticScene {
  ImageD image;
  Mask objectness;                                             // S x S
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> cls;  // S x S
};

/// Paints shapes in order over a seeded uniform noise background and labels
/// each cell by the last shape covering its center.
SyntheticScene compose_scene(Index side, int grid, int classes, const std::vector<Shape>& shapes,
                             std::uint64_t noise_seed);

/// Random scene with 1-3 bright shapes (force_num_shapes >= 0 overrides,
/// 0 gives an all-background scene). Deterministic in the seed.
SyntheticScene generate_scene(std::uint64_t seed, Index side, int grid, int classes,
                              int force_num_shapes = -1);

std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count, Index side, int grid,
                                            int classes);

}  // namespace hnmpgd

#endif  // HNMPGD_SYNTH_HPP_
