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

#ifndef HNMPGD_ATTACK_HPP_
#define HNMPGD_ATTACK_HPP_

#include <cstdint>
#include <vector>

#include "hnmpgd/losses.hpp"
#include "hnmpgd/maskgen.hpp"
#include "hnmpgd/salience.hpp"

namespace hnmpgd {

/// Detection counting for reporting uses these stricter thresholds; the
/// attack losses run on the widened LossSpec thresholds.
constexpr double kEvalConfThreshold = 0.5;
constexpr double kEvalClsThreshold = 0.3;

struct AttackConfig {
  int steps = 40;
  double step_size = 16.0 / 255.0;
  double init_magnitude = 16.0 / 255.0;  // uniform init range for delta
  bool use_flip_transform = false;       // average gradients over {identity, horizontal flip}
  std::uint64_t seed = 0;
};

AttackConfig fast_preset();  // 40 steps at 16/255
AttackConfig long_preset();  // 800 steps at 4/255

struct AttackResult {
  ImageD adversarial;
  ImageD delta;
  Mask mask;
  int clean_detections = 0;
  int adv_detections = 0;
  std::vector<double> loss_trace;  // objective at the start of each iteration
};

/// One projected ascent step: delta + alpha * sign(grad), zeroed outside the
/// mask, then clipped so x + delta stays in [0,1]. sign(0) is 0. With
/// alpha = 0 this is exactly the projection onto the feasible set.
ImageD pgd_step(const ImageD& x, const ImageD& delta, const Mask& mask, const ImageD& grad,
                double alpha);

/// Masked PGD ascent of the spec loss. Gradients are computed at the model
/// resolution of (x + delta) and transported back through the exact resize
/// adjoint. The mask is re-verified against the budget before running
/// (min_pixels is not enforced here, so an empty mask is a valid no-op
/// attack).
AttackResult run_attack(const DetectorModel& model, const ImageD& x, const Mask& mask,
                        const LossSpec& spec, const AttackConfig& cfg,
                        const MaskSearchConfig* budget = nullptr);

struct HnmPgdResult {
  AttackResult attack;
  ConstraintReport mask_report;
  double phi = 0;
  int mask_attempts = 0;
};

/// Full pipeline: smoothgrad salience -> mask search -> masked PGD, all at
/// the image's native resolution.
HnmPgdResult hnm_pgd(const DetectorModel& model, const ImageD& x, const MaskSearchConfig& mask_cfg,
                     const LossSpec& spec, const AttackConfig& cfg, const SalienceConfig& sal_cfg);

}  // namespace hnmpgd

#endif  // HNMPGD_ATTACK_HPP_
