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

#ifndef HNMPGD_LOSSES_HPP_
#define HNMPGD_LOSSES_HPP_

#include <string>

#include "hnmpgd/detector.hpp"

namespace hnmpgd {

enum class LossKind { yolo, frcnn, combined };

/// Attack objective selection. Both losses are ascent objectives: raising
/// loss_yolo drives objectness confidences toward 0, raising loss_frcnn
/// drives class predictions toward the background class. The thresholds
/// gate which boxes enter the sums (widened relative to the stricter
/// evaluation thresholds so more boxes stay under attack).
struct LossSpec {
  LossKind kind = LossKind::combined;
  double conf_threshold = 0.3;
  double cls_threshold = 0.1;
};

void validate(const LossSpec& spec);

/// Sum over boxes with conf > conf_threshold of -log(conf): BCE against
/// objectness target 1.
double loss_yolo(const DetectorOutput& out, const LossSpec& spec);

/// Sum over boxes whose maximum non-background softmax probability exceeds
/// cls_threshold of log softmax probability of the background class.
double loss_frcnn(const DetectorOutput& out, const LossSpec& spec);

double loss_combined(const DetectorOutput& out, const LossSpec& spec);

/// Value of the loss selected by spec.kind.
double attack_loss(const DetectorOutput& out, const LossSpec& spec);

/// Gradient of the selected loss with respect to the detector output.
OutputGrad attack_loss_grad(const DetectorOutput& out, const LossSpec& spec);

/// Exact reverse-mode gradient of the scalar attack loss with respect to
/// every input pixel. x must match the model input side.
ImageD input_gradient(const DetectorModel& model, const ImageD& x, const LossSpec& spec,
                      double* loss_value = nullptr);

/// Same, for an image at arbitrary resolution: the input is resized to the
/// model side with bilinear interpolation and the gradient is transported
/// back through the exact resize adjoint. Pass-through when sizes already
/// match.
ImageD input_gradient_native(const DetectorModel& model, const ImageD& x, const LossSpec& spec,
                             double* loss_value = nullptr);

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

}  // namespace hnmpgd

#endif  // HNMPGD_LOSSES_HPP_
