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

#ifndef HNMPGD_DETECTOR_HPP_
#define HNMPGD_DETECTOR_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hnmpgd/core.hpp"

namespace hnmpgd {

/// Per-cell detector output. `conf` holds sigmoid objectness confidences;
/// `cls_logits` holds raw class scores with the LAST column being the
/// background class.
struct DetectorOutput {
  Eigen::VectorXd conf;        // m
  Eigen::MatrixXd cls_logits;  // m x (C+1)
};

/// Gradient of a scalar loss with respect to a DetectorOutput. Losses that
/// are natural in logit space may fill dobj_logit instead of dconf (leaving
/// dconf empty); otherwise dconf is chained through the sigmoid.
struct OutputGrad {
  Eigen::VectorXd dconf;
  Eigen::MatrixXd dcls_logits;
  Eigen::VectorXd dobj_logit;
};

/// 2-D convolution layer, stride 1, zero padding ksize/2.
struct ConvLayer {
  int in_ch = 0, out_ch = 0, ksize = 1;
  std::vector<PlaneD> weights;  // out_ch * in_ch planes of ksize x ksize
  Eigen::VectorXd bias;

  static ConvLayer zeros(int in_ch, int out_ch, int ksize);

  PlaneD& w(int o, int i) { return weights[static_cast<std::size_t>(o * in_ch + i)]; }
  const PlaneD& w(int o, int i) const { return weights[static_cast<std::size_t>(o * in_ch + i)]; }
  Index param_count() const { return static_cast<Index>(out_ch) * in_ch * ksize * ksize + out_ch; }
};

/// A small grid detector over side x side RGB inputs:
///   conv 3->8 (3x3) + ReLU -> 2x2 avg pool
///   conv 8->16 (3x3) + ReLU -> 2x2 avg pool -> 2x2 avg pool
///   conv 16->(1 + C+1) (1x1) at grid resolution.
/// Head channel 0 is the objectness logit; channels 1..C+1 are class logits
/// with the last one the background class. m = grid^2 cells, grid = side/8.
struct DetectorModel {
  int side = 64;
  int grid = 8;
  int classes = 3;
  ConvLayer conv1, conv2, head;

  int cell_count() const { return grid * grid; }
  Index param_count() const { return conv1.param_count() + conv2.param_count() + head.param_count(); }
};

/// All-zero weights; forward yields conf = 0.5 and zero class logits.
DetectorModel make_zero_model(int side = 64, int classes = 3);

/// Weights drawn uniformly from [-1/sqrt(fan_in), +1/sqrt(fan_in)].
DetectorModel make_random_model(int side, int classes, std::uint64_t seed);

/// Intermediate activations kept for reverse mode.
struct ForwardTrace {
  std::vector<PlaneD> input;  // 3 @ side
  std::vector<PlaneD> z1;     // 8 @ side, pre-ReLU
  std::vector<PlaneD> p1;     // 8 @ side/2
  std::vector<PlaneD> z2;     // 16 @ side/2, pre-ReLU
  std::vector<PlaneD> p3;     // 16 @ grid
  std::vector<PlaneD> head;   // 2+C @ grid, raw logits
};

DetectorOutput forward(const DetectorModel& model, const ImageD& x);
DetectorOutput forward(const DetectorModel& model, const ImageD& x, ForwardTrace& trace);

/// Reverse-mode pass from output gradients. Either destination may be null;
/// param_grads must be shaped like the model (see make_zero_model).
void backward(const DetectorModel& model, const ForwardTrace& trace, const OutputGrad& ograd,
              DetectorModel* param_grads, ImageD* input_grad);

ImageD backward_input(const DetectorModel& model, const ForwardTrace& trace, const OutputGrad& ograd);

/// Number of cells flagged as potential object containers: conf above
/// conf_threshold, or the softmax class maximum above cls_threshold at a
/// non-background index.
int detect_count(const DetectorOutput& out, double conf_threshold, double cls_threshold);

/// Checkpoint: magic + version + (side, grid, classes) + flat float32 stream.
void save_checkpoint(const DetectorModel& model, const std::filesystem::path& path);
DetectorModel load_checkpoint(const std::filesystem::path& path);

}  // namespace hnmpgd

#endif  // HNMPGD_DETECTOR_HPP_
