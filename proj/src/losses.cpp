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

#include "hnmpgd/losses.hpp"

#include <cmath>

#include "hnmpgd/resize.hpp"

namespace hnmpgd {

namespace {

// Max softmax probability over the non-background classes of one row.
double max_foreground_prob(const Eigen::MatrixXd& cls_logits, Index i) {
  const Index bg = cls_logits.cols() - 1;
  const double maxv = cls_logits.row(i).maxCoeff();
  const Eigen::ArrayXd exps = (cls_logits.row(i).array() - maxv).exp();
  const double denom = exps.sum();
  return exps.head(bg).maxCoeff() / denom;
}

}  // namespace

void validate(const LossSpec& spec) {
  if (!(spec.conf_threshold > 0.0 && spec.conf_threshold < 1.0))
    throw InvalidArgumentError("LossSpec: conf_threshold must be in (0,1)");
  if (!(spec.cls_threshold > 0.0 && spec.cls_threshold < 1.0))
    throw InvalidArgumentError("LossSpec: cls_threshold must be in (0,1)");
}

double loss_yolo(const DetectorOutput& out, const LossSpec& spec) {
  double loss = 0.0;
  for (Index i = 0; i < out.conf.size(); ++i)
    if (out.conf(i) > spec.conf_threshold) loss += -std::log(out.conf(i));
  return loss;
}

double loss_frcnn(const DetectorOutput& out, const LossSpec& spec) {
  const Index bg = out.cls_logits.cols() - 1;
  double loss = 0.0;
  for (Index i = 0; i < out.cls_logits.rows(); ++i) {
    if (max_foreground_prob(out.cls_logits, i) <= spec.cls_threshold) continue;
    const double maxv = out.cls_logits.row(i).maxCoeff();
    const double lse = maxv + std::log((out.cls_logits.row(i).array() - maxv).exp().sum());
    loss += out.cls_logits(i, bg) - lse;
  }
  return loss;
}

double loss_combined(const DetectorOutput& out, const LossSpec& spec) {
  return loss_yolo(out, spec) + loss_frcnn(out, spec);
}

double attack_loss(const DetectorOutput& out, const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::yolo:
      return loss_yolo(out, spec);
    case LossKind::frcnn:
      return loss_frcnn(out, spec);
    case LossKind::combined:
      return loss_combined(out, spec);
  }
  throw InvalidArgumentError("attack_loss: unknown loss kind");
}

OutputGrad attack_loss_grad(const DetectorOutput& out, const LossSpec& spec) {
  const Index m = out.conf.size();
  const Index cols = out.cls_logits.cols();
  const Index bg = cols - 1;
  OutputGrad og;
  og.dconf = Eigen::VectorXd::Zero(m);
  og.dcls_logits = Eigen::MatrixXd::Zero(m, cols);

  if (spec.kind == LossKind::yolo || spec.kind == LossKind::combined) {
    for (Index i = 0; i < m; ++i)
      if (out.conf(i) > spec.conf_threshold) og.dconf(i) = -1.0 / out.conf(i);
  }
  if (spec.kind == LossKind::frcnn || spec.kind == LossKind::combined) {
    for (Index i = 0; i < m; ++i) {
      if (max_foreground_prob(out.cls_logits, i) <= spec.cls_threshold) continue;
      const double maxv = out.cls_logits.row(i).maxCoeff();
      const Eigen::ArrayXd exps = (out.cls_logits.row(i).array() - maxv).exp();
      const double denom = exps.sum();
      for (Index j = 0; j < cols; ++j)
        og.dcls_logits(i, j) = (j == bg ? 1.0 : 0.0) - exps(j) / denom;
    }
  }
  return og;
}

ImageD input_gradient(const DetectorModel& model, const ImageD& x, const LossSpec& spec,
                      double* loss_value) {
  validate(spec);
  ForwardTrace trace;
  const DetectorOutput out = forward(model, x, trace);
  if (loss_value) *loss_value = attack_loss(out, spec);
  return backward_input(model, trace, attack_loss_grad(out, spec));
}

ImageD input_gradient_native(const DetectorModel& model, const ImageD& x, const LossSpec& spec,
                             double* loss_value) {
  if (x.height() == model.side && x.width() == model.side)
    return input_gradient(model, x, spec, loss_value);
  const ImageD resized = resize_bilinear(x, model.side, model.side);
  const ImageD g = input_gradient(model, resized, spec, loss_value);
  return resize_bilinear_adjoint(g, x.height(), x.width());
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::yolo:
      return "yolo";
    case LossKind::frcnn:
      return "frcnn";
    case LossKind::combined:
      return "combined";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "yolo") return LossKind::yolo;
  if (name == "frcnn") return LossKind::frcnn;
  if (name == "combined") return LossKind::combined;
  throw InvalidArgumentError("unknown loss kind: " + name);
}

}  // namespace hnmpgd
