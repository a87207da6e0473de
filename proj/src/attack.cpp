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

#include "hnmpgd/attack.hpp"

#include <cassert>
#include <cmath>
#include <random>

#include "hnmpgd/resize.hpp"

namespace hnmpgd {

namespace {

ImageD hflip(const ImageD& img) {
  ImageD out;
  out.chan.reserve(img.chan.size());
  for (const auto& p : img.chan) out.chan.push_back(p.rowwise().reverse());
  return out;
}

ImageD add(const ImageD& a, const ImageD& b) {
  ImageD out = a;
  for (std::size_t c = 0; c < out.chan.size(); ++c) out.chan[c] += b.chan[c];
  return out;
}

// Average loss and gradient over {identity, horizontal flip} at model
// resolution; flipping the gradient back realigns it with the input.
ImageD flip_averaged_gradient(const DetectorModel& model, const ImageD& x_model,
                              const LossSpec& spec, double* loss_value) {
  double l_id = 0, l_fl = 0;
  const ImageD g_id = input_gradient(model, x_model, spec, &l_id);
  const ImageD g_fl = hflip(input_gradient(model, hflip(x_model), spec, &l_fl));
  ImageD g = add(g_id, g_fl);
  for (auto& p : g.chan) p *= 0.5;
  if (loss_value) *loss_value = 0.5 * (l_id + l_fl);
  return g;
}

}  // namespace

AttackConfig fast_preset() { return AttackConfig{40, 16.0 / 255.0, 16.0 / 255.0, false, 0}; }

AttackConfig long_preset() { return AttackConfig{800, 4.0 / 255.0, 16.0 / 255.0, false, 0}; }

ImageD pgd_step(const ImageD& x, const ImageD& delta, const Mask& mask, const ImageD& grad,
                double alpha) {
  if (!same_shape(x, delta) || !same_shape(x, grad))
    throw InvalidArgumentError("pgd_step: shape mismatch");
  if (mask.rows() != x.height() || mask.cols() != x.width())
    throw InvalidArgumentError("pgd_step: mask shape mismatch");

  const auto keep = mask != std::uint8_t{0};
  ImageD next = ImageD::zeros(x.height(), x.width(), x.channels());
  for (int c = 0; c < x.channels(); ++c) {
    const auto& g = grad.chan[static_cast<std::size_t>(c)];
    const PlaneD sign =
        (g > 0.0).cast<double>() - (g < 0.0).cast<double>();  // sign(0) = 0
    PlaneD d = delta.chan[static_cast<std::size_t>(c)] + alpha * sign;
    d = keep.select(d, PlaneD::Zero(d.rows(), d.cols()));
    const auto& xp = x.chan[static_cast<std::size_t>(c)];
    next.chan[static_cast<std::size_t>(c)] = d.max(-xp).min(1.0 - xp);
  }
  return next;
}

AttackResult run_attack(const DetectorModel& model, const ImageD& x, const Mask& mask,
                        const LossSpec& spec, const AttackConfig& cfg,
                        const MaskSearchConfig* budget) {
  validate(spec);
  if (cfg.steps < 1) throw InvalidArgumentError("run_attack: steps must be >= 1");
  if (cfg.step_size <= 0) throw InvalidArgumentError("run_attack: step size must be positive");
  if (cfg.init_magnitude < 0) throw InvalidArgumentError("run_attack: negative init magnitude");
  if (mask.rows() != x.height() || mask.cols() != x.width())
    throw InvalidArgumentError("run_attack: mask shape mismatch");

  MaskSearchConfig budget_cfg = budget ? *budget : MaskSearchConfig{};
  budget_cfg.min_pixels = 0;
  const ConstraintReport mask_report = check_constraints(mask, budget_cfg);
  if (!mask_report.passed)
    throw ConstraintViolationError("run_attack: mask violates the perturbation constraints");

  const Index h = x.height(), w = x.width();
  ImageD delta = ImageD::zeros(h, w, x.channels());
  if (cfg.init_magnitude > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(-cfg.init_magnitude, cfg.init_magnitude);
    for (auto& p : delta.chan)
      for (Index y = 0; y < h; ++y)
        for (Index xx = 0; xx < w; ++xx) p(y, xx) = dist(rng);
  }
  const ImageD zero_grad = ImageD::zeros(h, w, x.channels());
  delta = pgd_step(x, delta, mask, zero_grad, 0.0);  // project the init

  AttackResult result;
  result.loss_trace.reserve(static_cast<std::size_t>(cfg.steps));

  for (int step = 0; step < cfg.steps; ++step) {
    const ImageD x_adv = add(x, delta);
    double loss = 0;
    ImageD grad;
    if (cfg.use_flip_transform) {
      const bool native = h == model.side && w == model.side;
      const ImageD x_model = native ? x_adv : resize_bilinear(x_adv, model.side, model.side);
      const ImageD g_model = flip_averaged_gradient(model, x_model, spec, &loss);
      grad = native ? g_model : resize_bilinear_adjoint(g_model, h, w);
    } else {
      grad = input_gradient_native(model, x_adv, spec, &loss);
    }
    if (!std::isfinite(loss)) throw AttackDivergedError("run_attack: non-finite loss");
    result.loss_trace.push_back(loss);
    delta = pgd_step(x, delta, mask, grad, cfg.step_size);
#ifndef NDEBUG
    for (int c = 0; c < x.channels(); ++c) {
      const auto& d = delta.chan[static_cast<std::size_t>(c)];
      const auto& xp = x.chan[static_cast<std::size_t>(c)];
      assert((d >= -xp).all() && (d <= 1.0 - xp).all());
    }
#endif
  }

  result.adversarial = add(x, delta);
  clamp01(result.adversarial);
  result.delta = std::move(delta);
  result.mask = mask;

  const auto eval_count = [&](const ImageD& img) {
    const bool native = img.height() == model.side && img.width() == model.side;
    const ImageD sized = native ? img : resize_bilinear(img, model.side, model.side);
    return detect_count(forward(model, sized), kEvalConfThreshold, kEvalClsThreshold);
  };
  result.clean_detections = eval_count(x);
  result.adv_detections = eval_count(result.adversarial);
  return result;
}

HnmPgdResult hnm_pgd(const DetectorModel& model, const ImageD& x, const MaskSearchConfig& mask_cfg,
                     const LossSpec& spec, const AttackConfig& cfg, const SalienceConfig& sal_cfg) {
  const SalienceMap salience = smoothgrad(model, x, spec, sal_cfg);
  MaskSearchResult search = find_mask(salience, mask_cfg);
  HnmPgdResult result;
  result.attack = run_attack(model, x, search.mask, spec, cfg, &mask_cfg);
  result.mask_report = search.report;
  result.phi = search.phi;
  result.mask_attempts = search.attempts;
  return result;
}

}  // namespace hnmpgd
