#include <doctest.h>

#include <cmath>
#include <random>

#include "hnmpgd/attack.hpp"
#include "hnmpgd/synth.hpp"
#include "oracles.hpp"

using namespace hnmpgd;

namespace {

Mask center_block_mask(Index side, Index block) {
  Mask m = Mask::Zero(side, side);
  const Index o = (side - block) / 2;
  m.block(o, o, block, block).setConstant(1);
  return m;
}

bool delta_outside_mask_is_zero(const ImageD& delta, const Mask& mask) {
  for (const auto& p : delta.chan)
    for (Index y = 0; y < p.rows(); ++y)
      for (Index x = 0; x < p.cols(); ++x)
        if (!mask(y, x) && p(y, x) != 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("presets match the published settings") {
  const AttackConfig fast = fast_preset();
  CHECK(fast.steps == 40);
  CHECK(fast.step_size == 16.0 / 255.0);
  const AttackConfig slow = long_preset();
  CHECK(slow.steps == 800);
  CHECK(slow.step_size == 4.0 / 255.0);
}

TEST_CASE("pgd_step ascends, masks, and clips") {
  const Index n = 4;
  const Mask all = Mask::Constant(n, n, 1);
  const ImageD x = ImageD::constant(n, n, 3, 0.5);
  const ImageD zero = ImageD::zeros(n, n, 3);
  const double alpha = 16.0 / 255.0;

  ImageD grad = ImageD::constant(n, n, 3, 1.0);
  const ImageD up = pgd_step(x, zero, all, grad, alpha);
  for (const auto& p : up.chan) CHECK((p == alpha).all());

  // ascent from a saturated pixel clips to the box
  const ImageD bright = ImageD::constant(n, n, 3, 0.99);
  const ImageD clipped = pgd_step(bright, zero, all, grad, alpha);
  for (const auto& p : clipped.chan) CHECK((p == 1.0 - 0.99).all());
  CHECK(bright(0, 0, 0) + clipped(0, 0, 0) == 1.0);

  // sign(0) = 0 leaves a valid delta untouched
  const ImageD same = pgd_step(x, up, all, zero, alpha);
  for (int c = 0; c < 3; ++c) CHECK((same.chan[c] == up.chan[c]).all());
}

TEST_CASE("pgd_step zeroes updates outside the mask") {
  const Index n = 6;
  const Mask m = center_block_mask(n, 2);
  const ImageD x = ImageD::constant(n, n, 3, 0.5);
  const ImageD grad = ImageD::constant(n, n, 3, -1.0);
  const ImageD d = pgd_step(x, ImageD::zeros(n, n, 3), m, grad, 0.1);
  CHECK(delta_outside_mask_is_zero(d, m));
  CHECK(d(2, 2, 0) == -0.1);
}

TEST_CASE("pgd_step with alpha 0 is a projection and a fixed point") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const Index n = 8;
  const Mask m = center_block_mask(n, 4);
  const ImageD x = testing::random_image(n, n, 3, 43);
  ImageD delta(n, n, 3);
  for (auto& p : delta.chan)
    for (Index y = 0; y < n; ++y)
      for (Index xx = 0; xx < n; ++xx) p(y, xx) = dist(rng);

  const ImageD zero = ImageD::zeros(n, n, 3);
  const ImageD proj = pgd_step(x, delta, m, zero, 0.0);
  CHECK(delta_outside_mask_is_zero(proj, m));
  for (int c = 0; c < 3; ++c) {
    CHECK((proj.chan[c] >= -x.chan[c]).all());
    CHECK((proj.chan[c] <= 1.0 - x.chan[c]).all());
  }
  const ImageD again = pgd_step(x, proj, m, zero, 0.0);
  for (int c = 0; c < 3; ++c) CHECK((again.chan[c] == proj.chan[c]).all());
}

TEST_CASE("pgd_step rejects mismatched shapes") {
  const ImageD x = ImageD::constant(4, 4, 3, 0.5);
  const ImageD d5 = ImageD::zeros(5, 4, 3);
  const Mask m = Mask::Constant(4, 4, 1);
  CHECK_THROWS_AS(pgd_step(x, d5, m, ImageD::zeros(4, 4, 3), 0.1), InvalidArgumentError);
  CHECK_THROWS_AS(pgd_step(x, ImageD::zeros(4, 4, 3), Mask::Constant(3, 4, 1),
                           ImageD::zeros(4, 4, 3), 0.1),
                  InvalidArgumentError);
}

TEST_CASE("an empty mask makes the attack a no-op") {
  const DetectorModel model = make_random_model(64, 3, 7);
  const ImageD x = generate_scene(70, 64, 8, 3).image;
  const Mask empty = Mask::Zero(64, 64);
  AttackConfig cfg = fast_preset();
  cfg.steps = 5;
  cfg.seed = 3;

  const AttackResult res = run_attack(model, x, empty, LossSpec{}, cfg);
  for (const auto& p : res.delta.chan) CHECK((p == 0.0).all());
  for (int c = 0; c < 3; ++c) CHECK((res.adversarial.chan[c] == x.chan[c]).all());
  CHECK(res.adv_detections == res.clean_detections);
  CHECK(res.loss_trace.size() == 5);
}

TEST_CASE("perturbation support stays inside the mask and the box") {
  const DetectorModel model = make_random_model(64, 3, 8);
  const ImageD x = generate_scene(71, 64, 8, 3).image;
  const Mask m = center_block_mask(64, 9);  // 81 pixels, exactly at budget
  AttackConfig cfg = fast_preset();
  cfg.steps = 10;
  cfg.seed = 4;

  const AttackResult res = run_attack(model, x, m, LossSpec{}, cfg);
  CHECK(delta_outside_mask_is_zero(res.delta, m));
  CHECK(in_unit_range(res.adversarial));
  CHECK(res.loss_trace.size() == 10);
  for (const double v : res.loss_trace) CHECK(std::isfinite(v));
}

TEST_CASE("a mask over budget is rejected up front") {
  const DetectorModel model = make_random_model(64, 3, 9);
  const ImageD x = testing::random_image(64, 64, 3, 10);
  const Mask full = Mask::Constant(64, 64, 1);  // 4096 pixels >> 81
  CHECK_THROWS_AS(run_attack(model, x, full, LossSpec{}, fast_preset()), ConstraintViolationError);
}

TEST_CASE("run_attack is deterministic") {
  const DetectorModel model = make_random_model(64, 3, 11);
  const ImageD x = generate_scene(72, 64, 8, 3).image;
  const Mask m = center_block_mask(64, 7);
  AttackConfig cfg = fast_preset();
  cfg.steps = 6;
  cfg.seed = 12;

  const AttackResult a = run_attack(model, x, m, LossSpec{}, cfg);
  const AttackResult b = run_attack(model, x, m, LossSpec{}, cfg);
  for (int c = 0; c < 3; ++c) CHECK((a.delta.chan[c] == b.delta.chan[c]).all());
  CHECK(a.loss_trace == b.loss_trace);
}

TEST_CASE("flip-averaged gradients keep all attack invariants") {
  const DetectorModel model = make_random_model(64, 3, 13);
  const ImageD x = generate_scene(73, 64, 8, 3).image;
  const Mask m = center_block_mask(64, 8);
  AttackConfig cfg = fast_preset();
  cfg.steps = 6;
  cfg.seed = 14;
  cfg.use_flip_transform = true;

  const AttackResult a = run_attack(model, x, m, LossSpec{}, cfg);
  const AttackResult b = run_attack(model, x, m, LossSpec{}, cfg);
  CHECK(delta_outside_mask_is_zero(a.delta, m));
  CHECK(in_unit_range(a.adversarial));
  for (int c = 0; c < 3; ++c) CHECK((a.delta.chan[c] == b.delta.chan[c]).all());
}

TEST_CASE("hnm_pgd composes the three stages exactly") {
  const DetectorModel model = make_random_model(64, 3, 15);
  const ImageD x = generate_scene(74, 64, 8, 3).image;
  const LossSpec spec{};
  const MaskSearchConfig mask_cfg{};
  const SalienceConfig sal_cfg{8, 0.1, 21};
  AttackConfig cfg = fast_preset();
  cfg.steps = 8;
  cfg.seed = 22;

  const HnmPgdResult pipeline = hnm_pgd(model, x, mask_cfg, spec, cfg, sal_cfg);

  const SalienceMap salience = smoothgrad(model, x, spec, sal_cfg);
  const MaskSearchResult search = find_mask(salience, mask_cfg);
  const AttackResult manual = run_attack(model, x, search.mask, spec, cfg, &mask_cfg);

  CHECK((pipeline.attack.mask == manual.mask).all());
  for (int c = 0; c < 3; ++c)
    CHECK((pipeline.attack.delta.chan[c] == manual.delta.chan[c]).all());
  CHECK(pipeline.attack.loss_trace == manual.loss_trace);
  CHECK(pipeline.phi == search.phi);

  CHECK(pipeline.mask_report.passed);
  CHECK(check_constraints(pipeline.attack.mask, mask_cfg).passed);
}

TEST_CASE("hnm_pgd is deterministic end to end") {
  const DetectorModel model = make_random_model(64, 3, 16);
  const ImageD x = generate_scene(75, 64, 8, 3).image;
  AttackConfig cfg = fast_preset();
  cfg.steps = 5;
  cfg.seed = 30;
  const SalienceConfig sal{4, 0.1, 31};

  const HnmPgdResult a = hnm_pgd(model, x, MaskSearchConfig{}, LossSpec{}, cfg, sal);
  const HnmPgdResult b = hnm_pgd(model, x, MaskSearchConfig{}, LossSpec{}, cfg, sal);
  for (int c = 0; c < 3; ++c)
    CHECK((a.attack.adversarial.chan[c] == b.attack.adversarial.chan[c]).all());
  CHECK((a.attack.mask == b.attack.mask).all());
  CHECK(a.attack.loss_trace == b.attack.loss_trace);
  CHECK(a.phi == b.phi);
}

TEST_CASE("attack config validation") {
  const DetectorModel model = make_random_model(64, 3, 17);
  const ImageD x = testing::random_image(64, 64, 3, 18);
  const Mask m = center_block_mask(64, 4);
  AttackConfig cfg = fast_preset();
  cfg.steps = 0;
  CHECK_THROWS_AS(run_attack(model, x, m, LossSpec{}, cfg), InvalidArgumentError);
  cfg = fast_preset();
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(run_attack(model, x, m, LossSpec{}, cfg), InvalidArgumentError);
}
