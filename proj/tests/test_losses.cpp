#include <doctest.h>

#include <cmath>
#include <random>

#include "hnmpgd/losses.hpp"
#include "oracles.hpp"

using namespace hnmpgd;

namespace {

DetectorOutput single_box(double conf, std::initializer_list<double> logits) {
  DetectorOutput out;
  out.conf = Eigen::VectorXd::Constant(1, conf);
  out.cls_logits = Eigen::MatrixXd(1, static_cast<Index>(logits.size()));
  Index j = 0;
  for (const double v : logits) out.cls_logits(0, j++) = v;
  return out;
}

DetectorOutput random_output(Index m, Index classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> conf(0.01, 0.99);
  std::uniform_real_distribution<double> logit(-2.0, 2.0);
  DetectorOutput out;
  out.conf = Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return conf(rng); });
  out.cls_logits = Eigen::MatrixXd::NullaryExpr(m, classes + 1,
                                                [&](Eigen::Index, Eigen::Index) { return logit(rng); });
  return out;
}

}  // namespace

TEST_CASE("yolo loss on single boxes") {
  const LossSpec spec{LossKind::yolo, 0.3, 0.1};
  CHECK(loss_yolo(single_box(1.0, {0, 0, 0, 0}), spec) == 0.0);
  CHECK(loss_yolo(single_box(std::exp(-1.0), {0, 0, 0, 0}), spec) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("yolo loss sums only qualifying boxes") {
  DetectorOutput out;
  out.conf = Eigen::VectorXd(3);
  out.conf << 0.9, 0.2, 0.5;
  out.cls_logits = Eigen::MatrixXd::Constant(3, 4, -5.0);  // keep the class head quiet
  const LossSpec spec{LossKind::yolo, 0.3, 0.1};
  const double expected = -std::log(0.9) - std::log(0.5);
  CHECK(loss_yolo(out, spec) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.7985).epsilon(1e-4));
}

TEST_CASE("frcnn loss on single boxes") {
  const LossSpec spec{LossKind::frcnn, 0.3, 0.1};

  // Uniform logits: every class at probability 1/4, qualifies, value -log 4.
  CHECK(loss_frcnn(single_box(0.5, {0, 0, 0, 0}), spec) ==
        doctest::Approx(-std::log(4.0)).epsilon(1e-12));

  // Dominant background never qualifies: foreground probabilities are tiny.
  CHECK(loss_frcnn(single_box(0.5, {0, 0, 0, 10}), spec) == 0.0);

  // Max-subtracted log-sum-exp stays finite at extreme logits.
  CHECK(loss_frcnn(single_box(0.5, {1000, 1000, 1000, 1000}), spec) ==
        doctest::Approx(-std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("combined loss is the sum of both") {
  const LossSpec spec{LossKind::combined, 0.3, 0.1};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DetectorOutput out = random_output(16, 3, 1000 + seed);
    CHECK(loss_combined(out, spec) ==
          doctest::Approx(loss_yolo(out, spec) + loss_frcnn(out, spec)).epsilon(1e-12));
  }
}

TEST_CASE("no qualifying boxes means a constant zero loss and zero gradient") {
  const DetectorModel model = make_zero_model(64, 3);  // conf 0.5, uniform classes
  const LossSpec tight{LossKind::combined, 0.99, 0.99};
  const ImageD x = testing::random_image(64, 64, 3, 42);
  double loss = -1;
  const ImageD g = input_gradient(model, x, tight, &loss);
  CHECK(loss == 0.0);
  for (const auto& p : g.chan) CHECK((p == 0.0).all());
}

TEST_CASE("analytic input gradients match central finite differences") {
  const double h = 1e-3;
  const DetectorModel model = make_random_model(64, 3, 5150);
  for (const LossKind kind : {LossKind::yolo, LossKind::frcnn, LossKind::combined}) {
    const LossSpec spec{kind, 0.3, 0.1};
    for (std::uint64_t img_seed = 0; img_seed < 2; ++img_seed) {
      const ImageD x = testing::random_image(64, 64, 3, 900 + img_seed);
      const ImageD g = input_gradient(model, x, spec);
      std::mt19937_64 rng(77 + img_seed);
      std::uniform_int_distribution<Index> pick(0, 63);
      std::uniform_int_distribution<int> pick_c(0, 2);
      int tested = 0, redraws = 0;
      while (tested < 20 && redraws < 200) {
        const Index y = pick(rng), xx = pick(rng);
        const int c = pick_c(rng);
        if (!testing::fd_stencil_is_smooth(model, x, spec, y, xx, c, h)) {
          ++redraws;  // stencil straddles a ReLU kink; FD is no oracle there
          continue;
        }
        ++tested;
        const double analytic = g(y, xx, c);
        const double numeric = testing::fd_loss(model, x, spec, y, xx, c, h);
        if (std::abs(analytic) < 1e-6) {
          CHECK(std::abs(numeric - analytic) < 1e-8);
        } else {
          CHECK(std::abs(numeric - analytic) / std::abs(analytic) < 1e-3);
        }
      }
      CHECK(tested == 20);
    }
  }
}

TEST_CASE("gradient of the combined loss is the sum of the parts") {
  const DetectorModel model = make_random_model(64, 3, 31);
  const ImageD x = testing::random_image(64, 64, 3, 32);
  const ImageD gy = input_gradient(model, x, LossSpec{LossKind::yolo, 0.3, 0.1});
  const ImageD gf = input_gradient(model, x, LossSpec{LossKind::frcnn, 0.3, 0.1});
  const ImageD gc = input_gradient(model, x, LossSpec{LossKind::combined, 0.3, 0.1});
  for (int c = 0; c < 3; ++c)
    CHECK(((gc.chan[c] - gy.chan[c] - gf.chan[c]).abs() < 1e-10).all());
}

TEST_CASE("loss spec validation") {
  CHECK_THROWS_AS(validate(LossSpec{LossKind::yolo, 0.0, 0.1}), InvalidArgumentError);
  CHECK_THROWS_AS(validate(LossSpec{LossKind::yolo, 0.3, 1.0}), InvalidArgumentError);
  CHECK_NOTHROW(validate(LossSpec{}));
  CHECK(loss_kind_from_string("combined") == LossKind::combined);
  CHECK(to_string(LossKind::frcnn) == "frcnn");
  CHECK_THROWS_AS(loss_kind_from_string("ssd"), InvalidArgumentError);
}
