#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hnmpgd/detector.hpp"
#include "oracles.hpp"

using namespace hnmpgd;
namespace fs = std::filesystem;

namespace {

// Deterministic full-range test pattern, no RNG involved.
ImageD pattern_image(int side) {
  ImageD img(side, side, 3);
  for (int c = 0; c < 3; ++c)
    for (Index y = 0; y < side; ++y)
      for (Index x = 0; x < side; ++x)
        img(y, x, c) = static_cast<double>((y * 31 + x * 17 + c * 7) % 64) / 63.0;
  return img;
}

}  // namespace

TEST_CASE("forward obeys the shape contract") {
  const DetectorModel model = make_random_model(64, 3, 1);
  const DetectorOutput out = forward(model, testing::random_image(64, 64, 3, 2));
  CHECK(out.conf.size() == 64);
  CHECK(out.cls_logits.rows() == 64);
  CHECK(out.cls_logits.cols() == 4);
  CHECK((out.conf.array() > 0.0).all());
  CHECK((out.conf.array() < 1.0).all());
}

TEST_CASE("all-zero weights yield conf 0.5 everywhere") {
  const DetectorModel model = make_zero_model(64, 3);
  const DetectorOutput out = forward(model, testing::random_image(64, 64, 3, 3));
  CHECK((out.conf.array() == 0.5).all());
  CHECK((out.cls_logits.array() == 0.0).all());
}

TEST_CASE("forward is deterministic") {
  const DetectorModel model = make_random_model(64, 3, 17);
  const ImageD x = testing::random_image(64, 64, 3, 18);
  const DetectorOutput a = forward(model, x);
  const DetectorOutput b = forward(model, x);
  CHECK((a.conf.array() == b.conf.array()).all());
  CHECK((a.cls_logits.array() == b.cls_logits.array()).all());
}

TEST_CASE("forward rejects mismatched inputs") {
  const DetectorModel model = make_random_model(64, 3, 4);
  CHECK_THROWS_AS(forward(model, testing::random_image(32, 64, 3, 5)), InvalidArgumentError);
  CHECK_THROWS_AS(forward(model, testing::random_image(64, 64, 1, 6)), InvalidArgumentError);
}

TEST_CASE("seeded forward matches the recorded golden values") {
  const DetectorModel model = make_random_model(64, 3, 12345);
  const DetectorOutput out = forward(model, pattern_image(64));

  // Recorded once from this seeded configuration; guards against silent
  // numeric drift in the conv/pool/head pipeline.
  const double golden_conf[4] = {0.52952282599285394, 0.52879881060598055, 0.52851504009623917,
                                 0.5286125364911648};
  const double golden_cls[4] = {0.023404319801310927, -0.062808325202701673, -0.30504141287592629,
                                0.020854421558786914};
  for (int i = 0; i < 4; ++i)
    CHECK(out.conf(i * 16) == doctest::Approx(golden_conf[i]).epsilon(1e-12));
  for (int j = 0; j < 4; ++j)
    CHECK(out.cls_logits(20, j) == doctest::Approx(golden_cls[j]).epsilon(1e-12));
}

TEST_CASE("detect_count counts via either head") {
  // All conf at 0.5 with flat class logits: every cell passes the conf head.
  DetectorOutput out;
  out.conf = Eigen::VectorXd::Constant(64, 0.5);
  out.cls_logits = Eigen::MatrixXd::Zero(64, 4);
  CHECK(detect_count(out, 0.3, 0.3) == 64);

  // Low conf and dominant background suppress both heads.
  out.conf.setConstant(0.1);
  out.cls_logits.col(3).setConstant(8.0);
  CHECK(detect_count(out, 0.3, 0.3) == 0);
}

TEST_CASE("detect_count on a hand-built mixed output") {
  DetectorOutput out;
  out.conf = Eigen::VectorXd::Zero(5);
  out.cls_logits = Eigen::MatrixXd::Zero(5, 4);

  out.conf(0) = 0.9;                     // qualifies via conf
  out.cls_logits.row(0) << 0, 0, 0, 6;   // class head would say background

  out.conf(1) = 0.1;                     // conf head silent
  out.cls_logits.row(1) << 4, 0, 0, 0;   // argmax class 0, prob ~0.95 -> qualifies

  out.conf(2) = 0.2;
  out.cls_logits.row(2) << 0, 0, 0, 4;   // argmax background -> no

  out.conf(3) = 0.35;                    // qualifies via conf
  out.cls_logits.row(3) << 0, 0, 0, 0;

  out.conf(4) = 0.05;
  out.cls_logits.row(4) << 0.1, 0, 0, 0.2;  // argmax background -> no

  CHECK(detect_count(out, 0.3, 0.3) == 3);
}

TEST_CASE("detect_count is monotone in both thresholds") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> logit(-3.0, 3.0);
  std::uniform_real_distribution<double> th(0.05, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    DetectorOutput out;
    out.conf = Eigen::VectorXd::NullaryExpr(16, [&](Eigen::Index) {
      return 1.0 / (1.0 + std::exp(-logit(rng)));
    });
    out.cls_logits = Eigen::MatrixXd::NullaryExpr(16, 4, [&](Eigen::Index, Eigen::Index) {
      return logit(rng);
    });
    double c1 = th(rng), c2 = th(rng);
    if (c1 > c2) std::swap(c1, c2);
    double k1 = th(rng), k2 = th(rng);
    if (k1 > k2) std::swap(k1, k2);
    CHECK(detect_count(out, c2, k1) <= detect_count(out, c1, k1));
    CHECK(detect_count(out, c1, k2) <= detect_count(out, c1, k1));
  }
}

TEST_CASE("checkpoint round trip preserves the stored weights") {
  const fs::path dir = fs::temp_directory_path() / "hnmpgd_ckpt_tests";
  fs::create_directories(dir);
  const fs::path first = dir / "model.ckpt";
  const fs::path second = dir / "model2.ckpt";

  const DetectorModel model = make_random_model(64, 3, 77);
  save_checkpoint(model, first);
  const DetectorModel loaded = load_checkpoint(first);
  CHECK(loaded.side == 64);
  CHECK(loaded.grid == 8);
  CHECK(loaded.classes == 3);

  // float32 quantization happens exactly once
  CHECK(loaded.conv1.w(0, 0)(0, 0) ==
        static_cast<double>(static_cast<float>(model.conv1.w(0, 0)(0, 0))));

  save_checkpoint(loaded, second);
  std::ifstream a(first, std::ios::binary), b(second, std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string bytes_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(bytes_a == bytes_b);
}

TEST_CASE("checkpoint loader rejects foreign files") {
  const fs::path dir = fs::temp_directory_path() / "hnmpgd_ckpt_tests";
  fs::create_directories(dir);
  const fs::path bogus = dir / "bogus.ckpt";
  std::ofstream(bogus, std::ios::binary) << "not a checkpoint at all";
  CHECK_THROWS_AS(load_checkpoint(bogus), MalformedFileError);
  CHECK_THROWS_AS(load_checkpoint(dir / "nope.ckpt"), IoError);
}
