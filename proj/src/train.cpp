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

#include "hnmpgd/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hnmpgd {

namespace {

void axpy_layer(ConvLayer& dst, const ConvLayer& g, double a) {
  for (std::size_t i = 0; i < dst.weights.size(); ++i) dst.weights[i] += a * g.weights[i];
  dst.bias += a * g.bias;
}

void zero_layer(ConvLayer& L) {
  for (auto& k : L.weights) k.setZero();
  L.bias.setZero();
}

}  // namespace

DetectorModel train(DetectorModel model, const std::vector<SyntheticScene>& scenes, int epochs,
                    double learning_rate, std::uint64_t seed, TrainStats* stats) {
  if (epochs < 1) throw InvalidArgumentError("train: epochs must be >= 1");
  if (learning_rate <= 0) throw InvalidArgumentError("train: learning rate must be positive");
  if (scenes.empty()) throw InvalidArgumentError("train: no scenes");

  const int m = model.cell_count();
  const int bg = model.classes;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(scenes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  DetectorModel grads = make_zero_model(model.side, model.classes);
  if (stats) stats->epoch_mean_loss.clear();

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;

    for (const std::size_t si : order) {
      const SyntheticScene& sc = scenes[si];
      ForwardTrace trace;
      const DetectorOutput out = forward(model, sc.image, trace);

      OutputGrad og;
      og.dobj_logit = Eigen::VectorXd::Zero(m);
      og.dcls_logits = Eigen::MatrixXd::Zero(m, model.classes + 1);

      double loss = 0.0;
      for (int r = 0; r < model.grid; ++r)
        for (int c = 0; c < model.grid; ++c) {
          const int idx = r * model.grid + c;
          const double t = sc.objectness(r, c) ? 1.0 : 0.0;
          const double conf = out.conf(idx);
          loss += t > 0.5 ? -std::log(conf) : -std::log1p(-conf);
          og.dobj_logit(idx) = (conf - t) / m;

          const int label = sc.cls(r, c);
          const Eigen::ArrayXd row = out.cls_logits.row(idx).array();
          const double maxv = row.maxCoeff();
          const Eigen::ArrayXd exps = (row - maxv).exp();
          const double denom = exps.sum();
          loss += -(row(label) - maxv - std::log(denom));
          for (int j = 0; j <= bg; ++j)
            og.dcls_logits(idx, j) = (exps(j) / denom - (j == label ? 1.0 : 0.0)) / m;
        }
      loss /= m;
      if (!std::isfinite(loss)) throw TrainingDivergedError("train: non-finite loss");
      loss_sum += loss;

      zero_layer(grads.conv1);
      zero_layer(grads.conv2);
      zero_layer(grads.head);
      backward(model, trace, og, &grads, nullptr);
      axpy_layer(model.conv1, grads.conv1, -learning_rate);
      axpy_layer(model.conv2, grads.conv2, -learning_rate);
      axpy_layer(model.head, grads.head, -learning_rate);
    }

    if (stats) stats->epoch_mean_loss.push_back(loss_sum / static_cast<double>(scenes.size()));
  }
  return model;
}

double objectness_accuracy(const DetectorModel& model, const std::vector<SyntheticScene>& scenes) {
  if (scenes.empty()) throw InvalidArgumentError("objectness_accuracy: no scenes");
  long correct = 0, total = 0;
  for (const auto& sc : scenes) {
    const DetectorOutput out = forward(model, sc.image);
    for (int r = 0; r < model.grid; ++r)
      for (int c = 0; c < model.grid; ++c) {
        const bool predicted = out.conf(r * model.grid + c) > 0.5;
        const bool truth = sc.objectness(r, c) != 0;
        correct += predicted == truth;
        ++total;
      }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

double class_accuracy(const DetectorModel& model, const std::vector<SyntheticScene>& scenes) {
  if (scenes.empty()) throw InvalidArgumentError("class_accuracy: no scenes");
  long correct = 0, total = 0;
  for (const auto& sc : scenes) {
    const DetectorOutput out = forward(model, sc.image);
    for (int r = 0; r < model.grid; ++r)
      for (int c = 0; c < model.grid; ++c) {
        Eigen::Index argmax = 0;
        out.cls_logits.row(r * model.grid + c).maxCoeff(&argmax);
        correct += static_cast<int>(argmax) == sc.cls(r, c);
        ++total;
      }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace hnmpgd
