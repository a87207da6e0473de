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

#ifndef HNMPGD_TRAIN_HPP_
#define HNMPGD_TRAIN_HPP_

#include <cstdint>
#include <vector>

#include "hnmpgd/detector.hpp"
#include "hnmpgd/synth.hpp"

namespace hnmpgd {

struct TrainStats {
  std::vector<double> epoch_mean_loss;
};

/// Plain SGD on per-cell objectness BCE plus class cross-entropy, one scene
/// at a time in a seeded shuffled order. Throws TrainingDivergedError on a
/// non-finite loss.
DetectorModel train(DetectorModel model, const std::vector<SyntheticScene>& scenes, int epochs,
                    double learning_rate, std::uint64_t seed, TrainStats* stats = nullptr);

/// Fraction of cells where (conf > 0.5) agrees with the objectness label.
double objectness_accuracy(const DetectorModel& model, const std::vector<SyntheticScene>& scenes);

/// Fraction of cells whose class-logit argmax matches the label.
double class_accuracy(const DetectorModel& model, const std::vector<SyntheticScene>& scenes);

}  // namespace hnmpgd

#endif  // HNMPGD_TRAIN_HPP_
