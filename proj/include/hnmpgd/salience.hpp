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

#ifndef HNMPGD_SALIENCE_HPP_
#define HNMPGD_SALIENCE_HPP_

#include <cstdint>

#include "hnmpgd/losses.hpp"

namespace hnmpgd {

struct SalienceConfig {
  int n = 16;          // gradient samples
  double sigma = 0.1;  // noise standard deviation, intensity units
  std::uint64_t seed = 0;
};

/// Engine seed for the i-th noise sample (splitmix64 mix of seed and i).
std::uint64_t sample_seed(std::uint64_t seed, int i);

/// Per-pixel maximum absolute value across channels.
SalienceMap reduce_channels_absmax(const ImageD& grad);

/// Averages n input gradients under i.i.d. Gaussian pixel noise N(0, sigma^2)
/// added before any clamping, then reduces channels with
/// reduce_channels_absmax. Images that do not match the model side are
/// handled through the resize/adjoint path so the map stays at native
/// resolution.
SalienceMap smoothgrad(const DetectorModel& model, const ImageD& x, const LossSpec& spec,
                       const SalienceConfig& cfg);

/// Min-max normalization to [0,1]; a constant map comes back all zero.
PlaneD normalize_minmax(const SalienceMap& map);

}  // namespace hnmpgd

#endif  // HNMPGD_SALIENCE_HPP_
