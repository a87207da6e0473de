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

#include "hnmpgd/salience.hpp"

#include <random>

namespace hnmpgd {

std::uint64_t sample_seed(std::uint64_t seed, int i) {
  // splitmix64 finalizer over seed advanced by the sample index
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(i) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SalienceMap reduce_channels_absmax(const ImageD& grad) {
  if (grad.channels() == 0) throw InvalidArgumentError("reduce_channels_absmax: empty input");
  SalienceMap map = grad.chan[0].abs();
  for (std::size_t c = 1; c < grad.chan.size(); ++c) map = map.max(grad.chan[c].abs());
  return map;
}

SalienceMap smoothgrad(const DetectorModel& model, const ImageD& x, const LossSpec& spec,
                       const SalienceConfig& cfg) {
  if (cfg.n < 1) throw InvalidArgumentError("smoothgrad: sample count must be >= 1");
  if (cfg.sigma < 0) throw InvalidArgumentError("smoothgrad: sigma must be non-negative");
  validate(spec);

  ImageD sum = ImageD::zeros(x.height(), x.width(), x.channels());
  for (int i = 0; i < cfg.n; ++i) {
    ImageD probe = x;
    if (cfg.sigma > 0) {
      std::mt19937_64 rng(sample_seed(cfg.seed, i));
      std::normal_distribution<double> noise(0.0, cfg.sigma);
      for (auto& p : probe.chan)
        for (Index y = 0; y < p.rows(); ++y)
          for (Index xx = 0; xx < p.cols(); ++xx) p(y, xx) += noise(rng);
    }
    const ImageD g = input_gradient_native(model, probe, spec);
    for (int c = 0; c < sum.channels(); ++c) sum.chan[static_cast<std::size_t>(c)] += g.chan[static_cast<std::size_t>(c)];
  }
  for (auto& p : sum.chan) p /= static_cast<double>(cfg.n);
  return reduce_channels_absmax(sum);
}

PlaneD normalize_minmax(const SalienceMap& map) {
  if (map.size() == 0) throw InvalidArgumentError("normalize_minmax: empty map");
  const double lo = map.minCoeff(), hi = map.maxCoeff();
  if (hi == lo) return PlaneD::Zero(map.rows(), map.cols());
  return (map - lo) / (hi - lo);
}

}  // namespace hnmpgd
