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

#include "hnmpgd/maskgen.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace hnmpgd {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

void validate(const MaskSearchConfig& cfg) {
  if (cfg.k0 < 3 || cfg.k0 % 2 == 0)
    throw InvalidArgumentError("MaskSearchConfig: k0 must be odd and >= 3");
  if (cfg.shrink < 2 || cfg.shrink % 2 != 0)
    throw InvalidArgumentError("MaskSearchConfig: shrink step must be even and >= 2");
  if (!(cfg.pixel_budget_fraction > 0.0 && cfg.pixel_budget_fraction <= 1.0))
    throw InvalidArgumentError("MaskSearchConfig: pixel_budget_fraction must be in (0,1]");
  if (cfg.max_attempts < 1) throw InvalidArgumentError("MaskSearchConfig: max_attempts must be >= 1");
  if (cfg.max_regions < 1) throw InvalidArgumentError("MaskSearchConfig: max_regions must be >= 1");
  if (cfg.min_pixels < 0) throw InvalidArgumentError("MaskSearchConfig: min_pixels must be >= 0");
  if (cfg.phi_step <= 0) throw InvalidArgumentError("MaskSearchConfig: phi_step must be positive");
}

Mask threshold_init(const SalienceMap& salience, double phi) {
  if (salience.size() == 0) throw InvalidArgumentError("threshold_init: empty salience map");
  // A constant map has zero spread, and the strict comparison below must
  // select nothing; handle it before summation rounding can blur the mean.
  if ((salience == salience(0, 0)).all()) return Mask::Zero(salience.rows(), salience.cols());
  const double mean = salience.mean();
  const double var = (salience - mean).square().mean();
  const double z_resp = mean + phi * std::sqrt(var);
  return (salience > z_resp).cast<std::uint8_t>();
}

Mask hn_refine(const Mask& mask, int k) {
  if (k < 3 || k % 2 == 0) throw InvalidArgumentError("hn_refine: kernel size must be odd and >= 3");
  const Index h = mask.rows(), w = mask.cols();
  const Index r = k / 2;
  const Index need = (static_cast<Index>(k) * k + 1) / 2;  // ceil(k^2 / 2)

  // Summed-area table, one pad row/column of zeros.
  Plane<Index> sat = Plane<Index>::Zero(h + 1, w + 1);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      sat(y + 1, x + 1) = static_cast<Index>(mask(y, x)) + sat(y, x + 1) + sat(y + 1, x) - sat(y, x);

  Mask out(h, w);
  for (Index y = 0; y < h; ++y) {
    const Index y0 = std::max<Index>(0, y - r), y1 = std::min<Index>(h - 1, y + r);
    for (Index x = 0; x < w; ++x) {
      const Index x0 = std::max<Index>(0, x - r), x1 = std::min<Index>(w - 1, x + r);
      const Index sum = sat(y1 + 1, x1 + 1) - sat(y0, x1 + 1) - sat(y1 + 1, x0) + sat(y0, x0);
      out(y, x) = sum >= need ? 1 : 0;
    }
  }
  return out;
}

int count_regions8(const Mask& mask) {
  const Index h = mask.rows(), w = mask.cols();
  if (h == 0 || w == 0) return 0;

  UnionFind uf(static_cast<std::size_t>(h * w));
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      if (!mask(y, x)) continue;
      const std::size_t idx = static_cast<std::size_t>(y * w + x);
      if (x > 0 && mask(y, x - 1)) uf.unite(idx, idx - 1);
      if (y > 0) {
        const std::size_t up = idx - static_cast<std::size_t>(w);
        if (mask(y - 1, x)) uf.unite(idx, up);
        if (x > 0 && mask(y - 1, x - 1)) uf.unite(idx, up - 1);
        if (x + 1 < w && mask(y - 1, x + 1)) uf.unite(idx, up + 1);
      }
    }

  int regions = 0;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y * w + x);
      if (mask(y, x) && uf.find(idx) == idx) ++regions;
    }
  return regions;
}

ConstraintReport check_constraints(const Mask& mask, const MaskSearchConfig& cfg) {
  ConstraintReport report;
  report.pixel_budget = static_cast<Index>(
      std::floor(cfg.pixel_budget_fraction * static_cast<double>(mask.rows() * mask.cols())));
  report.region_budget = cfg.max_regions;
  report.min_pixels = cfg.min_pixels;
  report.pixel_count = mask_count(mask);
  report.region_count = count_regions8(mask);
  report.passed = report.pixel_count <= report.pixel_budget &&
                  report.region_count <= report.region_budget &&
                  report.pixel_count >= report.min_pixels;
  return report;
}

MaskSearchResult find_mask(const SalienceMap& salience, const MaskSearchConfig& cfg) {
  validate(cfg);
  if (salience.size() == 0) throw InvalidArgumentError("find_mask: empty salience map");

  double phi = cfg.phi0;
  ConstraintReport last;
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    Mask mask = threshold_init(salience, phi);
    for (int k = cfg.k0; k > 3; k -= cfg.shrink) {
      mask = hn_refine(mask, k);
      mask = hn_refine(mask, 3);
    }
    last = check_constraints(mask, cfg);
    if (last.passed) return MaskSearchResult{std::move(mask), last, phi, attempt};
    phi += cfg.phi_step;
  }
  throw SearchFailedError("find_mask: no feasible mask within attempt budget", last);
}

}  // namespace hnmpgd
