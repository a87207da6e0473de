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

#ifndef HNMPGD_MASKGEN_HPP_
#define HNMPGD_MASKGEN_HPP_

#include <string>

#include "hnmpgd/core.hpp"

namespace hnmpgd {

struct MaskSearchConfig {
  double phi0 = 1.0;       // initial threshold control parameter
  double phi_step = 0.1;   // escalation increment per failed attempt
  int k0 = 9;              // initial half-neighbor kernel size, odd
  int shrink = 2;          // kernel shrink per round, even
  int max_attempts = 50;
  double pixel_budget_fraction = 0.02;
  int max_regions = 10;
  Index min_pixels = 8;    // reject degenerate masks below this
};

void validate(const MaskSearchConfig& cfg);

struct ConstraintReport {
  Index pixel_count = 0;
  Index pixel_budget = 0;
  int region_count = 0;
  int region_budget = 0;
  Index min_pixels = 0;
  bool passed = false;
};

class SearchFailedError : public Error {
 public:
  SearchFailedError(const std::string& msg, ConstraintReport report)
      : Error(msg), last_report(report) {}
  ConstraintReport last_report;
};

/// Selects pixels whose salience strictly exceeds mean + phi * std, with the
/// population (divide by N) standard deviation.
Mask threshold_init(const SalienceMap& salience, double phi);

/// Half-neighbor refinement: a pixel survives iff the k x k window centered
/// on it (zero padded, center included) holds at least ceil(k^2/2) set
/// pixels. k must be odd and >= 3.
Mask hn_refine(const Mask& mask, int k);

/// Connected components of set pixels under 8-connectivity, by union-find.
int count_regions8(const Mask& mask);

/// Pixel budget is floor(pixel_budget_fraction * H * W).
ConstraintReport check_constraints(const Mask& mask, const MaskSearchConfig& cfg);

struct MaskSearchResult {
  Mask mask;
  ConstraintReport report;
  double phi = 0;
  int attempts = 0;
};

/// The full mask search: threshold at the current phi, run the shrinking
/// half-neighbor refinement rounds (each paired with a 3x3 pass), check the
/// constraints, and escalate phi until a mask passes. Throws
/// SearchFailedError with the last report when attempts run out.
MaskSearchResult find_mask(const SalienceMap& salience, const MaskSearchConfig& cfg);

}  // namespace hnmpgd

#endif  // HNMPGD_MASKGEN_HPP_
