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

#include "hnmpgd/verify.hpp"

namespace hnmpgd {

Mask derived_mask_from_pair(const ImageD& clean, const ImageD& adversarial) {
  if (!same_shape(clean, adversarial))
    throw InvalidArgumentError("derived_mask_from_pair: image dimensions disagree");
  Mask mask = Mask::Zero(clean.height(), clean.width());
  for (int c = 0; c < clean.channels(); ++c) {
    const auto& a = clean.chan[static_cast<std::size_t>(c)];
    const auto& b = adversarial.chan[static_cast<std::size_t>(c)];
    mask = mask.max((a != b).cast<std::uint8_t>());
  }
  return mask;
}

ConstraintReport verify_pair(const ImageD& clean, const ImageD& adversarial,
                             const MaskSearchConfig& cfg) {
  return check_constraints(derived_mask_from_pair(clean, adversarial), cfg);
}

}  // namespace hnmpgd
