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

#ifndef HNMPGD_VERIFY_HPP_
#define HNMPGD_VERIFY_HPP_

#include "hnmpgd/maskgen.hpp"

namespace hnmpgd {

/// Mask implied by a clean/adversarial pair: a pixel is set iff any channel
/// differs exactly. Intended for images loaded from PNG, where equality of
/// intensities coincides with equality of the stored 8-bit values.
Mask derived_mask_from_pair(const ImageD& clean, const ImageD& adversarial);

/// Derives the implied mask and checks it against the budget.
ConstraintReport verify_pair(const ImageD& clean, const ImageD& adversarial,
                             const MaskSearchConfig& cfg);

}  // namespace hnmpgd

#endif  // HNMPGD_VERIFY_HPP_
