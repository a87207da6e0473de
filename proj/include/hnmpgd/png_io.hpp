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

#ifndef HNMPGD_PNG_IO_HPP_
#define HNMPGD_PNG_IO_HPP_

#include <filesystem>

#include "hnmpgd/core.hpp"

namespace hnmpgd {

/// Stores an image as 8-bit PNG (grayscale for 1 channel, RGB for 3).
/// Intensities quantize as round(v * 255), half away from zero.
void save_png(const ImageD& img, const std::filesystem::path& path);

/// Stores a mask as 8-bit grayscale PNG with values {0, 255}.
void save_png(const Mask& mask, const std::filesystem::path& path);

/// Loads an 8-bit PNG; byte b maps to intensity b / 255.
/// Palette images expand to RGB and alpha is stripped; 16-bit depth is
/// rejected with UnsupportedBitDepthError.
ImageD load_png(const std::filesystem::path& path);

/// Reinterprets a single-channel image as a binary mask (intensity > 0.5).
Mask mask_from_image(const ImageD& img);

/// Raw salience export: two little-endian uint32 dims (height, width)
/// followed by height*width little-endian float32 values, row-major.
void save_raw(const SalienceMap& map, const std::filesystem::path& path);

SalienceMap load_raw(const std::filesystem::path& path);

}  // namespace hnmpgd

#endif  // HNMPGD_PNG_IO_HPP_
