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

#ifndef HNMPGD_CORE_HPP_
#define HNMPGD_CORE_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnmpgd {

using Index = Eigen::Index;

/// Dense H×W plane of scalars, row-major to match raster order.
template <class Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneD = Plane<double>;

/// Binary H×W mask; every element is exactly 0 or 1.
using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Non-negative per-pixel salience values.
using SalienceMap = PlaneD;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MalformedFileError : public Error {
 public:
  using Error::Error;
};

class UnsupportedBitDepthError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

class AttackDivergedError : public Error {
 public:
  using Error::Error;
};

class ConstraintViolationError : public Error {
 public:
  using Error::Error;
};

/// H×W×C raster with C ∈ {1, 3}, stored as separate channel planes.
///
/// Proper images keep every value in [0,1]; the same container also carries
/// image-shaped gradients and perturbations, which are unbounded, so range
/// is a contract of the producing operation rather than of the type.
template <class Scalar = double>
struct Image {
  std::vector<Plane<Scalar>> chan;

  Image() = default;

  Image(Index h, Index w, int c) {
    if (h < 1 || w < 1 || (c != 1 && c != 3))
      throw InvalidArgumentError("Image: bad dimensions");
    chan.assign(static_cast<std::size_t>(c), Plane<Scalar>::Zero(h, w));
  }

  static Image zeros(Index h, Index w, int c) { return Image(h, w, c); }

  static Image constant(Index h, Index w, int c, Scalar v) {
    Image img(h, w, c);
    for (auto& p : img.chan) p.setConstant(v);
    return img;
  }

  Index height() const { return chan.empty() ? 0 : chan[0].rows(); }
  Index width() const { return chan.empty() ? 0 : chan[0].cols(); }
  int channels() const { return static_cast<int>(chan.size()); }
  Index size() const { return height() * width() * channels(); }

  Scalar operator()(Index y, Index x, int c) const { return chan[static_cast<std::size_t>(c)](y, x); }
  Scalar& operator()(Index y, Index x, int c) { return chan[static_cast<std::size_t>(c)](y, x); }
};

using ImageD = Image<double>;

template <class Scalar>
bool same_shape(const Image<Scalar>& a, const Image<Scalar>& b) {
  return a.height() == b.height() && a.width() == b.width() && a.channels() == b.channels();
}

template <class Scalar>
bool in_unit_range(const Image<Scalar>& img) {
  for (const auto& p : img.chan)
    if ((p < Scalar(0)).any() || (p > Scalar(1)).any()) return false;
  return true;
}

template <class Scalar>
void clamp01(Image<Scalar>& img) {
  for (auto& p : img.chan) p = p.min(Scalar(1)).max(Scalar(0));
}

template <class Scalar>
bool is_binary(const Plane<Scalar>& m) {
  return ((m == Scalar(0)) || (m == Scalar(1))).all();
}

inline Index mask_count(const Mask& m) {
  return m.template cast<Index>().sum();
}

}  // namespace hnmpgd

#endif  // HNMPGD_CORE_HPP_
