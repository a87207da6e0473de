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

#ifndef HNMPGD_RESIZE_HPP_
#define HNMPGD_RESIZE_HPP_

#include <vector>

#include "hnmpgd/core.hpp"

namespace hnmpgd {

namespace detail {

/// Per-output-index source taps of a 1-D bilinear resampling axis.
/// Source coordinate follows the half-pixel-center convention:
///   src = (dst + 0.5) * (in / out) - 0.5, clamped to [0, in-1].
template <class Scalar>
struct AxisTaps {
  std::vector<Index> lo, hi;
  std::vector<Scalar> frac;  // weight of `hi`; `lo` gets 1 - frac
};

template <class Scalar>
AxisTaps<Scalar> make_axis_taps(Index in, Index out) {
  AxisTaps<Scalar> t;
  t.lo.resize(static_cast<std::size_t>(out));
  t.hi.resize(static_cast<std::size_t>(out));
  t.frac.resize(static_cast<std::size_t>(out));
  const Scalar scale = static_cast<Scalar>(in) / static_cast<Scalar>(out);
  for (Index i = 0; i < out; ++i) {
    Scalar src = (static_cast<Scalar>(i) + Scalar(0.5)) * scale - Scalar(0.5);
    if (src < Scalar(0)) src = Scalar(0);
    const Scalar last = static_cast<Scalar>(in - 1);
    if (src > last) src = last;
    const Index lo = static_cast<Index>(src);
    const Index hi = lo + 1 < in ? lo + 1 : in - 1;
    t.lo[static_cast<std::size_t>(i)] = lo;
    t.hi[static_cast<std::size_t>(i)] = hi;
    t.frac[static_cast<std::size_t>(i)] = src - static_cast<Scalar>(lo);
  }
  return t;
}

}  // namespace detail

/// Bilinear resampling of one plane to out_h × out_w.
template <class Scalar>
Plane<Scalar> resize_plane_bilinear(const Plane<Scalar>& src, Index out_h, Index out_w) {
  if (out_h < 1 || out_w < 1) throw InvalidArgumentError("resize_bilinear: zero-sized target");
  if (src.rows() < 1 || src.cols() < 1) throw InvalidArgumentError("resize_bilinear: empty source");
  if (out_h == src.rows() && out_w == src.cols()) return src;

  const auto ty = detail::make_axis_taps<Scalar>(src.rows(), out_h);
  const auto tx = detail::make_axis_taps<Scalar>(src.cols(), out_w);
  Plane<Scalar> dst(out_h, out_w);
  for (Index y = 0; y < out_h; ++y) {
    const Index y0 = ty.lo[static_cast<std::size_t>(y)];
    const Index y1 = ty.hi[static_cast<std::size_t>(y)];
    const Scalar fy = ty.frac[static_cast<std::size_t>(y)];
    for (Index x = 0; x < out_w; ++x) {
      const Index x0 = tx.lo[static_cast<std::size_t>(x)];
      const Index x1 = tx.hi[static_cast<std::size_t>(x)];
      const Scalar fx = tx.frac[static_cast<std::size_t>(x)];
      const Scalar top = (Scalar(1) - fx) * src(y0, x0) + fx * src(y0, x1);
      const Scalar bot = (Scalar(1) - fx) * src(y1, x0) + fx * src(y1, x1);
      dst(y, x) = (Scalar(1) - fy) * top + fy * bot;
    }
  }
  return dst;
}

/// Exact adjoint (transpose) of resize_plane_bilinear for fixed shapes:
/// <resize(a), b> == <a, adjoint(b)> for all a, b.
template <class Scalar>
Plane<Scalar> resize_plane_bilinear_adjoint(const Plane<Scalar>& grad_out, Index src_h, Index src_w) {
  if (src_h < 1 || src_w < 1) throw InvalidArgumentError("resize_bilinear_adjoint: bad source shape");
  if (grad_out.rows() < 1 || grad_out.cols() < 1)
    throw InvalidArgumentError("resize_bilinear_adjoint: empty gradient");
  if (grad_out.rows() == src_h && grad_out.cols() == src_w) return grad_out;

  const auto ty = detail::make_axis_taps<Scalar>(src_h, grad_out.rows());
  const auto tx = detail::make_axis_taps<Scalar>(src_w, grad_out.cols());
  Plane<Scalar> dst = Plane<Scalar>::Zero(src_h, src_w);
  for (Index y = 0; y < grad_out.rows(); ++y) {
    const Index y0 = ty.lo[static_cast<std::size_t>(y)];
    const Index y1 = ty.hi[static_cast<std::size_t>(y)];
    const Scalar fy = ty.frac[static_cast<std::size_t>(y)];
    for (Index x = 0; x < grad_out.cols(); ++x) {
      const Index x0 = tx.lo[static_cast<std::size_t>(x)];
      const Index x1 = tx.hi[static_cast<std::size_t>(x)];
      const Scalar fx = tx.frac[static_cast<std::size_t>(x)];
      const Scalar g = grad_out(y, x);
      dst(y0, x0) += (Scalar(1) - fy) * (Scalar(1) - fx) * g;
      dst(y0, x1) += (Scalar(1) - fy) * fx * g;
      dst(y1, x0) += fy * (Scalar(1) - fx) * g;
      dst(y1, x1) += fy * fx * g;
    }
  }
  return dst;
}

/// Channel-wise bilinear resize of an image (or image-shaped data).
template <class Scalar>
Image<Scalar> resize_bilinear(const Image<Scalar>& src, Index out_h, Index out_w) {
  if (src.channels() == 0) throw InvalidArgumentError("resize_bilinear: empty image");
  Image<Scalar> dst;
  dst.chan.reserve(src.chan.size());
  for (const auto& p : src.chan) dst.chan.push_back(resize_plane_bilinear(p, out_h, out_w));
  return dst;
}

/// Channel-wise adjoint transport of an image-shaped gradient back to
/// src_h × src_w resolution.
template <class Scalar>
Image<Scalar> resize_bilinear_adjoint(const Image<Scalar>& grad_out, Index src_h, Index src_w) {
  if (grad_out.channels() == 0) throw InvalidArgumentError("resize_bilinear_adjoint: empty gradient");
  Image<Scalar> dst;
  dst.chan.reserve(grad_out.chan.size());
  for (const auto& p : grad_out.chan) dst.chan.push_back(resize_plane_bilinear_adjoint(p, src_h, src_w));
  return dst;
}

}  // namespace hnmpgd

#endif  // HNMPGD_RESIZE_HPP_
