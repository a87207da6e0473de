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

#include "hnmpgd/detector.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace hnmpgd {

namespace {

constexpr char kCheckpointMagic[8] = {'H', 'N', 'M', 'D', 'E', 'T', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

void require(bool cond, const char* msg) {
  if (!cond) throw InvalidArgumentError(msg);
}

// out(y,x) += sum_i sum_{ky,kx} w[o][i](ky,kx) * in(y+ky-pad, x+kx-pad), zero padded.
void conv_forward(const ConvLayer& L, const std::vector<PlaneD>& in, std::vector<PlaneD>& out) {
  const Index h = in[0].rows(), w = in[0].cols();
  const int pad = L.ksize / 2;
  out.assign(static_cast<std::size_t>(L.out_ch), PlaneD(h, w));
  for (int o = 0; o < L.out_ch; ++o) out[static_cast<std::size_t>(o)].setConstant(L.bias(o));
  for (int o = 0; o < L.out_ch; ++o)
    for (int i = 0; i < L.in_ch; ++i) {
      const PlaneD& k = L.w(o, i);
      for (int ky = 0; ky < L.ksize; ++ky)
        for (int kx = 0; kx < L.ksize; ++kx) {
          const Index dy = ky - pad, dx = kx - pad;
          const Index oy0 = std::max<Index>(0, -dy), oy1 = std::min<Index>(h, h - dy);
          const Index ox0 = std::max<Index>(0, -dx), ox1 = std::min<Index>(w, w - dx);
          if (oy1 <= oy0 || ox1 <= ox0) continue;
          out[static_cast<std::size_t>(o)].block(oy0, ox0, oy1 - oy0, ox1 - ox0) +=
              k(ky, kx) * in[static_cast<std::size_t>(i)].block(oy0 + dy, ox0 + dx, oy1 - oy0, ox1 - ox0);
        }
    }
}

// din(y+ky-pad, x+kx-pad) += w[o][i](ky,kx) * dout(y,x): the transpose map.
void conv_backward_input(const ConvLayer& L, const std::vector<PlaneD>& dout, std::vector<PlaneD>& din) {
  const Index h = dout[0].rows(), w = dout[0].cols();
  const int pad = L.ksize / 2;
  din.assign(static_cast<std::size_t>(L.in_ch), PlaneD::Zero(h, w));
  for (int o = 0; o < L.out_ch; ++o)
    for (int i = 0; i < L.in_ch; ++i) {
      const PlaneD& k = L.w(o, i);
      for (int ky = 0; ky < L.ksize; ++ky)
        for (int kx = 0; kx < L.ksize; ++kx) {
          const Index dy = ky - pad, dx = kx - pad;
          const Index oy0 = std::max<Index>(0, -dy), oy1 = std::min<Index>(h, h - dy);
          const Index ox0 = std::max<Index>(0, -dx), ox1 = std::min<Index>(w, w - dx);
          if (oy1 <= oy0 || ox1 <= ox0) continue;
          din[static_cast<std::size_t>(i)].block(oy0 + dy, ox0 + dx, oy1 - oy0, ox1 - ox0) +=
              k(ky, kx) * dout[static_cast<std::size_t>(o)].block(oy0, ox0, oy1 - oy0, ox1 - ox0);
        }
    }
}

void conv_backward_params(const ConvLayer& L, const std::vector<PlaneD>& in,
                          const std::vector<PlaneD>& dout, ConvLayer& grads) {
  const Index h = dout[0].rows(), w = dout[0].cols();
  const int pad = L.ksize / 2;
  for (int o = 0; o < L.out_ch; ++o) {
    grads.bias(o) += dout[static_cast<std::size_t>(o)].sum();
    for (int i = 0; i < L.in_ch; ++i) {
      PlaneD& gk = grads.w(o, i);
      for (int ky = 0; ky < L.ksize; ++ky)
        for (int kx = 0; kx < L.ksize; ++kx) {
          const Index dy = ky - pad, dx = kx - pad;
          const Index oy0 = std::max<Index>(0, -dy), oy1 = std::min<Index>(h, h - dy);
          const Index ox0 = std::max<Index>(0, -dx), ox1 = std::min<Index>(w, w - dx);
          if (oy1 <= oy0 || ox1 <= ox0) continue;
          gk(ky, kx) +=
              (in[static_cast<std::size_t>(i)].block(oy0 + dy, ox0 + dx, oy1 - oy0, ox1 - ox0) *
               dout[static_cast<std::size_t>(o)].block(oy0, ox0, oy1 - oy0, ox1 - ox0))
                  .sum();
        }
    }
  }
}

std::vector<PlaneD> avgpool2(const std::vector<PlaneD>& in) {
  std::vector<PlaneD> out;
  out.reserve(in.size());
  for (const auto& p : in) {
    const Index h = p.rows() / 2, w = p.cols() / 2;
    PlaneD q(h, w);
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x)
        q(y, x) = 0.25 * (p(2 * y, 2 * x) + p(2 * y, 2 * x + 1) + p(2 * y + 1, 2 * x) +
                          p(2 * y + 1, 2 * x + 1));
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<PlaneD> avgpool2_backward(const std::vector<PlaneD>& dout) {
  std::vector<PlaneD> din;
  din.reserve(dout.size());
  for (const auto& p : dout) {
    PlaneD q(p.rows() * 2, p.cols() * 2);
    for (Index y = 0; y < p.rows(); ++y)
      for (Index x = 0; x < p.cols(); ++x) {
        const double g = 0.25 * p(y, x);
        q(2 * y, 2 * x) = g;
        q(2 * y, 2 * x + 1) = g;
        q(2 * y + 1, 2 * x) = g;
        q(2 * y + 1, 2 * x + 1) = g;
      }
    din.push_back(std::move(q));
  }
  return din;
}

std::vector<PlaneD> relu(const std::vector<PlaneD>& z) {
  std::vector<PlaneD> a;
  a.reserve(z.size());
  for (const auto& p : z) a.push_back(p.max(0.0));
  return a;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void validate_model(const DetectorModel& m) {
  require(m.side >= 8 && m.side % 8 == 0, "detector: side must be a positive multiple of 8");
  require(m.grid == m.side / 8, "detector: grid must equal side/8");
  require(m.classes >= 1, "detector: needs at least one foreground class");
}

}  // namespace

ConvLayer ConvLayer::zeros(int in_ch, int out_ch, int ksize) {
  ConvLayer L;
  L.in_ch = in_ch;
  L.out_ch = out_ch;
  L.ksize = ksize;
  L.weights.assign(static_cast<std::size_t>(in_ch * out_ch), PlaneD::Zero(ksize, ksize));
  L.bias = Eigen::VectorXd::Zero(out_ch);
  return L;
}

DetectorModel make_zero_model(int side, int classes) {
  DetectorModel m;
  m.side = side;
  m.grid = side / 8;
  m.classes = classes;
  validate_model(m);
  m.conv1 = ConvLayer::zeros(3, 8, 3);
  m.conv2 = ConvLayer::zeros(8, 16, 3);
  m.head = ConvLayer::zeros(16, 1 + classes + 1, 1);
  return m;
}

DetectorModel make_random_model(int side, int classes, std::uint64_t seed) {
  DetectorModel m = make_zero_model(side, classes);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](ConvLayer& L) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(L.in_ch * L.ksize * L.ksize));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (int o = 0; o < L.out_ch; ++o)
      for (int i = 0; i < L.in_ch; ++i) {
        PlaneD& k = L.w(o, i);
        for (Index y = 0; y < k.rows(); ++y)
          for (Index x = 0; x < k.cols(); ++x) k(y, x) = dist(rng);
      }
    for (int o = 0; o < L.out_ch; ++o) L.bias(o) = dist(rng);
  };
  fill(m.conv1);
  fill(m.conv2);
  fill(m.head);
  return m;
}

DetectorOutput forward(const DetectorModel& model, const ImageD& x, ForwardTrace& trace) {
  validate_model(model);
  require(x.channels() == 3, "forward: input must have 3 channels");
  require(x.height() == model.side && x.width() == model.side,
          "forward: input must match the model side length");

  trace.input = x.chan;
  conv_forward(model.conv1, trace.input, trace.z1);
  trace.p1 = avgpool2(relu(trace.z1));
  conv_forward(model.conv2, trace.p1, trace.z2);
  trace.p3 = avgpool2(avgpool2(relu(trace.z2)));
  conv_forward(model.head, trace.p3, trace.head);

  const int m = model.cell_count();
  DetectorOutput out;
  out.conf.resize(m);
  out.cls_logits.resize(m, model.classes + 1);
  const int grid = model.grid;
  for (int r = 0; r < grid; ++r)
    for (int c = 0; c < grid; ++c) {
      const int idx = r * grid + c;
      out.conf(idx) = sigmoid(trace.head[0](r, c));
      for (int j = 0; j <= model.classes; ++j)
        out.cls_logits(idx, j) = trace.head[static_cast<std::size_t>(1 + j)](r, c);
    }
  return out;
}

DetectorOutput forward(const DetectorModel& model, const ImageD& x) {
  ForwardTrace trace;
  return forward(model, x, trace);
}

void backward(const DetectorModel& model, const ForwardTrace& trace, const OutputGrad& ograd,
              DetectorModel* param_grads, ImageD* input_grad) {
  const int grid = model.grid;
  const int m = model.cell_count();
  const bool logit_space = ograd.dobj_logit.size() > 0;
  require(logit_space ? ograd.dobj_logit.size() == m : ograd.dconf.size() == m,
          "backward: objectness gradient length mismatch");
  require(ograd.dcls_logits.rows() == m && ograd.dcls_logits.cols() == model.classes + 1,
          "backward: dcls_logits shape mismatch");

  // Head logit gradients; the objectness channel folds in the sigmoid.
  std::vector<PlaneD> dhead(static_cast<std::size_t>(2 + model.classes), PlaneD(grid, grid));
  for (int r = 0; r < grid; ++r)
    for (int c = 0; c < grid; ++c) {
      const int idx = r * grid + c;
      if (logit_space) {
        dhead[0](r, c) = ograd.dobj_logit(idx);
      } else {
        const double conf = sigmoid(trace.head[0](r, c));
        dhead[0](r, c) = ograd.dconf(idx) * conf * (1.0 - conf);
      }
      for (int j = 0; j <= model.classes; ++j)
        dhead[static_cast<std::size_t>(1 + j)](r, c) = ograd.dcls_logits(idx, j);
    }

  if (param_grads) conv_backward_params(model.head, trace.p3, dhead, param_grads->head);

  std::vector<PlaneD> dp3;
  conv_backward_input(model.head, dhead, dp3);
  std::vector<PlaneD> da2 = avgpool2_backward(avgpool2_backward(dp3));
  std::vector<PlaneD> dz2(da2.size());
  for (std::size_t i = 0; i < da2.size(); ++i)
    dz2[i] = (trace.z2[i] > 0.0).select(da2[i], PlaneD::Zero(da2[i].rows(), da2[i].cols()));

  if (param_grads) conv_backward_params(model.conv2, trace.p1, dz2, param_grads->conv2);

  std::vector<PlaneD> dp1;
  conv_backward_input(model.conv2, dz2, dp1);
  std::vector<PlaneD> da1 = avgpool2_backward(dp1);
  std::vector<PlaneD> dz1(da1.size());
  for (std::size_t i = 0; i < da1.size(); ++i)
    dz1[i] = (trace.z1[i] > 0.0).select(da1[i], PlaneD::Zero(da1[i].rows(), da1[i].cols()));

  if (param_grads) conv_backward_params(model.conv1, trace.input, dz1, param_grads->conv1);

  if (input_grad) {
    std::vector<PlaneD> dx;
    conv_backward_input(model.conv1, dz1, dx);
    input_grad->chan = std::move(dx);
  }
}

ImageD backward_input(const DetectorModel& model, const ForwardTrace& trace, const OutputGrad& ograd) {
  ImageD dx;
  backward(model, trace, ograd, nullptr, &dx);
  return dx;
}

int detect_count(const DetectorOutput& out, double conf_threshold, double cls_threshold) {
  const Index m = out.conf.size();
  const Index bg = out.cls_logits.cols() - 1;
  int count = 0;
  for (Index i = 0; i < m; ++i) {
    bool flagged = out.conf(i) > conf_threshold;
    if (!flagged) {
      Index argmax = 0;
      const double maxv = out.cls_logits.row(i).maxCoeff(&argmax);
      if (argmax != bg) {
        const double denom = (out.cls_logits.row(i).array() - maxv).exp().sum();
        if (1.0 / denom > cls_threshold) flagged = true;
      }
    }
    if (flagged) ++count;
  }
  return count;
}

void save_checkpoint(const DetectorModel& model, const std::filesystem::path& path) {
  validate_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_checkpoint: cannot open " + path.string());

  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  const std::uint32_t header[4] = {kCheckpointVersion, static_cast<std::uint32_t>(model.side),
                                   static_cast<std::uint32_t>(model.grid),
                                   static_cast<std::uint32_t>(model.classes)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));

  const std::uint64_t count = static_cast<std::uint64_t>(model.param_count());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));

  auto dump = [&out](const ConvLayer& L) {
    for (int o = 0; o < L.out_ch; ++o)
      for (int i = 0; i < L.in_ch; ++i) {
        const PlaneD& k = L.w(o, i);
        for (Index y = 0; y < k.rows(); ++y)
          for (Index x = 0; x < k.cols(); ++x) {
            const float v = static_cast<float>(k(y, x));
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
          }
      }
    for (int o = 0; o < L.out_ch; ++o) {
      const float v = static_cast<float>(L.bias(o));
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  };
  dump(model.conv1);
  dump(model.conv2);
  dump(model.head);
  if (!out) throw IoError("save_checkpoint: write failed for " + path.string());
}

DetectorModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_checkpoint: cannot open " + path.string());

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw MalformedFileError("load_checkpoint: bad magic in " + path.string());

  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || header[0] != kCheckpointVersion)
    throw MalformedFileError("load_checkpoint: unsupported version in " + path.string());

  DetectorModel model = make_zero_model(static_cast<int>(header[1]), static_cast<int>(header[3]));
  if (static_cast<int>(header[2]) != model.grid)
    throw MalformedFileError("load_checkpoint: inconsistent grid size in " + path.string());

  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in || count != static_cast<std::uint64_t>(model.param_count()))
    throw MalformedFileError("load_checkpoint: parameter count mismatch in " + path.string());

  auto slurp = [&in](ConvLayer& L) {
    for (int o = 0; o < L.out_ch; ++o)
      for (int i = 0; i < L.in_ch; ++i) {
        PlaneD& k = L.w(o, i);
        for (Index y = 0; y < k.rows(); ++y)
          for (Index x = 0; x < k.cols(); ++x) {
            float v;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            k(y, x) = static_cast<double>(v);
          }
      }
    for (int o = 0; o < L.out_ch; ++o) {
      float v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      L.bias(o) = static_cast<double>(v);
    }
  };
  slurp(model.conv1);
  slurp(model.conv2);
  slurp(model.head);
  if (!in) throw MalformedFileError("load_checkpoint: truncated stream in " + path.string());
  return model;
}

}  // namespace hnmpgd
