// Copyright 2026 The nvcodec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nvcodec/denoiser.h"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <set>

#include "nvcodec/errors.h"
#include "nvcodec/weight_set.h"

namespace nvcodec {
namespace {

constexpr char kPrefix[] = "tasnet.";

std::string BlockPrefix(int k) { return "tasnet.block" + std::to_string(k); }

void PRelu(std::span<float> x, const std::vector<float>& slope) {
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0f) x[i] *= slope[i];
  }
}

// Sigmoid kept strictly inside (0, 1) in float.
float MaskSigmoid(float x) {
  return std::clamp(Sigmoid(x), FLT_MIN, std::nextafter(1.0f, 0.0f));
}

Tensor AsColumn(std::span<const float> samples, size_t padding) {
  Tensor t({static_cast<int>(samples.size() + padding), 1});
  std::copy(samples.begin(), samples.end(), t.data.begin());
  return t;
}

Tensor RunBlocks(const TasNetModel& m, Tensor y) {
  const TasNetConfig& c = m.config;
  const int frames = y.dim(0);
  Tensor hidden({frames, c.block_channels});
  for (const TasNetBlock& b : m.blocks) {
    for (int t = 0; t < frames; ++t) {
      auto h = hidden.row(t);
      MatVec(b.in_w, y.row(t), h);
      for (int i = 0; i < c.block_channels; ++i) h[i] += b.in_b[i];
      PRelu(h, b.prelu1);
    }
    Tensor dw = DepthwiseConv1d(hidden, b.dw, b.dw_b, b.dilation, 0);
    std::vector<float> res(static_cast<size_t>(c.mask_filters));
    for (int t = 0; t < frames; ++t) {
      auto d = dw.row(t);
      PRelu(d, b.prelu2);
      MatVec(b.out_w, d, res);
      auto out = y.row(t);
      for (int i = 0; i < c.mask_filters; ++i) out[i] += res[i] + b.out_b[i];
    }
  }
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// TasNetConfig

void TasNetConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgumentError("denoiser config: " + what);
  };
  require(filters > 0 && mask_filters > 0 && block_channels > 0, "sizes must be positive");
  require(stride > 0 && window >= stride, "window must be at least one stride");
  require(num_blocks >= 0 && dilation_cycle > 0 && dilation_cycle < 31,
          "invalid block count or dilation cycle");
  require(depthwise_width > 0 && mask_out_width > 0, "kernel widths must be positive");
  require(lookahead_frames >= 0, "lookahead must be non-negative");
}

void TasNetConfig::ToMetadata(WeightSet& ws) const {
  ws.SetMeta("tasnet.filters", std::to_string(filters));
  ws.SetMeta("tasnet.window", std::to_string(window));
  ws.SetMeta("tasnet.stride", std::to_string(stride));
  ws.SetMeta("tasnet.mask_filters", std::to_string(mask_filters));
  ws.SetMeta("tasnet.num_blocks", std::to_string(num_blocks));
  ws.SetMeta("tasnet.dilation_cycle", std::to_string(dilation_cycle));
  ws.SetMeta("tasnet.block_channels", std::to_string(block_channels));
  ws.SetMeta("tasnet.depthwise_width", std::to_string(depthwise_width));
  ws.SetMeta("tasnet.mask_out_width", std::to_string(mask_out_width));
  ws.SetMeta("tasnet.lookahead_frames", std::to_string(lookahead_frames));
}

TasNetConfig TasNetConfig::FromMetadata(const WeightSet& ws) {
  TasNetConfig c;
  c.filters = ws.MetaInt("tasnet.filters", c.filters);
  c.window = ws.MetaInt("tasnet.window", c.window);
  c.stride = ws.MetaInt("tasnet.stride", c.stride);
  c.mask_filters = ws.MetaInt("tasnet.mask_filters", c.mask_filters);
  c.num_blocks = ws.MetaInt("tasnet.num_blocks", c.num_blocks);
  c.dilation_cycle = ws.MetaInt("tasnet.dilation_cycle", c.dilation_cycle);
  c.block_channels = ws.MetaInt("tasnet.block_channels", c.block_channels);
  c.depthwise_width = ws.MetaInt("tasnet.depthwise_width", c.depthwise_width);
  c.mask_out_width = ws.MetaInt("tasnet.mask_out_width", c.mask_out_width);
  c.lookahead_frames = ws.MetaInt("tasnet.lookahead_frames", c.lookahead_frames);
  c.Validate();
  return c;
}

// ---------------------------------------------------------------------------
// TasNetModel

std::vector<std::string> TasNetModel::TensorNames(const TasNetConfig& c) {
  std::vector<std::string> names = {"tasnet.enc.w", "tasnet.mask_enc.w"};
  for (int k = 0; k < c.num_blocks; ++k) {
    const std::string p = BlockPrefix(k);
    for (const char* s : {".in.w", ".in.b", ".prelu1", ".dw.w", ".dw.b", ".prelu2", ".out.w",
                          ".out.b"}) {
      names.push_back(p + s);
    }
  }
  names.insert(names.end(), {"tasnet.mask_out.w", "tasnet.mask_out.b", "tasnet.dec.w"});
  return names;
}

bool HasDenoiser(const WeightSet& ws) {
  auto it = ws.tensors().lower_bound(kPrefix);
  return it != ws.tensors().end() && it->first.rfind(kPrefix, 0) == 0;
}

TasNetModel TasNetModel::FromWeights(const WeightSet& ws) {
  TasNetModel m;
  m.config = TasNetConfig::FromMetadata(ws);
  const TasNetConfig& c = m.config;

  std::map<std::string, std::vector<int>> expected = {
      {"tasnet.enc.w", {c.filters, 1, c.window}},
      {"tasnet.mask_enc.w", {c.mask_filters, 1, c.window}},
      {"tasnet.mask_out.w", {c.filters, c.mask_filters, c.mask_out_width}},
      {"tasnet.mask_out.b", {c.filters}},
      {"tasnet.dec.w", {1, c.filters, c.window}},
  };
  for (int k = 0; k < c.num_blocks; ++k) {
    const std::string p = BlockPrefix(k);
    expected[p + ".in.w"] = {c.block_channels, c.mask_filters, 1};
    expected[p + ".in.b"] = {c.block_channels};
    expected[p + ".prelu1"] = {c.block_channels};
    expected[p + ".dw.w"] = {c.block_channels, 1, c.depthwise_width};
    expected[p + ".dw.b"] = {c.block_channels};
    expected[p + ".prelu2"] = {c.block_channels};
    expected[p + ".out.w"] = {c.mask_filters, c.block_channels, 1};
    expected[p + ".out.b"] = {c.mask_filters};
  }

  // Structural check: nothing but the known layers may live under the prefix.
  for (auto it = ws.tensors().lower_bound(kPrefix);
       it != ws.tensors().end() && it->first.rfind(kPrefix, 0) == 0; ++it) {
    if (expected.count(it->first)) continue;
    if (it->first.find("norm") != std::string::npos) {
      throw FormatError("denoiser weights contain a normalization layer (" + it->first +
                        "); the causal mask network has none");
    }
    throw FormatError("unexpected denoiser tensor " + it->first);
  }

  std::vector<std::string> missing;
  for (const std::string& name : TensorNames(c)) {
    if (!ws.Has(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string msg = "missing tensors:";
    for (const auto& n : missing) msg += " " + n;
    throw MissingTensorError(missing.front(), msg);
  }
  auto get = [&](const std::string& name) -> const Tensor& {
    const Tensor& t = ws.Get(name).tensor;
    // 1x1 weights may also be stored as rank-2 matrices.
    const auto& want = expected.at(name);
    const bool pointwise_ok = want.size() == 3 && want[2] == 1 && t.rank() == 2 &&
                              t.dim(0) == want[0] && t.dim(1) == want[1];
    if (t.shape != want && !pointwise_ok) {
      throw ShapeError("tensor " + name + " has shape " + t.ShapeString() + ", expected " +
                       Tensor(want).ShapeString());
    }
    return t;
  };

  m.enc = ConvKernel(get("tasnet.enc.w"));
  m.mask_enc = ConvKernel(get("tasnet.mask_enc.w"));
  for (int k = 0; k < c.num_blocks; ++k) {
    const std::string p = BlockPrefix(k);
    TasNetBlock b;
    get(p + ".in.w");
    b.in_w = ws.GetMatrix(p + ".in.w", c.block_channels, c.mask_filters);
    b.in_b = get(p + ".in.b").data;
    b.prelu1 = get(p + ".prelu1").data;
    b.dw = DepthwiseKernel(get(p + ".dw.w"));
    b.dw_b = get(p + ".dw.b").data;
    b.prelu2 = get(p + ".prelu2").data;
    get(p + ".out.w");
    b.out_w = ws.GetMatrix(p + ".out.w", c.mask_filters, c.block_channels);
    b.out_b = get(p + ".out.b").data;
    b.dilation = c.dilation(k);
    m.blocks.push_back(std::move(b));
  }
  m.mask_out = ConvKernel(get("tasnet.mask_out.w"));
  m.mask_out_b = get("tasnet.mask_out.b").data;
  m.dec = ConvKernel(get("tasnet.dec.w"));
  return m;
}

void TasNetModel::ToWeights(WeightSet& ws) const {
  config.ToMetadata(ws);
  auto put_conv = [&](const std::string& name, const ConvKernel& k) {
    Tensor t({k.out_channels(), k.in_channels(), k.width()});
    for (int o = 0; o < k.out_channels(); ++o) {
      for (int w = 0; w < k.width(); ++w) {
        for (int i = 0; i < k.in_channels(); ++i) {
          t.data[(static_cast<size_t>(o) * k.in_channels() + i) * k.width() + w] = k.tap(o, w)[i];
        }
      }
    }
    ws.Put(name, std::move(t));
  };
  auto put_vec = [&](const std::string& name, const std::vector<float>& v) {
    ws.Put(name, Tensor({static_cast<int>(v.size())}, v));
  };
  put_conv("tasnet.enc.w", enc);
  put_conv("tasnet.mask_enc.w", mask_enc);
  for (size_t k = 0; k < blocks.size(); ++k) {
    const TasNetBlock& b = blocks[k];
    const std::string p = BlockPrefix(static_cast<int>(k));
    ws.PutMatrix(p + ".in.w", b.in_w);
    put_vec(p + ".in.b", b.in_b);
    put_vec(p + ".prelu1", b.prelu1);
    Tensor dw({b.dw.channels(), 1, b.dw.width()});
    for (int ch = 0; ch < b.dw.channels(); ++ch) {
      for (int w = 0; w < b.dw.width(); ++w) {
        dw.data[static_cast<size_t>(ch) * b.dw.width() + w] = b.dw.at(ch, w);
      }
    }
    ws.Put(p + ".dw.w", std::move(dw));
    put_vec(p + ".dw.b", b.dw_b);
    put_vec(p + ".prelu2", b.prelu2);
    ws.PutMatrix(p + ".out.w", b.out_w);
    put_vec(p + ".out.b", b.out_b);
  }
  put_conv("tasnet.mask_out.w", mask_out);
  put_vec("tasnet.mask_out.b", mask_out_b);
  put_conv("tasnet.dec.w", dec);
}

std::vector<std::string> TasNetModel::LayerKinds() const {
  std::vector<std::string> kinds = {"conv_strided", "conv_strided"};
  for (size_t k = 0; k < blocks.size(); ++k) {
    kinds.insert(kinds.end(),
                 {"conv1x1", "prelu", "depthwise", "prelu", "conv1x1", "residual_add"});
  }
  kinds.insert(kinds.end(), {"transpose_conv", "sigmoid", "mask_multiply", "transpose_conv"});
  return kinds;
}

// ---------------------------------------------------------------------------
// Inference

Tensor AnalysisFilterbank(const TasNetModel& model, std::span<const float> samples) {
  ConvOptions opts;
  opts.stride = model.config.stride;
  return Conv1d(AsColumn(samples, 0), model.enc, {}, opts);
}

Tensor ComputeMasks(const TasNetModel& model, std::span<const float> samples) {
  const TasNetConfig& c = model.config;
  ConvOptions opts;
  opts.stride = c.stride;
  const Tensor x = AsColumn(samples, static_cast<size_t>(c.lookahead_samples()));
  Tensor y = RunBlocks(model, Conv1d(x, model.mask_enc, {}, opts));
  Tensor masks = TransposeConv1d(y, model.mask_out, model.mask_out_b, 1);
  for (float& v : masks.data) v = MaskSigmoid(v);
  return masks;
}

AudioBuffer Denoise(const TasNetModel& model, const AudioBuffer& audio) {
  CheckEngineRate(audio);
  const TasNetConfig& c = model.config;
  AudioBuffer out;
  out.sample_rate_hz = audio.sample_rate_hz;
  if (audio.samples.empty()) return out;

  ConvOptions opts;
  opts.stride = c.stride;
  const Tensor x = AsColumn(audio.samples, static_cast<size_t>(c.lookahead_samples()));
  const Tensor enc = Conv1d(x, model.enc, {}, opts);
  const Tensor masks = ComputeMasks(model, audio.samples);
  const int frames = enc.dim(0);
  Tensor masked({frames, c.filters});
  for (int i = 0; i + c.lookahead_frames < frames; ++i) {
    const auto e = enc.row(i);
    const auto m = masks.row(i + c.lookahead_frames);
    auto dst = masked.row(i);
    for (int f = 0; f < c.filters; ++f) dst[f] = m[f] * e[f];
  }
  const Tensor y = TransposeConv1d(masked, model.dec, {}, c.stride);
  out.samples.assign(y.data.begin(), y.data.begin() + static_cast<std::ptrdiff_t>(audio.samples.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

double SiSnr(std::span<const float> estimate, std::span<const float> reference) {
  if (estimate.size() != reference.size()) {
    throw InvalidArgumentError("SI-SNR needs equal lengths (" + std::to_string(estimate.size()) +
                               " vs " + std::to_string(reference.size()) + ")");
  }
  const size_t n = reference.size();
  double mean_e = 0.0, mean_r = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_e += estimate[i];
    mean_r += reference[i];
  }
  if (n > 0) {
    mean_e /= static_cast<double>(n);
    mean_r /= static_cast<double>(n);
  }
  double dot = 0.0, ref_energy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = reference[i] - mean_r;
    dot += (estimate[i] - mean_e) * r;
    ref_energy += r * r;
  }
  if (!(ref_energy > 0.0)) throw InvalidArgumentError("SI-SNR reference has zero energy");
  const double alpha = dot / ref_energy;
  double target = 0.0, residual = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = alpha * (reference[i] - mean_r);
    const double e = (estimate[i] - mean_e) - t;
    target += t * t;
    residual += e * e;
  }
  if (residual == 0.0) return target > 0.0 ? kSiSnrCapDb : -kSiSnrCapDb;
  if (target == 0.0) return -kSiSnrCapDb;
  return std::clamp(10.0 * std::log10(target / residual), -kSiSnrCapDb, kSiSnrCapDb);
}

double SiSnrImprovement(std::span<const float> noisy, std::span<const float> enhanced,
                        std::span<const float> clean) {
  return SiSnr(enhanced, clean) - SiSnr(noisy, clean);
}

}  // namespace nvcodec
