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

#include "nvcodec/vocoder.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "byte_io.h"
#include "nvcodec/errors.h"
#include "nvcodec/weight_set.h"

namespace nvcodec {
namespace {

using internal::ByteReader;
using internal::ByteWriter;

constexpr char kStateMagic[4] = {'N', 'V', 'D', 'S'};
constexpr uint8_t kStateVersion = 1;

std::string FormatDouble(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

void Relu(std::span<float> x) {
  for (float& v : x) v = std::max(v, 0.0f);
}

void ReluTensor(Tensor& t) { Relu(t.data); }

// y = m x + b for one row.
void Affine(const Matrix& m, std::span<const float> bias, std::span<const float> x,
            std::span<float> y) {
  MatVec(m, x, y);
  for (size_t i = 0; i < y.size(); ++i) y[i] += bias[i];
}

void CheckFeatures(const VocoderConfig& cfg, std::span<const float> values) {
  if (static_cast<int>(values.size()) != cfg.n_mels) {
    throw ShapeError("feature frame has " + std::to_string(values.size()) +
                     " values, vocoder expects " + std::to_string(cfg.n_mels));
  }
}

// Scratch buffers for the per-step recurrence.
struct StepScratch {
  std::vector<float> wc_r, wc_z, wc_n;  // W c for the current 200 Hz row
  std::vector<float> wx_r, wx_z, wx_n;  // W (c + A s) for the current step
  std::vector<float> head;

  explicit StepScratch(const VocoderModel& m) {
    const size_t d = static_cast<size_t>(m.config.gru_size);
    for (auto* v : {&wc_r, &wc_z, &wc_n, &wx_r, &wx_z, &wx_n}) v->assign(d, 0.0f);
    head.assign(static_cast<size_t>(m.config.head_size()), 0.0f);
  }
};

// Projects a conditioning row through the three input gate matrices.
void ProjectConditioning(const VocoderModel& m, std::span<const float> cond, StepScratch& s) {
  MatVec(m.gru.w_r, cond, s.wc_r);
  MatVec(m.gru.w_z, cond, s.wc_z);
  MatVec(m.gru.w_n, cond, s.wc_n);
}

// One GRU update with input c + A s_prev, followed by the output head.
void RecurrentStep(const VocoderModel& m, std::span<const float> last, std::span<float> hidden,
                   StepScratch& s) {
  const int d = m.config.gru_size;
  const int bands = m.config.num_bands;
  const std::array<const std::vector<float>*, 3> wc = {&s.wc_r, &s.wc_z, &s.wc_n};
  const std::array<std::vector<float>*, 3> wx = {&s.wx_r, &s.wx_z, &s.wx_n};
  for (int g = 0; g < 3; ++g) {
    const DenseMatrix& ga = m.gate_ar[g];
    for (int i = 0; i < d; ++i) {
      (*wx[g])[i] = (*wc[g])[i] + Dot(ga.row(i), last.data(), bands);
    }
  }
  GruStepFromProjections(m.gru, s.wx_r, s.wx_z, s.wx_n, hidden);
  Affine(m.mol_proj, m.mol_proj_b, hidden, s.head);
}

// Runs the tile_factor() GRU steps of one upsampled conditioning row,
// sampling every band and synthesizing num_bands output samples per step.
void SampleRow(const VocoderModel& m, std::span<const float> cond, std::span<float> hidden,
               std::span<float> last, QmfSynthesizer& synth, CounterRng& rng, StepScratch& s,
               std::vector<float>& audio) {
  const VocoderConfig& cfg = m.config;
  ProjectConditioning(m, cond, s);
  std::vector<float> out(static_cast<size_t>(cfg.num_bands));
  for (int step = 0; step < cfg.tile_factor(); ++step) {
    RecurrentStep(m, last, hidden, s);
    for (int b = 0; b < cfg.num_bands; ++b) {
      const MolParams p = MolParamsFromHead(s.head, b, cfg.mixture_components);
      const double u1 = rng.Uniform();
      const double u2 = rng.Uniform();
      last[b] = MolSample(p, u1, u2, cfg.log_scale_min);
    }
    synth.Push(last, out);
    audio.insert(audio.end(), out.begin(), out.end());
  }
}

template <typename T>
std::vector<T> Concat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// VocoderConfig

int VocoderConfig::qmf_levels() const {
  int levels = 0;
  while ((1 << levels) < num_bands) ++levels;
  return levels;
}

int VocoderConfig::upsampled_rate_hz() const {
  int rate = frame_rate_hz;
  for (int i = 0; i < kNumUpsampleLayers; ++i) rate *= upsample_stride;
  return rate;
}

void VocoderConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgumentError("vocoder config: " + what);
  };
  require(sample_rate_hz > 0 && frame_rate_hz > 0, "rates must be positive");
  require(n_mels > 0 && cond_hidden > 0 && gru_size > 0, "sizes must be positive");
  require(num_bands > 0 && (num_bands & (num_bands - 1)) == 0, "num_bands must be a power of two");
  require(mixture_components > 0, "mixture_components must be positive");
  require(conv_in_width > 0 && dilated_width > 0 && upsample_width > 0,
          "kernel widths must be positive");
  require(lookahead_frames >= 0 && lookahead_frames < conv_in_width,
          "lookahead must be in [0, conv_in_width)");
  for (int d : dilations) require(d >= 1, "dilations must be >= 1");
  require(upsample_stride >= 1, "upsample stride must be >= 1");
  require(sample_rate_hz % num_bands == 0, "sample rate must divide into bands");
  require(sample_rate_hz % frame_rate_hz == 0, "frame rate must divide the sample rate");
  require(step_rate_hz() % frame_rate_hz == 0, "frame rate must divide the GRU rate");
  require(step_rate_hz() % upsampled_rate_hz() == 0,
          "upsampled rate must divide the GRU rate (integer tile factor)");
  require(std::isfinite(log_scale_min), "log_scale_min must be finite");
}

void VocoderConfig::ToMetadata(WeightSet& ws) const {
  ws.SetMeta("vocoder.sample_rate_hz", std::to_string(sample_rate_hz));
  ws.SetMeta("vocoder.frame_rate_hz", std::to_string(frame_rate_hz));
  ws.SetMeta("vocoder.n_mels", std::to_string(n_mels));
  ws.SetMeta("vocoder.cond_hidden", std::to_string(cond_hidden));
  ws.SetMeta("vocoder.conv_in_width", std::to_string(conv_in_width));
  ws.SetMeta("vocoder.lookahead_frames", std::to_string(lookahead_frames));
  ws.SetMeta("vocoder.dilated_width", std::to_string(dilated_width));
  for (int i = 0; i < kNumDilatedLayers; ++i) {
    ws.SetMeta("vocoder.dilation" + std::to_string(i + 1), std::to_string(dilations[i]));
  }
  ws.SetMeta("vocoder.upsample_stride", std::to_string(upsample_stride));
  ws.SetMeta("vocoder.upsample_width", std::to_string(upsample_width));
  ws.SetMeta("vocoder.gru_size", std::to_string(gru_size));
  ws.SetMeta("vocoder.num_bands", std::to_string(num_bands));
  ws.SetMeta("vocoder.mixture_components", std::to_string(mixture_components));
  ws.SetMeta("vocoder.log_scale_min", FormatDouble(log_scale_min));
}

VocoderConfig VocoderConfig::FromMetadata(const WeightSet& ws) {
  VocoderConfig c;
  c.sample_rate_hz = ws.MetaInt("vocoder.sample_rate_hz", c.sample_rate_hz);
  c.frame_rate_hz = ws.MetaInt("vocoder.frame_rate_hz", c.frame_rate_hz);
  c.n_mels = ws.MetaInt("vocoder.n_mels", c.n_mels);
  c.cond_hidden = ws.MetaInt("vocoder.cond_hidden", c.cond_hidden);
  c.conv_in_width = ws.MetaInt("vocoder.conv_in_width", c.conv_in_width);
  c.lookahead_frames = ws.MetaInt("vocoder.lookahead_frames", c.lookahead_frames);
  c.dilated_width = ws.MetaInt("vocoder.dilated_width", c.dilated_width);
  for (int i = 0; i < kNumDilatedLayers; ++i) {
    c.dilations[i] = ws.MetaInt("vocoder.dilation" + std::to_string(i + 1), c.dilations[i]);
  }
  c.upsample_stride = ws.MetaInt("vocoder.upsample_stride", c.upsample_stride);
  c.upsample_width = ws.MetaInt("vocoder.upsample_width", c.upsample_width);
  c.gru_size = ws.MetaInt("vocoder.gru_size", c.gru_size);
  c.num_bands = ws.MetaInt("vocoder.num_bands", c.num_bands);
  c.mixture_components = ws.MetaInt("vocoder.mixture_components", c.mixture_components);
  c.log_scale_min = ws.MetaDouble("vocoder.log_scale_min", c.log_scale_min);
  c.Validate();
  return c;
}

// ---------------------------------------------------------------------------
// VocoderModel

std::vector<std::string> VocoderModel::TensorNames() {
  std::vector<std::string> names = {"cond.conv_in.w", "cond.conv_in.b"};
  for (int i = 1; i <= kNumDilatedLayers; ++i) {
    names.push_back("cond.dil" + std::to_string(i) + ".w");
    names.push_back("cond.dil" + std::to_string(i) + ".b");
  }
  for (int i = 1; i <= kNumUpsampleLayers; ++i) {
    names.push_back("cond.up" + std::to_string(i) + ".w");
    names.push_back("cond.up" + std::to_string(i) + ".b");
  }
  for (const char* n : {"cond.proj.w", "cond.proj.b", "gru.wr", "gru.wz", "gru.wn", "gru.ur",
                        "gru.uz", "gru.un", "gru.br", "gru.bz", "gru.bn", "ar_proj.w",
                        "mol_proj.w", "mol_proj.b", "qmf.prototype"}) {
    names.emplace_back(n);
  }
  return names;
}

VocoderModel VocoderModel::FromWeights(const WeightSet& ws) {
  VocoderModel m;
  m.config = VocoderConfig::FromMetadata(ws);
  const VocoderConfig& c = m.config;
  const int h = c.cond_hidden;
  const int d = c.gru_size;

  std::map<std::string, std::vector<int>> expected = {
      {"cond.conv_in.w", {h, c.n_mels, c.conv_in_width}},
      {"cond.conv_in.b", {h}},
      {"cond.proj.w", {d, h}},
      {"cond.proj.b", {d}},
      {"gru.br", {d}},
      {"gru.bz", {d}},
      {"gru.bn", {d}},
      {"ar_proj.w", {d, c.num_bands}},
      {"mol_proj.w", {c.head_size(), d}},
      {"mol_proj.b", {c.head_size()}},
  };
  for (int i = 1; i <= kNumDilatedLayers; ++i) {
    expected["cond.dil" + std::to_string(i) + ".w"] = {h, h, c.dilated_width};
    expected["cond.dil" + std::to_string(i) + ".b"] = {h};
  }
  for (int i = 1; i <= kNumUpsampleLayers; ++i) {
    expected["cond.up" + std::to_string(i) + ".w"] = {h, h, c.upsample_width};
    expected["cond.up" + std::to_string(i) + ".b"] = {h};
  }
  for (const char* n : {"gru.wr", "gru.wz", "gru.wn", "gru.ur", "gru.uz", "gru.un"}) {
    expected[n] = {d, d};
  }

  // Enumerate every missing or misshaped tensor before failing.
  std::vector<std::string> missing, misshaped;
  for (const std::string& name : TensorNames()) {
    if (!ws.Has(name)) {
      missing.push_back(name);
      continue;
    }
    auto it = expected.find(name);
    if (it == expected.end()) continue;
    const Tensor& t = ws.Get(name).tensor;
    if (t.shape != it->second) {
      std::ostringstream s;
      s << name << " " << t.ShapeString() << " (expected " << Tensor(it->second).ShapeString()
        << ")";
      misshaped.push_back(s.str());
    }
  }
  if (!missing.empty() || !misshaped.empty()) {
    std::ostringstream msg;
    if (!missing.empty()) {
      msg << "missing tensors:";
      for (const auto& n : missing) msg << " " << n;
    }
    if (!misshaped.empty()) {
      if (!missing.empty()) msg << "; ";
      msg << "misshaped tensors:";
      for (const auto& n : misshaped) msg << " " << n;
    }
    if (!missing.empty()) throw MissingTensorError(missing.front(), msg.str());
    throw ShapeError(msg.str());
  }

  m.conv_in = ConvKernel(ws.Get("cond.conv_in.w").tensor);
  m.conv_in_b = ws.Get("cond.conv_in.b").tensor.data;
  for (int i = 0; i < kNumDilatedLayers; ++i) {
    const std::string p = "cond.dil" + std::to_string(i + 1);
    m.dilated[i] = ConvKernel(ws.Get(p + ".w").tensor);
    m.dilated_b[i] = ws.Get(p + ".b").tensor.data;
  }
  for (int i = 0; i < kNumUpsampleLayers; ++i) {
    const std::string p = "cond.up" + std::to_string(i + 1);
    m.upsample[i] = ConvKernel(ws.Get(p + ".w").tensor);
    m.upsample_b[i] = ws.Get(p + ".b").tensor.data;
  }
  m.cond_proj = ws.GetMatrix("cond.proj.w", d, h);
  m.cond_proj_b = ws.Get("cond.proj.b").tensor.data;
  m.gru.w_r = ws.GetMatrix("gru.wr", d, d);
  m.gru.w_z = ws.GetMatrix("gru.wz", d, d);
  m.gru.w_n = ws.GetMatrix("gru.wn", d, d);
  m.gru.u_r = ws.GetMatrix("gru.ur", d, d);
  m.gru.u_z = ws.GetMatrix("gru.uz", d, d);
  m.gru.u_n = ws.GetMatrix("gru.un", d, d);
  m.gru.b_r = ws.Get("gru.br").tensor.data;
  m.gru.b_z = ws.Get("gru.bz").tensor.data;
  m.gru.b_n = ws.Get("gru.bn").tensor.data;
  m.gru.Validate();
  m.ar_proj = DenseMatrix::FromTensor(ws.Get("ar_proj.w").tensor);
  m.mol_proj = ws.GetMatrix("mol_proj.w", c.head_size(), d);
  m.mol_proj_b = ws.Get("mol_proj.b").tensor.data;
  m.qmf = QmfCascade::FromWeights(ws);
  if (m.qmf.num_bands() != c.num_bands) {
    throw ShapeError("qmf cascade has " + std::to_string(m.qmf.num_bands()) +
                     " bands, vocoder expects " + std::to_string(c.num_bands));
  }
  m.PrepareDerived();
  return m;
}

void VocoderModel::PrepareDerived() {
  const int d = config.gru_size;
  const int bands = config.num_bands;
  const std::array<const Matrix*, 3> w = {&gru.w_r, &gru.w_z, &gru.w_n};
  std::vector<float> column(static_cast<size_t>(d)), product(static_cast<size_t>(d));
  for (int g = 0; g < 3; ++g) {
    DenseMatrix ga(d, bands);
    for (int j = 0; j < bands; ++j) {
      for (int i = 0; i < d; ++i) column[i] = ar_proj.at(i, j);
      MatVec(*w[g], column, product);
      for (int i = 0; i < d; ++i) ga.at(i, j) = product[i];
    }
    gate_ar[g] = std::move(ga);
  }
}

void VocoderModel::ToWeights(WeightSet& ws) const {
  config.ToMetadata(ws);
  auto put_conv = [&](const std::string& name, const ConvKernel& k) {
    Tensor t({k.out_channels(), k.in_channels(), k.width()});
    for (int o = 0; o < k.out_channels(); ++o) {
      for (int kk = 0; kk < k.width(); ++kk) {
        const float* tap = k.tap(o, kk);
        for (int i = 0; i < k.in_channels(); ++i) {
          t.data[(static_cast<size_t>(o) * k.in_channels() + i) * k.width() + kk] = tap[i];
        }
      }
    }
    ws.Put(name, std::move(t));
  };
  auto put_vec = [&](const std::string& name, const std::vector<float>& v) {
    ws.Put(name, Tensor({static_cast<int>(v.size())}, v));
  };
  put_conv("cond.conv_in.w", conv_in);
  put_vec("cond.conv_in.b", conv_in_b);
  for (int i = 0; i < kNumDilatedLayers; ++i) {
    put_conv("cond.dil" + std::to_string(i + 1) + ".w", dilated[i]);
    put_vec("cond.dil" + std::to_string(i + 1) + ".b", dilated_b[i]);
  }
  for (int i = 0; i < kNumUpsampleLayers; ++i) {
    put_conv("cond.up" + std::to_string(i + 1) + ".w", upsample[i]);
    put_vec("cond.up" + std::to_string(i + 1) + ".b", upsample_b[i]);
  }
  ws.PutMatrix("cond.proj.w", cond_proj);
  put_vec("cond.proj.b", cond_proj_b);
  ws.PutMatrix("gru.wr", gru.w_r);
  ws.PutMatrix("gru.wz", gru.w_z);
  ws.PutMatrix("gru.wn", gru.w_n);
  ws.PutMatrix("gru.ur", gru.u_r);
  ws.PutMatrix("gru.uz", gru.u_z);
  ws.PutMatrix("gru.un", gru.u_n);
  put_vec("gru.br", gru.b_r);
  put_vec("gru.bz", gru.b_z);
  put_vec("gru.bn", gru.b_n);
  ws.PutMatrix("ar_proj.w", ar_proj);
  ws.PutMatrix("mol_proj.w", mol_proj);
  put_vec("mol_proj.b", mol_proj_b);
  qmf.ToWeights(ws);
}

// ---------------------------------------------------------------------------
// Conditioning

Tensor ConditionUpsampled(const VocoderModel& model, const std::vector<FeatureFrame>& features) {
  const VocoderConfig& c = model.config;
  const int n = static_cast<int>(features.size());
  const int rows = n * (c.upsampled_rate_hz() / c.frame_rate_hz);
  if (n == 0) return Tensor(std::vector<int>{0, c.gru_size});

  Tensor x({n, c.n_mels});
  for (int t = 0; t < n; ++t) {
    CheckFeatures(c, features[t].values);
    std::copy(features[t].values.begin(), features[t].values.end(), x.row(t).begin());
  }
  ConvOptions in_opts;
  in_opts.lookahead = c.lookahead_frames;
  Tensor hcur = Conv1d(x, model.conv_in, model.conv_in_b, in_opts);
  ReluTensor(hcur);
  for (int i = 0; i < kNumDilatedLayers; ++i) {
    ConvOptions opts;
    opts.dilation = c.dilations[i];
    hcur = Conv1d(hcur, model.dilated[i], model.dilated_b[i], opts);
    ReluTensor(hcur);
  }
  for (int i = 0; i < kNumUpsampleLayers; ++i) {
    hcur = TransposeConv1d(hcur, model.upsample[i], model.upsample_b[i], c.upsample_stride);
    ReluTensor(hcur);
  }
  Tensor out({rows, c.gru_size});
  for (int r = 0; r < rows; ++r) Affine(model.cond_proj, model.cond_proj_b, hcur.row(r), out.row(r));
  return out;
}

Tensor Condition(const VocoderModel& model, const std::vector<FeatureFrame>& features) {
  const Tensor up = ConditionUpsampled(model, features);
  const int tile = model.config.tile_factor();
  const int rows = up.dim(0);
  Tensor out({rows * tile, model.config.gru_size});
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < tile; ++k) {
      std::copy(up.row(r).begin(), up.row(r).end(), out.row(r * tile + k).begin());
    }
  }
  return out;
}

ConditioningStream::ConditioningStream(const VocoderModel& model) : model_(&model) {
  const VocoderConfig& c = model.config;
  // Each history must cover the receptive field of the layer consuming it.
  features_ = RowHistory(c.n_mels, c.conv_in_width + 1);
  for (int i = 0; i < kNumDilatedLayers; ++i) {
    layers_[i] = RowHistory(c.cond_hidden, (c.dilated_width - 1) * c.dilations[i] + 2);
  }
  // Upsampler j reads rows up to (width - 1) / stride back, and its input
  // grows by stride^j rows per feature frame before it runs.
  const int up_span = (c.upsample_width - 1) / c.upsample_stride + 2;
  int burst = 1;
  for (int i = 0; i < kNumUpsampleLayers; ++i) {
    layers_[kNumDilatedLayers + i] = RowHistory(c.cond_hidden, up_span + burst);
    burst *= c.upsample_stride;
  }
  row_.assign(static_cast<size_t>(std::max(c.cond_hidden, c.gru_size)), 0.0f);
}

std::vector<const RowHistory*> ConditioningStream::histories() const {
  std::vector<const RowHistory*> out = {&features_};
  for (const auto& l : layers_) out.push_back(&l);
  return out;
}

std::vector<RowHistory*> ConditioningStream::mutable_histories() {
  std::vector<RowHistory*> out = {&features_};
  for (auto& l : layers_) out.push_back(&l);
  return out;
}

void ConditioningStream::Push(std::span<const float> features, std::vector<float>& out) {
  CheckFeatures(model_->config, features);
  features_.Push(features);
  Advance(false, out);
}

void ConditioningStream::Finish(std::vector<float>& out) { Advance(true, out); }

void ConditioningStream::Advance(bool final, std::vector<float>& out) {
  const VocoderModel& m = *model_;
  const VocoderConfig& c = m.config;
  const std::span<float> hrow(row_.data(), static_cast<size_t>(c.cond_hidden));
  std::vector<const float*> taps;

  // layers_[0] holds conv_in outputs, layers_[i + 1] dilated conv i outputs
  // and layers_[kNumDilatedLayers + j] the input of upsampler j. Rows of the
  // last upsampler go straight through the projection to `out`.
  const int64_t ready = final ? features_.count()
                              : std::max<int64_t>(0, features_.count() - c.lookahead_frames);
  RowHistory& l0 = layers_[0];
  while (l0.count() < ready) {
    const int64_t t = l0.count();
    ConvOptions in_opts;
    in_opts.lookahead = c.lookahead_frames;
    taps.resize(static_cast<size_t>(c.conv_in_width));
    for (int k = 0; k < c.conv_in_width; ++k) {
      taps[k] = features_.Get(ConvTapIndex(c.conv_in_width, in_opts, t, k));
    }
    ConvRow(m.conv_in, m.conv_in_b, taps, hrow);
    Relu(hrow);
    l0.Push(hrow);

    for (int i = 0; i < kNumDilatedLayers; ++i) {
      ConvOptions opts;
      opts.dilation = c.dilations[i];
      taps.resize(static_cast<size_t>(c.dilated_width));
      for (int k = 0; k < c.dilated_width; ++k) {
        taps[k] = layers_[i].Get(ConvTapIndex(c.dilated_width, opts, t, k));
      }
      ConvRow(m.dilated[i], m.dilated_b[i], taps, hrow);
      Relu(hrow);
      layers_[i + 1].Push(hrow);
    }

    // Upsamplers: the input of up_j is layers_[kNumDilatedLayers + j].
    for (int j = 0; j < kNumUpsampleLayers; ++j) {
      RowHistory& in = layers_[kNumDilatedLayers + j];
      const int64_t target = in.count() * c.upsample_stride;
      const bool last_layer = j + 1 == kNumUpsampleLayers;
      RowHistory* dst = last_layer ? nullptr : &layers_[kNumDilatedLayers + j + 1];
      int64_t produced = last_layer ? upsampled_rows_ : dst->count();
      taps.resize(static_cast<size_t>(c.upsample_width));
      while (produced < target) {
        for (int k = 0; k < c.upsample_width; ++k) {
          const int64_t src = TransposeTapIndex(produced, k, c.upsample_stride);
          taps[k] = src >= 0 ? in.Get(src) : nullptr;
        }
        ConvRow(m.upsample[j], m.upsample_b[j], taps, hrow);
        Relu(hrow);
        if (last_layer) {
          const size_t at = out.size();
          out.resize(at + static_cast<size_t>(c.gru_size));
          Affine(m.cond_proj, m.cond_proj_b, hrow,
                 std::span<float>(out.data() + at, static_cast<size_t>(c.gru_size)));
          ++upsampled_rows_;
        } else {
          dst->Push(hrow);
        }
        ++produced;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Decoder state

std::vector<uint8_t> DecoderState::Serialize() const {
  ByteWriter w;
  w.Raw(std::string_view(kStateMagic, 4));
  w.U8(kStateVersion);
  w.U32(static_cast<uint32_t>(hidden.size()));
  w.F32s(hidden);
  w.U32(static_cast<uint32_t>(last_samples.size()));
  w.F32s(last_samples);
  w.U32(static_cast<uint32_t>(history_counts.size()));
  for (size_t i = 0; i < history_counts.size(); ++i) {
    w.U64(static_cast<uint64_t>(history_counts[i]));
    w.U32(static_cast<uint32_t>(history_rings[i].size()));
    w.F32s(history_rings[i]);
  }
  w.U64(upsampled_rows);
  w.U32(static_cast<uint32_t>(qmf_state.size()));
  for (double v : qmf_state) w.F64(v);
  w.U64(rng_seed);
  w.U64(rng_counter);
  w.U64(static_cast<uint64_t>(steps));
  return std::move(w.bytes());
}

DecoderState DecoderState::Parse(std::span<const uint8_t> bytes) {
  ByteReader r(bytes, "decoder state");
  if (r.Str(4) != std::string_view(kStateMagic, 4)) {
    throw FormatError("decoder state: bad magic");
  }
  if (r.U8() != kStateVersion) throw FormatError("decoder state: unsupported version");
  DecoderState s;
  s.hidden = r.F32Vector(r.U32());
  s.last_samples = r.F32Vector(r.U32());
  const uint32_t n_hist = r.U32();
  for (uint32_t i = 0; i < n_hist; ++i) {
    s.history_counts.push_back(static_cast<int64_t>(r.U64()));
    s.history_rings.push_back(r.F32Vector(r.U32()));
  }
  s.upsampled_rows = static_cast<int64_t>(r.U64());
  const uint32_t n_qmf = r.U32();
  for (uint32_t i = 0; i < n_qmf; ++i) s.qmf_state.push_back(r.F64());
  s.rng_seed = r.U64();
  s.rng_counter = r.U64();
  s.steps = static_cast<int64_t>(r.U64());
  if (r.remaining() != 0) throw FormatError("decoder state: trailing bytes");
  return s;
}

// ---------------------------------------------------------------------------
// Decoding

StreamingDecoder::StreamingDecoder(const VocoderModel& model, uint64_t seed)
    : model_(&model),
      cond_(model),
      hidden_(static_cast<size_t>(model.config.gru_size), 0.0f),
      last_(static_cast<size_t>(model.config.num_bands), 0.0f),
      synth_(model.qmf),
      rng_(seed) {}

void StreamingDecoder::RunRows(std::span<const float> rows, std::vector<float>& audio) {
  const int d = model_->config.gru_size;
  StepScratch scratch(*model_);
  for (size_t at = 0; at < rows.size(); at += static_cast<size_t>(d)) {
    SampleRow(*model_, rows.subspan(at, static_cast<size_t>(d)), hidden_, last_, synth_, rng_,
              scratch, audio);
    steps_ += model_->config.tile_factor();
  }
}

std::vector<float> StreamingDecoder::PushFrame(std::span<const float> features) {
  std::vector<float> rows, audio;
  cond_.Push(features, rows);
  RunRows(rows, audio);
  return audio;
}

std::vector<float> StreamingDecoder::Finish() {
  std::vector<float> rows, audio;
  cond_.Finish(rows);
  RunRows(rows, audio);
  return audio;
}

DecoderState StreamingDecoder::Snapshot() const {
  DecoderState s;
  s.hidden = hidden_;
  s.last_samples = last_;
  for (const RowHistory* h : cond_.histories()) {
    s.history_counts.push_back(h->count());
    s.history_rings.push_back(h->ring());
  }
  s.upsampled_rows = cond_.upsampled_rows();
  s.qmf_state = synth_.SaveState();
  s.rng_seed = rng_.seed();
  s.rng_counter = rng_.counter();
  s.steps = steps_;
  return s;
}

void StreamingDecoder::Restore(const DecoderState& s) {
  if (s.hidden.size() != hidden_.size() || s.last_samples.size() != last_.size()) {
    throw FormatError("decoder state does not match the model dimensions");
  }
  auto hist = cond_.mutable_histories();
  if (s.history_counts.size() != hist.size() || s.history_rings.size() != hist.size()) {
    throw FormatError("decoder state has the wrong number of conditioning buffers");
  }
  for (size_t i = 0; i < hist.size(); ++i) hist[i]->Restore(s.history_counts[i], s.history_rings[i]);
  cond_.set_upsampled_rows(s.upsampled_rows);
  synth_.LoadState(s.qmf_state);
  hidden_ = s.hidden;
  last_ = s.last_samples;
  rng_ = CounterRng(s.rng_seed, s.rng_counter);
  steps_ = s.steps;
}

AudioBuffer Decode(const VocoderModel& model, const std::vector<FeatureFrame>& features,
                   uint64_t seed) {
  const VocoderConfig& c = model.config;
  if (features.empty()) return AudioBuffer{{}, c.sample_rate_hz};
  const Tensor up = ConditionUpsampled(model, features);
  std::vector<float> hidden(static_cast<size_t>(c.gru_size), 0.0f);
  std::vector<float> last(static_cast<size_t>(c.num_bands), 0.0f);
  QmfSynthesizer synth(model.qmf);
  CounterRng rng(seed);
  StepScratch scratch(model);
  AudioBuffer out;
  out.sample_rate_hz = c.sample_rate_hz;
  out.samples.reserve(static_cast<size_t>(c.samples_per_frame()) * features.size());
  for (int r = 0; r < up.dim(0); ++r) {
    SampleRow(model, up.row(r), hidden, last, synth, rng, scratch, out.samples);
  }
  return out;
}

double TeacherForcedNll(const VocoderModel& model, const std::vector<FeatureFrame>& features,
                        const AudioBuffer& target) {
  const VocoderConfig& c = model.config;
  const size_t want = static_cast<size_t>(c.samples_per_frame()) * features.size();
  if (target.samples.size() != want) {
    throw ShapeError("teacher forcing target has " + std::to_string(target.samples.size()) +
                     " samples, expected " + std::to_string(want) + " for " +
                     std::to_string(features.size()) + " frames");
  }
  if (features.empty()) throw InvalidArgumentError("teacher forcing needs at least one frame");
  const auto bands = Analyze(target, model.qmf);
  const Tensor up = ConditionUpsampled(model, features);
  std::vector<float> hidden(static_cast<size_t>(c.gru_size), 0.0f);
  std::vector<float> last(static_cast<size_t>(c.num_bands), 0.0f);
  StepScratch s(model);
  double total = 0.0;
  int64_t count = 0;
  int64_t n = 0;
  for (int r = 0; r < up.dim(0); ++r) {
    ProjectConditioning(model, up.row(r), s);
    for (int k = 0; k < c.tile_factor(); ++k, ++n) {
      RecurrentStep(model, last, hidden, s);
      for (int b = 0; b < c.num_bands; ++b) {
        const MolParams p = MolParamsFromHead(s.head, b, c.mixture_components);
        const float x = bands[b][static_cast<size_t>(n)];
        total -= MolLogLikelihood(p, x, c.log_scale_min);
        ++count;
        last[b] = x;
      }
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace nvcodec
