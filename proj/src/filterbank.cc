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

#include "nvcodec/filterbank.h"

#include <algorithm>
#include <cmath>

#include "nvcodec/errors.h"
#include "nvcodec/weight_set.h"

namespace nvcodec {
namespace {

// Symmetric 16-tap design, first half. Least-squares fit of power
// complementarity |H(w)|^2 + |H(w + pi)|^2 = 2 plus stopband energy above
// 0.7 pi; the two-level cascade deviates from a pure delay by at most
// -63.5 dB at any frequency.
constexpr double kDefaultHalf[8] = {
    -0.0012645855687204834, 0.0007106322140569797, -0.006695632736714442,
    0.029144187228366647,   -0.0029747497477984656, -0.12697063988594692,
    0.1329031290579524,     0.6821363833493628,
};

}  // namespace

std::vector<float> DefaultQmfPrototype() {
  std::vector<float> h(16);
  for (int i = 0; i < 8; ++i) {
    h[i] = static_cast<float>(kDefaultHalf[i]);
    h[15 - i] = h[i];
  }
  return h;
}

std::vector<float> HaarQmfPrototype() {
  const float c = static_cast<float>(1.0 / std::sqrt(2.0));
  return {c, c};
}

int QmfCascade::group_delay() const {
  return (num_bands() - 1) * (static_cast<int>(prototype.size()) - 2);
}

void QmfCascade::Validate() const {
  if (levels < 1 || levels > 6) throw InvalidArgumentError("QMF levels must be in [1, 6]");
  if (prototype.size() < 2 || prototype.size() % 2 != 0) {
    throw InvalidArgumentError("QMF prototype must have an even number of taps");
  }
}

QmfCascade QmfCascade::Haar(int levels) {
  QmfCascade c;
  c.prototype = HaarQmfPrototype();
  c.levels = levels;
  return c;
}

QmfCascade QmfCascade::FromWeights(const WeightSet& ws) {
  QmfCascade c;
  if (ws.Has("qmf.prototype")) {
    const Tensor& t = ws.Get("qmf.prototype").tensor;
    if (t.rank() != 1) throw ShapeError("tensor qmf.prototype must be rank 1");
    c.prototype = t.data;
  }
  c.levels = ws.MetaInt("qmf.levels", c.levels);
  c.Validate();
  return c;
}

void QmfCascade::ToWeights(WeightSet& ws) const {
  ws.Put("qmf.prototype", Tensor({static_cast<int>(prototype.size())}, prototype));
  ws.SetMeta("qmf.levels", std::to_string(levels));
}

// ---------------------------------------------------------------------------

QmfAnalyzer::QmfAnalyzer(const QmfCascade& cascade) : cascade_(cascade) {
  cascade_.Validate();
  const size_t n = cascade_.prototype.size();
  h0_.assign(cascade_.prototype.begin(), cascade_.prototype.end());
  h1_.resize(n);
  for (size_t k = 0; k < n; ++k) h1_[k] = (k % 2 ? -1.0 : 1.0) * h0_[k];
  stages_.resize(static_cast<size_t>(cascade_.levels));
  for (int l = 0; l < cascade_.levels; ++l) {
    stages_[l].assign(size_t{1} << l, Stage{std::vector<double>(n, 0.0), 0, 0});
  }
}

void QmfAnalyzer::PushStage(int level, int index, double x,
                            std::vector<std::vector<float>>& bands) {
  Stage& s = stages_[level][index];
  const int n = static_cast<int>(h0_.size());
  s.history[s.pos] = x;
  const int newest = s.pos;
  s.pos = (s.pos + 1) % n;
  s.phase ^= 1;
  if (s.phase != 0) return;  // emit on the second sample of each pair
  double lo = 0.0, hi = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = s.history[(newest - k + n) % n];
    lo += h0_[k] * v;
    hi += h1_[k] * v;
  }
  if (level + 1 == cascade_.levels) {
    bands[2 * index].push_back(static_cast<float>(lo));
    bands[2 * index + 1].push_back(static_cast<float>(hi));
  } else {
    PushStage(level + 1, 2 * index, lo, bands);
    PushStage(level + 1, 2 * index + 1, hi, bands);
  }
}

void QmfAnalyzer::Push(std::span<const float> samples, std::vector<std::vector<float>>& bands) {
  bands.resize(static_cast<size_t>(num_bands()));
  for (float x : samples) PushStage(0, 0, x, bands);
}

QmfSynthesizer::QmfSynthesizer(const QmfCascade& cascade) : cascade_(cascade) {
  cascade_.Validate();
  const size_t n = cascade_.prototype.size();
  f0_.resize(n);
  f1_.resize(n);
  for (size_t k = 0; k < n; ++k) {
    f0_[k] = cascade_.prototype[k];
    f1_[k] = -(k % 2 ? -1.0 : 1.0) * f0_[k];
  }
  stages_.resize(static_cast<size_t>(cascade_.levels));
  for (int l = 0; l < cascade_.levels; ++l) {
    stages_[l].assign(size_t{1} << l, Stage{std::vector<double>(n / 2, 0.0),
                                            std::vector<double>(n / 2, 0.0)});
  }
}

// With u[2m + 1] = input[m] and zeros at even positions, y = f0 * u_low +
// f1 * u_high. After input pair m arrives this emits y[2m + 1] and y[2m + 2].
void QmfSynthesizer::Synth(int level, int index, std::span<const double> in,
                           std::span<double> out) {
  const size_t half = in.size() / 2;
  std::vector<double> lows(half), highs(half);
  if (level + 1 == cascade_.levels) {
    lows[0] = in[0];
    highs[0] = in[1];
  } else {
    Synth(level + 1, 2 * index, in.subspan(0, half), lows);
    Synth(level + 1, 2 * index + 1, in.subspan(half, half), highs);
  }
  Stage& s = stages_[level][index];
  const size_t taps = f0_.size();
  for (size_t i = 0; i < half; ++i) {
    std::rotate(s.low.rbegin(), s.low.rbegin() + 1, s.low.rend());
    std::rotate(s.high.rbegin(), s.high.rbegin() + 1, s.high.rend());
    s.low[0] = lows[i];
    s.high[0] = highs[i];
    // y[2m+1]: even taps k = 2j hit u[2(m-j)+1] = in[m-j].
    double odd = 0.0, even = 0.0;
    for (size_t j = 0; 2 * j < taps; ++j) {
      odd += f0_[2 * j] * s.low[j] + f1_[2 * j] * s.high[j];
      even += f0_[2 * j + 1] * s.low[j] + f1_[2 * j + 1] * s.high[j];
    }
    out[2 * i] = odd;
    out[2 * i + 1] = even;
  }
}

void QmfSynthesizer::Push(std::span<const float> step, std::span<float> out) {
  const size_t m = static_cast<size_t>(num_bands());
  if (step.size() != m || out.size() != m) throw ShapeError("QMF synthesis step size mismatch");
  std::vector<double> in(step.begin(), step.end());
  std::vector<double> y(m);
  Synth(0, 0, in, y);
  for (size_t i = 0; i < m; ++i) out[i] = static_cast<float>(y[i]);
}

std::vector<double> QmfSynthesizer::SaveState() const {
  std::vector<double> s;
  for (const auto& level : stages_) {
    for (const auto& st : level) {
      s.insert(s.end(), st.low.begin(), st.low.end());
      s.insert(s.end(), st.high.begin(), st.high.end());
    }
  }
  return s;
}

void QmfSynthesizer::LoadState(std::span<const double> state) {
  size_t pos = 0;
  for (auto& level : stages_) {
    for (auto& st : level) {
      if (pos + st.low.size() + st.high.size() > state.size()) {
        throw FormatError("QMF synthesis state too short");
      }
      std::copy_n(state.begin() + pos, st.low.size(), st.low.begin());
      pos += st.low.size();
      std::copy_n(state.begin() + pos, st.high.size(), st.high.begin());
      pos += st.high.size();
    }
  }
  if (pos != state.size()) throw FormatError("QMF synthesis state size mismatch");
}

std::vector<std::vector<float>> Analyze(const AudioBuffer& audio, const QmfCascade& cascade) {
  CheckEngineRate(audio);
  QmfAnalyzer analyzer(cascade);
  const size_t m = static_cast<size_t>(cascade.num_bands());
  std::vector<std::vector<float>> bands(m);
  const size_t padded = NumFrames(audio.samples.size(), m) * m;
  for (auto& b : bands) b.reserve(padded / m);
  analyzer.Push(audio.samples, bands);
  const std::vector<float> zeros(padded - audio.samples.size(), 0.0f);
  analyzer.Push(zeros, bands);
  return bands;
}

AudioBuffer Synthesize(const std::vector<std::vector<float>>& bands, const QmfCascade& cascade) {
  const size_t m = static_cast<size_t>(cascade.num_bands());
  if (bands.size() != m) throw ShapeError("expected " + std::to_string(m) + " bands");
  const size_t len = bands[0].size();
  for (const auto& b : bands) {
    if (b.size() != len) throw ShapeError("band streams have mismatched lengths");
  }
  QmfSynthesizer synth(cascade);
  AudioBuffer out;
  out.samples.resize(len * m);
  std::vector<float> step(m);
  for (size_t t = 0; t < len; ++t) {
    for (size_t b = 0; b < m; ++b) step[b] = bands[b][t];
    synth.Push(step, std::span(out.samples).subspan(t * m, m));
  }
  return out;
}

}  // namespace nvcodec
