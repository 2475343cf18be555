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

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "nvcodec/errors.h"
#include "nvcodec/weight_set.h"
#include "test_util.h"

namespace nvcodec {
namespace {

AudioBuffer Noise(int n, uint64_t seed) {
  CounterRng rng(seed);
  return AudioBuffer{testing::RandomVector(rng, static_cast<size_t>(n), 0.5), kSampleRateHz};
}

AudioBuffer Sine(double hz, int n) {
  AudioBuffer a{std::vector<float>(static_cast<size_t>(n)), kSampleRateHz};
  for (int i = 0; i < n; ++i) {
    a.samples[i] = static_cast<float>(0.5 * std::sin(2 * std::numbers::pi * hz * i / kSampleRateHz));
  }
  return a;
}

// Reconstruction SNR in dB after compensating the cascade delay.
double ReconstructionSnr(const AudioBuffer& x, const QmfCascade& q) {
  const AudioBuffer y = Synthesize(Analyze(x, q), q);
  const int d = q.group_delay();
  double sig = 0.0, err = 0.0;
  for (size_t n = 0; n + d < y.samples.size() && n < x.samples.size(); ++n) {
    sig += double{x.samples[n]} * x.samples[n];
    err += std::pow(double{y.samples[n + d]} - x.samples[n], 2);
  }
  return 10.0 * std::log10(sig / std::max(err, 1e-300));
}

TEST(QmfTest, PrototypesAreNormalized) {
  for (const auto& h : {DefaultQmfPrototype(), HaarQmfPrototype()}) {
    double dc = 0.0, energy = 0.0;
    for (float v : h) {
      dc += v;
      energy += double{v} * v;
    }
    EXPECT_NEAR(energy, 1.0, 1e-6);
    EXPECT_NEAR(dc, std::sqrt(2.0), 1e-3);
    for (size_t n = 0; n < h.size(); ++n) EXPECT_EQ(h[n], h[h.size() - 1 - n]);
  }
  EXPECT_EQ(DefaultQmfPrototype().size(), 16u);
  EXPECT_EQ(QmfCascade{}.group_delay(), 3 * 14);
  EXPECT_EQ(QmfCascade::Haar(2).group_delay(), 0);
}

TEST(QmfTest, HaarIsPerfectReconstruction) {
  const QmfCascade q = QmfCascade::Haar(2);
  AudioBuffer impulse{std::vector<float>(64, 0.0f), kSampleRateHz};
  impulse.samples[13] = 1.0f;
  const AudioBuffer y = Synthesize(Analyze(impulse, q), q);
  ASSERT_EQ(y.samples.size(), 64u);
  for (int n = 0; n < 64; ++n) EXPECT_NEAR(y.samples[n], n == 13 ? 1.0f : 0.0f, 1e-6);
  const AudioBuffer x = Noise(4000, 1);
  const AudioBuffer z = Synthesize(Analyze(x, q), q);
  for (size_t n = 0; n < x.samples.size(); ++n) EXPECT_NEAR(z.samples[n], x.samples[n], 1e-6);
}

TEST(QmfTest, DefaultPrototypeReconstructsAbove55Db) {
  EXPECT_GE(ReconstructionSnr(Noise(16000, 2), QmfCascade{}), 55.0);
  EXPECT_GE(ReconstructionSnr(Sine(440.0, 16000), QmfCascade{}), 55.0);
  EXPECT_GE(ReconstructionSnr(Sine(6100.0, 16000), QmfCascade{}), 55.0);
}

TEST(QmfTest, BandsAreCriticallySampledAndPadded) {
  const auto bands = Analyze(Noise(1001, 3), QmfCascade{});
  ASSERT_EQ(bands.size(), 4u);
  for (const auto& b : bands) EXPECT_EQ(b.size(), 251u);
  EXPECT_EQ(Synthesize(bands, QmfCascade{}).samples.size(), 1004u);
}

TEST(QmfTest, WhiteNoiseEnergySplitsEvenly) {
  const QmfCascade q;
  const AudioBuffer x = Noise(64000, 4);
  const auto bands = Analyze(x, q);
  const double total = oracle::Energy(x.samples);
  std::vector<double> prototype(q.prototype.begin(), q.prototype.end());
  const auto eq = oracle::EquivalentBandFilters(prototype, q.levels);
  for (int b = 0; b < 4; ++b) {
    double norm = 0.0;
    for (double v : eq[b]) norm += v * v;
    const double expected = norm / 4.0;  // fraction of input power in band b
    EXPECT_NEAR(expected, 0.25, 0.01);
    EXPECT_NEAR(oracle::Energy(bands[b]) / total, expected, 0.01) << "band " << b;
  }
}

// |DTFT of h at hz|^2.
double PowerResponse(const std::vector<double>& h, double hz) {
  const double w = 2 * std::numbers::pi * hz / kSampleRateHz;
  double re = 0.0, im = 0.0;
  for (size_t n = 0; n < h.size(); ++n) {
    re += h[n] * std::cos(w * n);
    im -= h[n] * std::sin(w * n);
  }
  return re * re + im * im;
}

TEST(QmfTest, TonesLandInTreeOrderBands) {
  // LL = 0-2 kHz, LH = 2-4 kHz, HL = 6-8 kHz, HH = 4-6 kHz.
  const QmfCascade q;
  const auto eq = oracle::EquivalentBandFilters(
      std::vector<double>(q.prototype.begin(), q.prototype.end()), q.levels);
  const std::pair<double, int> cases[] = {{1000.0, 0}, {3000.0, 1}, {7000.0, 2}, {5000.0, 3},
                                          {500.0, 0},  {2500.0, 1}, {7500.0, 2}, {5500.0, 3}};
  for (const auto& [hz, band] : cases) {
    const auto bands = Analyze(Sine(hz, 16000), q);
    double total = 0.0, response = 0.0;
    for (const auto& b : bands) total += oracle::Energy(b);
    for (const auto& h : eq) response += PowerResponse(h, hz);
    int loudest = 0;
    for (int b = 0; b < 4; ++b) {
      // Each band keeps the tone power its equivalent filter passes.
      EXPECT_NEAR(oracle::Energy(bands[b]) / total, PowerResponse(eq[b], hz) / response, 0.01)
          << hz << " Hz, band " << b;
      if (oracle::Energy(bands[b]) > oracle::Energy(bands[loudest])) loudest = b;
    }
    EXPECT_EQ(loudest, band) << hz << " Hz";
    EXPECT_GT(oracle::Energy(bands[band]) / total, 0.9) << hz << " Hz";
  }
}

TEST(QmfTest, AnalysisIsLinear) {
  const QmfCascade q;
  const AudioBuffer a = Noise(800, 5), b = Noise(800, 6);
  AudioBuffer sum = a;
  for (size_t i = 0; i < sum.samples.size(); ++i) sum.samples[i] = 2.0f * a.samples[i] - b.samples[i];
  const auto ba = Analyze(a, q), bb = Analyze(b, q), bs = Analyze(sum, q);
  for (int k = 0; k < 4; ++k) {
    for (size_t i = 0; i < bs[k].size(); ++i) {
      EXPECT_NEAR(bs[k][i], 2.0f * ba[k][i] - bb[k][i], 1e-5);
    }
  }
  const auto zero = Analyze(AudioBuffer{std::vector<float>(400, 0.0f), kSampleRateHz}, q);
  for (const auto& band : zero) {
    for (float v : band) EXPECT_EQ(v, 0.0f);
  }
}

TEST(QmfTest, ChunkedStreamingMatchesOneShot) {
  const QmfCascade q;
  const AudioBuffer x = Noise(3000, 7);
  std::vector<std::vector<float>> whole(4), chunked(4);
  QmfAnalyzer(q).Push(x.samples, whole);
  QmfAnalyzer an(q);
  CounterRng rng(8);
  size_t pos = 0;
  while (pos < x.samples.size()) {
    const size_t n = std::min<size_t>(1 + rng.Below(37), x.samples.size() - pos);
    an.Push(std::span<const float>(x.samples).subspan(pos, n), chunked);
    pos += n;
  }
  EXPECT_EQ(chunked, whole);
}

TEST(QmfTest, SynthesizerStateRoundTrips) {
  const QmfCascade q;
  const auto bands = Analyze(Noise(2000, 9), q);
  QmfSynthesizer a(q);
  std::vector<float> step(4), out(4);
  for (size_t i = 0; i < 200; ++i) {
    for (int b = 0; b < 4; ++b) step[b] = bands[b][i];
    a.Push(step, out);
  }
  QmfSynthesizer b(q);
  b.LoadState(a.SaveState());
  std::vector<float> out_b(4);
  for (size_t i = 200; i < bands[0].size(); ++i) {
    for (int k = 0; k < 4; ++k) step[k] = bands[k][i];
    a.Push(step, out);
    b.Push(step, out_b);
    ASSERT_EQ(out, out_b);
  }
}

TEST(QmfTest, WeightSetRoundTripAndValidation) {
  WeightSet ws;
  QmfCascade::Haar(3).ToWeights(ws);
  const QmfCascade back = QmfCascade::FromWeights(ws);
  EXPECT_EQ(back.levels, 3);
  EXPECT_EQ(back.prototype, HaarQmfPrototype());
  QmfCascade odd;
  odd.prototype = {1.0f, 0.4142f, 0.0f};
  EXPECT_ANY_THROW(odd.Validate());
}

}  // namespace
}  // namespace nvcodec
