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

#include "nvcodec/features.h"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "nvcodec/errors.h"
#include "nvcodec/weight_set.h"
#include "test_util.h"

namespace nvcodec {
namespace {

AudioBuffer Sine(double hz, double amplitude, size_t n) {
  AudioBuffer a;
  a.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    a.samples[i] = static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * hz * i / 16000));
  }
  return a;
}

TEST(FeaturesTest, SilenceGivesTwentyFiveFloorFramesPerSecond) {
  AudioBuffer a;
  a.samples.assign(16000, 0.0f);
  const auto frames = ExtractFeatures(a);
  ASSERT_EQ(frames.size(), 25u);
  const float floor = static_cast<float>(std::log(1e-10));
  for (const auto& f : frames) {
    ASSERT_EQ(f.values.size(), 160u);
    for (float v : f.values) EXPECT_EQ(v, floor);
  }
  EXPECT_EQ(frames[24].frame_index, 24);
}

TEST(FeaturesTest, FrameCountIsCeilOfHops) {
  AudioBuffer a;
  EXPECT_TRUE(ExtractFeatures(a).empty());
  a.samples.assign(641, 0.1f);
  EXPECT_EQ(ExtractFeatures(a).size(), 2u);
  a.samples.assign(16000 * 3, 0.1f);
  EXPECT_EQ(ExtractFeatures(a).size(), 75u);
}

TEST(FeaturesTest, SinePeaksInBandNearestItsFrequency) {
  const auto frames = ExtractFeatures(Sine(1000.0, 0.5, 16000));
  const oracle::Vec centers = oracle::MelCenters(160, 125.0, 7500.0);
  int nearest = 0;
  for (int m = 0; m < 160; ++m) {
    if (std::abs(centers[m] - 1000.0) < std::abs(centers[nearest] - 1000.0)) nearest = m;
  }
  for (size_t t = 2; t + 2 < frames.size(); ++t) {
    const auto& v = frames[t].values;
    EXPECT_EQ(std::max_element(v.begin(), v.end()) - v.begin(), nearest) << "frame " << t;
  }
  MelSpectrogram mel(MelConfig{});
  EXPECT_NEAR(mel.CenterHz(nearest), centers[nearest], 1e-9);
}

TEST(FeaturesTest, MatchesDirectDftOracle) {
  const AudioBuffer a = SyntheticSpeech(16000, 11);
  const MelConfig cfg;
  const auto frames = ExtractFeatures(a, cfg);
  for (int t : {0, 3, 11, 24}) {
    std::vector<float> window(1280, 0.0f);
    for (int n = 0; n < 1280; ++n) {
      const size_t i = static_cast<size_t>(t) * 640 + n;
      if (i < a.samples.size()) window[n] = a.samples[i];
    }
    const oracle::Vec want =
        oracle::LogMel(window, cfg.fft_size, 16000, 160, cfg.fmin_hz, cfg.fmax_hz, cfg.log_floor);
    for (int m = 0; m < 160; ++m) {
      EXPECT_NEAR(frames[t].values[m], want[m], 1e-4) << "frame " << t << " band " << m;
    }
  }
}

TEST(FeaturesTest, OneHopDelayShiftsFramesExactly) {
  const AudioBuffer a = SyntheticSpeech(12000, 5);
  AudioBuffer d;
  d.samples.assign(640, 0.0f);
  d.samples.insert(d.samples.end(), a.samples.begin(), a.samples.end());
  const auto fa = ExtractFeatures(a);
  const auto fd = ExtractFeatures(d);
  ASSERT_EQ(fd.size(), fa.size() + 1);
  for (size_t t = 0; t < fa.size(); ++t) EXPECT_EQ(fd[t + 1].values, fa[t].values) << t;
}

TEST(FeaturesTest, GainAddsTwiceLogGain) {
  const AudioBuffer a = SyntheticSpeech(8000, 9);
  AudioBuffer b = a;
  const double g = 2.0;
  for (float& v : b.samples) v = static_cast<float>(v * g);
  const auto fa = ExtractFeatures(a);
  const auto fb = ExtractFeatures(b);
  const float floor = static_cast<float>(std::log(1e-10));
  int checked = 0;
  for (size_t t = 0; t < fa.size(); ++t) {
    for (int m = 0; m < 160; ++m) {
      if (fa[t].values[m] <= floor + 1.0f) continue;
      EXPECT_NEAR(fb[t].values[m] - fa[t].values[m], 2.0 * std::log(g), 2e-5);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(FeaturesTest, ConfigValidation) {
  MelConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.hop_ms * c.frame_rate_hz(), 1000);
  EXPECT_EQ(c.window_samples(), 1280);
  EXPECT_EQ(c.hop_samples(), 640);
  MelConfig bad = c;
  bad.fft_size = 1024;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
  bad = c;
  bad.hop_ms = 30;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
  bad = c;
  bad.sample_rate_hz = 8000;
  EXPECT_THROW(bad.Validate(), UnsupportedRateError);
}

TEST(FeaturesTest, ConfigRoundTripsThroughMetadata) {
  MelConfig c;
  c.log_floor = 1e-8;
  c.fmin_hz = 100.0;
  WeightSet ws;
  c.ToMetadata(ws);
  const MelConfig r = MelConfig::FromMetadata(ws);
  EXPECT_EQ(r.log_floor, c.log_floor);
  EXPECT_EQ(r.fmin_hz, c.fmin_hz);
  EXPECT_EQ(r.fmax_hz, c.fmax_hz);
  EXPECT_EQ(r.n_mels, 160);
  EXPECT_EQ(ws.Meta("mel.log_floor").value(), "1e-08");
}

TEST(FeaturesTest, DumpRoundTrip) {
  const auto frames = ExtractFeatures(SyntheticSpeech(4000, 2));
  const std::string path = testing::TempPath("features.dump");
  WriteFeatureDump(path, frames, MelConfig{});
  const auto back = ReadFeatureDump(path);
  ASSERT_EQ(back.size(), frames.size());
  for (size_t t = 0; t < frames.size(); ++t) EXPECT_EQ(back[t].values, frames[t].values);
  std::filesystem::remove(path);
}

TEST(FeaturesTest, RejectsOtherRates) {
  AudioBuffer a;
  a.sample_rate_hz = 22050;
  a.samples.assign(100, 0.0f);
  EXPECT_THROW(ExtractFeatures(a), UnsupportedRateError);
}

}  // namespace
}  // namespace nvcodec
