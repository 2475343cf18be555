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

#include <cmath>

#include "gtest/gtest.h"
#include "nvcodec/errors.h"
#include "nvcodec/weight_set.h"
#include "test_util.h"

namespace nvcodec {
namespace {

using testing::RandomFeatures;
using testing::ToyVocoder;

std::vector<float> Flatten(const std::vector<FeatureFrame>& f) {
  std::vector<float> out;
  for (const auto& x : f) out.insert(out.end(), x.values.begin(), x.values.end());
  return out;
}

TEST(VocoderConfigTest, DefaultRates) {
  const VocoderConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.qmf_levels(), 2);
  EXPECT_EQ(c.step_rate_hz(), 4000);
  EXPECT_EQ(c.upsampled_rate_hz(), 200);
  EXPECT_EQ(c.steps_per_frame(), 160);
  EXPECT_EQ(c.tile_factor(), 20);
  EXPECT_EQ(c.samples_per_frame(), 640);
  EXPECT_EQ(c.head_size(), 96);
  VocoderConfig bad = c;
  bad.num_bands = 3;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
  bad = c;
  bad.frame_rate_hz = 30;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
}

TEST(ConditioningTest, TenFramesGive1600Rows) {
  const VocoderModel m = ToyVocoder();
  CounterRng rng(1);
  const auto f = RandomFeatures(rng, 10, 16);
  const Tensor up = ConditionUpsampled(m, f);
  EXPECT_EQ(up.dim(0), 80);
  EXPECT_EQ(up.dim(1), 32);
  const Tensor c = Condition(m, f);
  ASSERT_EQ(c.dim(0), 1600);
  EXPECT_EQ(c.dim(1), 32);
  for (int r = 0; r < 1600; ++r) {
    ASSERT_TRUE(std::equal(c.row(r).begin(), c.row(r).end(), up.row(r / 20).begin())) << r;
  }
}

TEST(ConditioningTest, FrameDependsOnExactlyOneFrameOfLookahead) {
  const VocoderModel m = ToyVocoder();
  CounterRng rng(2);
  auto f = RandomFeatures(rng, 12, 16);
  const Tensor base = Condition(m, f);
  const int k = 6;
  for (float& v : f[k].values) v += 3.0f;
  const Tensor moved = Condition(m, f);
  for (int t = 0; t < 12; ++t) {
    bool same = true;
    for (int r = t * 160; r < (t + 1) * 160; ++r) {
      same &= std::equal(base.row(r).begin(), base.row(r).end(), moved.row(r).begin());
    }
    if (t < k - 1) {
      EXPECT_TRUE(same) << "frame " << t << " saw the future";
    } else if (t == k - 1) {
      EXPECT_FALSE(same) << "frame " << t << " ignored its lookahead frame";
    }
  }
}

TEST(ConditioningTest, ZeroFeaturesAndBiasesGiveZeroRows) {
  VocoderModel m = ToyVocoder();
  for (auto* b : {&m.conv_in_b, &m.cond_proj_b}) std::fill(b->begin(), b->end(), 0.0f);
  for (auto& b : m.dilated_b) std::fill(b.begin(), b.end(), 0.0f);
  for (auto& b : m.upsample_b) std::fill(b.begin(), b.end(), 0.0f);
  std::vector<FeatureFrame> f(5, FeatureFrame{std::vector<float>(16, 0.0f)});
  for (float v : Condition(m, f).data) ASSERT_EQ(v, 0.0f);
}

TEST(ConditioningTest, StreamMatchesBatchForAnyChunking) {
  const VocoderModel m = ToyVocoder();
  CounterRng rng(3);
  const auto f = RandomFeatures(rng, 9, 16);
  const Tensor up = ConditionUpsampled(m, f);
  ConditioningStream s(m);
  std::vector<float> rows;
  for (const auto& x : f) s.Push(x.values, rows);
  s.Finish(rows);
  EXPECT_EQ(rows, up.data);
}

TEST(DecodeTest, OneSecondOfFeaturesGives16000Samples) {
  const VocoderModel m = ToyVocoder();
  CounterRng rng(4);
  const auto f = RandomFeatures(rng, 25, 16);
  const AudioBuffer a = Decode(m, f, 1);
  EXPECT_EQ(a.samples.size(), 16000u);
  EXPECT_EQ(a.sample_rate_hz, kSampleRateHz);
  for (float v : a.samples) ASSERT_TRUE(std::isfinite(v));
  EXPECT_TRUE(Decode(m, {}, 1).samples.empty());
}

TEST(DecodeTest, SeedDeterminesOutput) {
  const VocoderModel m = ToyVocoder();
  CounterRng rng(5);
  const auto f = RandomFeatures(rng, 4, 16);
  EXPECT_EQ(Decode(m, f, 11).samples, Decode(m, f, 11).samples);
  EXPECT_NE(Decode(m, f, 11).samples, Decode(m, f, 12).samples);
}

TEST(DecodeTest, StreamingMatchesBatch) {
  const VocoderModel m = ToyVocoder();
  CounterRng rng(6);
  const auto f = RandomFeatures(rng, 7, 16);
  StreamingDecoder dec(m, 99);
  std::vector<float> audio;
  for (size_t t = 0; t < f.size(); ++t) {
    const auto out = dec.PushFrame(f[t].values);
    EXPECT_EQ(out.size(), t == 0 ? 0u : 640u) << t;
    audio.insert(audio.end(), out.begin(), out.end());
  }
  const auto tail = dec.Finish();
  EXPECT_EQ(tail.size(), 640u);
  audio.insert(audio.end(), tail.begin(), tail.end());
  EXPECT_EQ(audio, Decode(m, f, 99).samples);
  EXPECT_EQ(dec.steps(), 7 * 160);
}

TEST(DecodeTest, SnapshotResumesBitExactly) {
  const VocoderModel m = ToyVocoder();
  CounterRng rng(7);
  const auto f = RandomFeatures(rng, 8, 16);
  StreamingDecoder a(m, 5);
  for (int t = 0; t < 4; ++t) a.PushFrame(f[t].values);
  const auto bytes = a.Snapshot().Serialize();

  StreamingDecoder b(m, 12345);  // the seed is replaced by the snapshot
  b.Restore(DecoderState::Parse(bytes));
  std::vector<float> out_a, out_b;
  for (int t = 4; t < 8; ++t) {
    const auto x = a.PushFrame(f[t].values), y = b.PushFrame(f[t].values);
    out_a.insert(out_a.end(), x.begin(), x.end());
    out_b.insert(out_b.end(), y.begin(), y.end());
  }
  const auto ta = a.Finish(), tb = b.Finish();
  out_a.insert(out_a.end(), ta.begin(), ta.end());
  out_b.insert(out_b.end(), tb.begin(), tb.end());
  EXPECT_EQ(out_a, out_b);
  EXPECT_EQ(b.steps(), a.steps());

  auto corrupt = bytes;
  corrupt[0] = 'X';
  EXPECT_THROW(DecoderState::Parse(corrupt), FormatError);
  StreamingDecoder other(ToyVocoder(), 1);
  DecoderState wrong = a.Snapshot();
  wrong.hidden.pop_back();
  EXPECT_ANY_THROW(other.Restore(wrong));
}

TEST(DecodeTest, WeightsRoundTripPreservesOutput) {
  const VocoderModel m = ToyVocoder();
  WeightSet ws;
  m.ToWeights(ws);
  const VocoderModel back = VocoderModel::FromWeights(WeightSet::Parse(ws.Serialize()));
  CounterRng rng(8);
  const auto f = RandomFeatures(rng, 3, 16);
  EXPECT_EQ(Decode(back, f, 3).samples, Decode(m, f, 3).samples);
  EXPECT_DOUBLE_EQ(Sparsity(back.gru.u_r), 0.75);
}

TEST(DecodeTest, MissingTensorsAreAllReported) {
  WeightSet full;
  ToyVocoder().ToWeights(full);
  WeightSet partial;
  for (const auto& [k, v] : full.metadata()) partial.SetMeta(k, v);
  for (const auto& [name, t] : full.tensors()) {
    if (name != "gru.uz" && name != "mol_proj.b") partial.Put(name, t);
  }
  try {
    VocoderModel::FromWeights(partial);
    FAIL() << "expected MissingTensorError";
  } catch (const MissingTensorError& e) {
    EXPECT_EQ(e.name(), "gru.uz");
    EXPECT_NE(std::string(e.what()).find("gru.uz"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("mol_proj.b"), std::string::npos);
  }
  WeightSet misshaped = full;
  misshaped.Put("gru.br", Tensor({31}));
  EXPECT_THROW(VocoderModel::FromWeights(misshaped), ShapeError);
}

// A head that ignores the state: every band is one logistic at 0 with scale s.
VocoderModel ConstantHead(double log_s) {
  VocoderModel m = ToyVocoder();
  const VocoderConfig& c = m.config;
  m.mol_proj = DenseMatrix(c.head_size(), c.gru_size);
  m.mol_proj_b.assign(static_cast<size_t>(c.head_size()), 0.0f);
  const int k = c.mixture_components;
  for (int b = 0; b < c.num_bands; ++b) {
    for (int j = 0; j < k; ++j) m.mol_proj_b[b * 3 * k + 2 * k + j] = static_cast<float>(log_s);
  }
  return m;
}

TEST(TeacherForcingTest, SilenceUnderFixedLogisticHasClosedFormNll) {
  CounterRng rng(9);
  const auto f = RandomFeatures(rng, 3, 16);
  const AudioBuffer silence{std::vector<float>(3 * 640, 0.0f), kSampleRateHz};
  for (double log_s : {-4.0, -2.0}) {
    const double nll = TeacherForcedNll(ConstantHead(log_s), f, silence);
    EXPECT_NEAR(nll, std::log(4.0) + log_s, 1e-5);
  }
}

TEST(TeacherForcingTest, NoiseCostsMoreThanSilence) {
  CounterRng rng(10);
  const auto f = RandomFeatures(rng, 2, 16);
  const VocoderModel m = ConstantHead(-3.0);
  const AudioBuffer silence{std::vector<float>(1280, 0.0f), kSampleRateHz};
  const AudioBuffer noise{testing::RandomVector(rng, 1280, 0.5), kSampleRateHz};
  EXPECT_GT(TeacherForcedNll(m, f, noise), TeacherForcedNll(m, f, silence) + 1.0);
  EXPECT_TRUE(std::isfinite(TeacherForcedNll(ToyVocoder(), f, noise)));
  EXPECT_THROW(TeacherForcedNll(m, f, AudioBuffer{std::vector<float>(1000), kSampleRateHz}),
               ShapeError);
}

TEST(DecodeTest, FlattenedStreamingPushesAcceptFrameVectors) {
  const VocoderModel m = ToyVocoder();
  CounterRng rng(11);
  const auto f = RandomFeatures(rng, 2, 16);
  StreamingDecoder dec(m, 1);
  const auto all = Flatten(f);
  EXPECT_THROW(dec.PushFrame(std::span<const float>(all).first(15)), ShapeError);
}

}  // namespace
}  // namespace nvcodec
