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

#include "nvcodec/codec.h"

#include "gtest/gtest.h"
#include "nvcodec/errors.h"
#include "nvcodec/model_init.h"
#include "test_util.h"

namespace nvcodec {
namespace {

DefaultWeightsOptions SmallOptions(bool with_denoiser) {
  DefaultWeightsOptions o;
  o.seed = 3;
  o.vocoder = testing::ToyVocoderConfig();
  o.vocoder.n_mels = 160;
  o.with_denoiser = with_denoiser;
  o.denoiser.filters = 32;
  o.denoiser.mask_filters = 8;
  o.denoiser.block_channels = 8;
  o.denoiser.num_blocks = 2;
  o.training_seconds = 8.0;
  return o;
}

const WeightSet& Weights(bool with_denoiser) {
  static const WeightSet with = BuildDefaultWeights(SmallOptions(true));
  static const WeightSet without = BuildDefaultWeights(SmallOptions(false));
  return with_denoiser ? with : without;
}

const CodecModel& Model(bool with_denoiser) {
  static const CodecModel with = CodecModel::FromWeights(Weights(true));
  static const CodecModel without = CodecModel::FromWeights(Weights(false));
  return with_denoiser ? with : without;
}

TEST(CodecTest, OneSecondIs25FramesAt3000Bps) {
  const AudioBuffer speech = SyntheticSpeech(16000, 5);
  const Bitstream s = EncodeAudio(Model(false).encoder, speech);
  EXPECT_EQ(s.num_frames, 25u);
  EXPECT_EQ(s.payload.size(), 375u);
  EXPECT_EQ(s.frame_bits, 120);
  EXPECT_EQ(s.bitrate_bps(), 3000.0);
}

TEST(CodecTest, DecodedFeaturesAreTheDequantizedCodes) {
  const EncoderModel& enc = Model(false).encoder;
  const AudioBuffer speech = SyntheticSpeech(8000, 6);
  const Bitstream s = EncodeAudio(enc, speech);
  const auto frames = ExtractFeatures(speech, enc.mel);
  const auto decoded = DecodeFeatures(enc, s);
  ASSERT_EQ(decoded.size(), frames.size());
  const auto& q = enc.quantizer;
  for (size_t t = 0; t < frames.size(); ++t) {
    const FeatureFrame want = DecodeFrame(EncodeFrame(frames[t], q.klt, q.codebooks), q.klt, q.codebooks);
    EXPECT_EQ(decoded[t].values, want.values) << t;
  }
}

TEST(CodecTest, RoundtripIsDeterministicAndFrameAligned) {
  const AudioBuffer speech = SyntheticSpeech(1000, 7);
  const RoundtripResult a = Roundtrip(Model(false), speech, GetRegime(Regime::kC2C), 9);
  const RoundtripResult b = Roundtrip(Model(false), speech, GetRegime(Regime::kC2C), 9);
  EXPECT_EQ(a.audio.samples.size(), 1280u);
  EXPECT_EQ(a.audio.samples, b.audio.samples);
  EXPECT_FALSE(a.denoised);
  EXPECT_EQ(a.bitrate_bps, 3000.0);
  EXPECT_EQ(DecodeBitstream(Model(false), a.stream, 9).samples, a.audio.samples);
}

TEST(CodecTest, DenoisingRegimesNeedDenoiserWeights) {
  EXPECT_TRUE(Model(true).denoiser.has_value());
  EXPECT_FALSE(Model(false).denoiser.has_value());
  const AudioBuffer speech = SyntheticSpeech(2000, 8);
  const RoundtripResult r = Roundtrip(Model(true), speech, GetRegime(Regime::kDN2N), 1);
  EXPECT_TRUE(r.denoised);
  EXPECT_EQ(r.audio.samples.size(), 2560u);
  try {
    Roundtrip(Model(false), speech, GetRegime(Regime::kDC2C), 1);
    FAIL() << "expected MissingTensorError";
  } catch (const MissingTensorError& e) {
    EXPECT_EQ(e.name(), "tasnet.enc.w");
  }
}

TEST(CodecTest, WeightFileRoundTrip) {
  const std::string path = testing::TempPath("codec.nvw");
  Weights(true).Save(path);
  const CodecModel m = CodecModel::FromWeights(WeightSet::Load(path));
  const AudioBuffer speech = SyntheticSpeech(1500, 10);
  EXPECT_EQ(Roundtrip(m, speech, GetRegime(Regime::kN2N), 4).audio.samples,
            Roundtrip(Model(true), speech, GetRegime(Regime::kN2N), 4).audio.samples);
  WeightSet no_layout = Weights(false);
  WeightSet stripped;
  for (const auto& [k, v] : no_layout.metadata()) {
    if (k != "vq.layout") stripped.SetMeta(k, v);
  }
  for (const auto& [k, v] : no_layout.tensors()) stripped.Put(k, v);
  EXPECT_THROW(CodecModel::FromWeights(stripped), MissingTensorError);
}

}  // namespace
}  // namespace nvcodec
