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

#include "nvcodec/errors.h"

namespace nvcodec {

EncoderModel EncoderModel::FromWeights(const WeightSet& ws) {
  EncoderModel m;
  m.mel = MelConfig::FromMetadata(ws);
  m.quantizer = QuantizerModel::FromWeights(ws);
  if (m.quantizer.klt.dim() != m.mel.n_mels) {
    throw ShapeError("KLT dimension " + std::to_string(m.quantizer.klt.dim()) +
                     " does not match " + std::to_string(m.mel.n_mels) + " mel bands");
  }
  return m;
}

CodecModel CodecModel::FromWeights(const WeightSet& ws) {
  CodecModel m;
  m.encoder = EncoderModel::FromWeights(ws);
  m.vocoder = VocoderModel::FromWeights(ws);
  if (m.vocoder.config.n_mels != m.encoder.mel.n_mels ||
      m.vocoder.config.frame_rate_hz != m.encoder.mel.frame_rate_hz()) {
    throw ShapeError("vocoder conditioning does not match the feature front end");
  }
  if (HasDenoiser(ws)) m.denoiser = TasNetModel::FromWeights(ws);
  return m;
}

Bitstream EncodeAudio(const EncoderModel& model, const AudioBuffer& audio) {
  CheckEngineRate(audio);
  const auto frames = ExtractFeatures(audio, model.mel);
  std::vector<FrameCode> codes;
  codes.reserve(frames.size());
  for (const FeatureFrame& f : frames) {
    codes.push_back(EncodeFrame(f, model.quantizer.klt, model.quantizer.codebooks));
  }
  return PackBitstream(codes, model.quantizer.codebooks.layout, model.mel.frame_rate_hz());
}

std::vector<FeatureFrame> DecodeFeatures(const EncoderModel& model, const Bitstream& stream) {
  if (stream.frame_rate_hz != model.mel.frame_rate_hz()) {
    throw FormatError("bitstream frame rate " + std::to_string(stream.frame_rate_hz) +
                      " Hz does not match the model (" +
                      std::to_string(model.mel.frame_rate_hz()) + " Hz)");
  }
  const auto codes = UnpackBitstream(stream, model.quantizer.codebooks.layout);
  std::vector<FeatureFrame> frames;
  frames.reserve(codes.size());
  for (size_t i = 0; i < codes.size(); ++i) {
    FeatureFrame f = DecodeFrame(codes[i], model.quantizer.klt, model.quantizer.codebooks);
    f.frame_index = static_cast<int64_t>(i);
    frames.push_back(std::move(f));
  }
  return frames;
}

AudioBuffer DecodeBitstream(const CodecModel& model, const Bitstream& stream, uint64_t seed) {
  return Decode(model.vocoder, DecodeFeatures(model.encoder, stream), seed);
}

RoundtripResult Roundtrip(const CodecModel& model, const AudioBuffer& audio,
                          const RegimeSpec& regime, uint64_t seed) {
  RoundtripResult r;
  const AudioBuffer* input = &audio;
  AudioBuffer denoised;
  if (regime.needs_denoiser()) {
    if (!model.denoiser) {
      throw MissingTensorError("tasnet.enc.w", "regime " + regime.name +
                                                   " needs denoiser weights (tasnet.*)");
    }
    denoised = Denoise(*model.denoiser, audio);
    input = &denoised;
    r.denoised = true;
  }
  r.stream = EncodeAudio(model.encoder, *input);
  r.audio = DecodeBitstream(model, r.stream, seed);
  const double seconds = static_cast<double>(r.stream.num_frames) / r.stream.frame_rate_hz;
  r.bitrate_bps = seconds > 0.0 ? static_cast<double>(r.stream.payload_bits()) / seconds
                                : r.stream.bitrate_bps();
  return r;
}

}  // namespace nvcodec
