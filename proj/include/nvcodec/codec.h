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

#ifndef NVCODEC_CODEC_H_
#define NVCODEC_CODEC_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "nvcodec/audio_io.h"
#include "nvcodec/augment.h"
#include "nvcodec/denoiser.h"
#include "nvcodec/features.h"
#include "nvcodec/quantizer.h"
#include "nvcodec/vocoder.h"
#include "nvcodec/weight_set.h"

namespace nvcodec {

// Encoder half: log-mel front end plus KLT / split VQ.
struct EncoderModel {
  MelConfig mel;
  QuantizerModel quantizer;

  static EncoderModel FromWeights(const WeightSet& ws);
};

// Everything a full roundtrip needs. The denoiser is present only when the
// weight file carries "tasnet." tensors.
struct CodecModel {
  EncoderModel encoder;
  VocoderModel vocoder;
  std::optional<TasNetModel> denoiser;

  static CodecModel FromWeights(const WeightSet& ws);
};

// Features -> codes -> 120-bit frames at 25 Hz.
Bitstream EncodeAudio(const EncoderModel& model, const AudioBuffer& audio);
// Dequantized feature frames of a bitstream.
std::vector<FeatureFrame> DecodeFeatures(const EncoderModel& model, const Bitstream& stream);
// Dequantization followed by the generative decoder.
AudioBuffer DecodeBitstream(const CodecModel& model, const Bitstream& stream, uint64_t seed);

struct RoundtripResult {
  AudioBuffer audio;
  Bitstream stream;
  bool denoised = false;
  double bitrate_bps = 0.0;  // payload bits per second of coded audio
};

// Optional denoising (d* regimes), then encode and decode. The output holds
// 640 samples per coded frame, i.e. the input length rounded up to whole
// frames. Throws MissingTensorError when a d* regime is requested without
// denoiser weights.
RoundtripResult Roundtrip(const CodecModel& model, const AudioBuffer& audio,
                          const RegimeSpec& regime, uint64_t seed);

}  // namespace nvcodec

#endif  // NVCODEC_CODEC_H_
