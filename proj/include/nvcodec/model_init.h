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

#ifndef NVCODEC_MODEL_INIT_H_
#define NVCODEC_MODEL_INIT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nvcodec/audio_io.h"
#include "nvcodec/denoiser.h"
#include "nvcodec/features.h"
#include "nvcodec/quantizer.h"
#include "nvcodec/vocoder.h"
#include "nvcodec/weight_set.h"

namespace nvcodec {

// Structured sparsity applied to freshly initialized networks.
inline constexpr double kPrunedSparsity = 0.92;
inline constexpr int kGruDiagonalBlocks = 16;

struct VocoderInitOptions {
  // Block-magnitude pruning of the conditioning projection and the GRU input
  // matrices; 0 keeps them dense.
  double input_sparsity = kPrunedSparsity;
  // Block-diagonal GRU recurrent matrices; 1 keeps them dense.
  int recurrent_blocks = kGruDiagonalBlocks;
  // Initial bias of every log-scale output.
  float log_scale_bias = -3.0f;
};

// Randomly initialized decoder (scaled Gaussian weights). The QMF cascade is
// the default prototype with config.qmf_levels() levels.
VocoderModel RandomVocoder(const VocoderConfig& config, uint64_t seed,
                           const VocoderInitOptions& options = {});

struct TasNetInitOptions {
  // Block pruning of the 1x1 convolutions; filterbanks and depthwise layers
  // always stay dense.
  double pointwise_sparsity = 0.0;
};

TasNetModel RandomTasNet(const TasNetConfig& config, uint64_t seed,
                         const TasNetInitOptions& options = {});

// Fits the KLT and split-VQ codebooks on `frames`.
QuantizerModel TrainQuantizer(const std::vector<FeatureFrame>& frames,
                              const VqLayout& layout = DefaultVqLayout(),
                              const KMeansOptions& options = {});

// Speech-like test signal: a glottal-pulse harmonic source with a wandering
// pitch (90-250 Hz), three moving formant resonances, a 4 Hz syllabic envelope
// with short pauses and a little aspiration noise. Peak amplitude ~0.5.
AudioBuffer SyntheticSpeech(size_t num_samples, uint64_t seed);

// Low-passed Gaussian noise ("babble-like"), RMS ~0.1.
AudioBuffer SyntheticNoise(size_t num_samples, uint64_t seed);

struct DefaultWeightsOptions {
  uint64_t seed = 0;
  VocoderConfig vocoder;
  bool with_denoiser = true;
  TasNetConfig denoiser;
  MelConfig mel;
  // Seconds of synthetic speech used to fit the quantizer.
  double training_seconds = 24.0;
};

// Complete weight file: mel config, trained quantizer, random decoder and
// (optionally) random denoiser.
WeightSet BuildDefaultWeights(const DefaultWeightsOptions& options);

// Named option sets: "default" (full-size networks) or "small" (reduced
// widths for quick experiments; rates and structure are unchanged).
DefaultWeightsOptions WeightsPreset(const std::string& name);

}  // namespace nvcodec

#endif  // NVCODEC_MODEL_INIT_H_
