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

#ifndef NVCODEC_DENOISER_H_
#define NVCODEC_DENOISER_H_

#include <span>
#include <string>
#include <vector>

#include "nvcodec/audio_io.h"
#include "nvcodec/kernels.h"
#include "nvcodec/tensor.h"

namespace nvcodec {

class WeightSet;

// SI-SNR values are reported within [-kSiSnrCapDb, kSiSnrCapDb].
inline constexpr double kSiSnrCapDb = 100.0;

// Causal ConvTASNet configuration. Defaults: 256 analysis filters over 4 ms
// windows (64 samples) with a 1 ms stride (16 samples), a 128-filter mask
// encoder, 20 blocks with depthwise dilation 2^(k mod 10), 256 block channels,
// a width-3 output transposed conv and two mask frames of lookahead.
struct TasNetConfig {
  int filters = 256;
  int window = 64;
  int stride = 16;
  int mask_filters = 128;
  int num_blocks = 20;
  int dilation_cycle = 10;
  int block_channels = 256;
  int depthwise_width = 3;
  int mask_out_width = 3;
  int lookahead_frames = 2;

  int dilation(int block) const { return 1 << (block % dilation_cycle); }
  // Frame rate of the masked representation (1000 Hz at 16 kHz).
  int frame_rate_hz(int sample_rate_hz = kSampleRateHz) const { return sample_rate_hz / stride; }
  int lookahead_samples() const { return lookahead_frames * stride; }
  void Validate() const;

  void ToMetadata(WeightSet& ws) const;
  static TasNetConfig FromMetadata(const WeightSet& ws);
};

// One residual block: 1x1 conv, PReLU, causal depthwise conv, PReLU, 1x1 conv,
// added back onto the block input.
struct TasNetBlock {
  Matrix in_w;  // (block_channels, mask_filters)
  std::vector<float> in_b;
  std::vector<float> prelu1;  // per-channel slopes
  DepthwiseKernel dw;
  std::vector<float> dw_b;
  std::vector<float> prelu2;
  Matrix out_w;  // (mask_filters, block_channels)
  std::vector<float> out_b;
  int dilation = 1;
};

// Denoiser weights. Kernel tensors use the (out, in, width) layout, also for
// the transposed convolutions: tasnet.mask_out.w is (filters, mask_filters,
// mask_out_width) and tasnet.dec.w is (1, filters, window).
struct TasNetModel {
  TasNetConfig config;
  ConvKernel enc;       // (filters, 1, window), stride `stride`
  ConvKernel mask_enc;  // (mask_filters, 1, window)
  std::vector<TasNetBlock> blocks;
  ConvKernel mask_out;
  std::vector<float> mask_out_b;
  ConvKernel dec;

  // Loads every "tasnet." tensor. Unknown tensors under the prefix (for
  // example normalization parameters) are rejected: the mask network must
  // stay free of layer-wise normalization to remain causal.
  static TasNetModel FromWeights(const WeightSet& ws);
  void ToWeights(WeightSet& ws) const;

  static std::vector<std::string> TensorNames(const TasNetConfig& config);
  // The graph as an ordered list of layer kinds, e.g. "conv1x1", "prelu",
  // "depthwise", "residual_add", "sigmoid".
  std::vector<std::string> LayerKinds() const;
};

// True if `ws` holds any "tasnet." tensor.
bool HasDenoiser(const WeightSet& ws);

// Learned analysis filterbank: frame j covers samples [j*H - (W - H), j*H + H)
// and there are ceil(N / H) frames. Returns (frames, filters).
Tensor AnalysisFilterbank(const TasNetModel& model, std::span<const float> samples);

// Sigmoid masks for the (zero-padded by lookahead) input, (frames, filters),
// every value strictly inside (0, 1).
Tensor ComputeMasks(const TasNetModel& model, std::span<const float> samples);

// Enhanced audio of the same length as the input. Mask frame j + L is applied
// to analysis frame j and the transposed filterbank writes frame j to samples
// [j*H, j*H + W). Output block b (samples [b*H, (b+1)*H)) depends on input
// blocks up to b + L only.
AudioBuffer Denoise(const TasNetModel& model, const AudioBuffer& audio);

// Scale-invariant SNR in dB of zero-mean versions of the signals, clamped to
// +-kSiSnrCapDb. Throws InvalidArgumentError for unequal lengths or a
// zero-energy reference.
double SiSnr(std::span<const float> estimate, std::span<const float> reference);
double SiSnrImprovement(std::span<const float> noisy, std::span<const float> enhanced,
                        std::span<const float> clean);

}  // namespace nvcodec

#endif  // NVCODEC_DENOISER_H_
