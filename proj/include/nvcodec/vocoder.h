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

#ifndef NVCODEC_VOCODER_H_
#define NVCODEC_VOCODER_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nvcodec/audio_io.h"
#include "nvcodec/features.h"
#include "nvcodec/filterbank.h"
#include "nvcodec/kernels.h"
#include "nvcodec/mol.h"
#include "nvcodec/rng.h"
#include "nvcodec/tensor.h"

namespace nvcodec {

class WeightSet;

inline constexpr int kNumUpsampleLayers = 3;
inline constexpr int kNumDilatedLayers = 3;

// Shapes and rates of the generative decoder. Defaults: 25 Hz features,
// conditioning stack of width 512 with one frame of lookahead, three causal
// dilated convs (kernel 2, dilations 1/2/4), three x2 transposed convs
// (25 -> 200 Hz), tiling x20 to the 4 kHz WaveGRU rate, GRU state 1024,
// 4 bands and 8 logistic components per band.
struct VocoderConfig {
  int sample_rate_hz = kSampleRateHz;
  int frame_rate_hz = 25;
  int n_mels = 160;
  int cond_hidden = 512;
  int conv_in_width = 3;
  int lookahead_frames = 1;
  int dilated_width = 2;
  std::array<int, kNumDilatedLayers> dilations = {1, 2, 4};
  int upsample_stride = 2;
  int upsample_width = 4;
  int gru_size = 1024;
  int num_bands = 4;
  int mixture_components = 8;
  double log_scale_min = kDefaultLogScaleMin;

  int qmf_levels() const;
  // 4000 Hz for the defaults.
  int step_rate_hz() const { return sample_rate_hz / num_bands; }
  // 200 Hz.
  int upsampled_rate_hz() const;
  // GRU steps per feature frame (160).
  int steps_per_frame() const { return step_rate_hz() / frame_rate_hz; }
  // Repeats of each upsampled vector (20).
  int tile_factor() const { return step_rate_hz() / upsampled_rate_hz(); }
  // Output samples per feature frame (640).
  int samples_per_frame() const { return sample_rate_hz / frame_rate_hz; }
  // M * K * 3.
  int head_size() const { return num_bands * mixture_components * 3; }
  // Throws InvalidArgumentError unless every rate relation is an exact integer.
  void Validate() const;

  void ToMetadata(WeightSet& ws) const;
  static VocoderConfig FromMetadata(const WeightSet& ws);
};

// Immutable decoder weights. Shareable across decode streams.
struct VocoderModel {
  VocoderConfig config;
  ConvKernel conv_in;
  std::vector<float> conv_in_b;
  std::array<ConvKernel, kNumDilatedLayers> dilated;
  std::array<std::vector<float>, kNumDilatedLayers> dilated_b;
  std::array<ConvKernel, kNumUpsampleLayers> upsample;
  std::array<std::vector<float>, kNumUpsampleLayers> upsample_b;
  Matrix cond_proj;
  std::vector<float> cond_proj_b;
  GruWeights gru;
  DenseMatrix ar_proj;  // (gru_size, num_bands)
  Matrix mol_proj;
  std::vector<float> mol_proj_b;
  QmfCascade qmf;

  // W_r, W_z, W_n times ar_proj, so that W (c + A s) = W c + (W A) s.
  std::array<DenseMatrix, 3> gate_ar;

  // Loads and shape-checks every canonical tensor. When tensors are missing
  // the error lists all of them; MissingTensorError::name() is the first.
  static VocoderModel FromWeights(const WeightSet& ws);
  void ToWeights(WeightSet& ws) const;

  // Recomputes gate_ar; call after changing the GRU input matrices or ar_proj.
  void PrepareDerived();

  // Canonical tensor names consumed by FromWeights.
  static std::vector<std::string> TensorNames();
};

// Conditioning stack over a whole feature sequence at the upsampled rate:
// (8 * n_frames, gru_size) for the defaults. Row r covers GRU steps
// [r * tile, (r + 1) * tile).
Tensor ConditionUpsampled(const VocoderModel& model, const std::vector<FeatureFrame>& features);

// Conditioning at the GRU rate: (steps_per_frame * n_frames, gru_size).
// Output rows of frame t depend on features [0, t + lookahead] only.
Tensor Condition(const VocoderModel& model, const std::vector<FeatureFrame>& features);

// Streaming conditioning stack. Pushing frame f releases the upsampled rows
// of frame f - lookahead; Finish() releases the rest as if zero frames
// followed. Produces exactly the rows of ConditionUpsampled.
class ConditioningStream {
 public:
  explicit ConditioningStream(const VocoderModel& model);

  // Appends released rows (each gru_size floats) to `out`.
  void Push(std::span<const float> features, std::vector<float>& out);
  void Finish(std::vector<float>& out);

  std::vector<const RowHistory*> histories() const;
  std::vector<RowHistory*> mutable_histories();
  int64_t upsampled_rows() const { return upsampled_rows_; }
  void set_upsampled_rows(int64_t n) { upsampled_rows_ = n; }

 private:
  void Advance(bool final, std::vector<float>& out);

  const VocoderModel* model_;
  RowHistory features_;
  // Outputs of conv_in, each dilated conv and every upsampler but the last.
  std::array<RowHistory, kNumDilatedLayers + kNumUpsampleLayers> layers_;
  std::vector<float> row_;
  int64_t upsampled_rows_ = 0;
};

// Resumable snapshot of a decode stream taken between feature frames.
struct DecoderState {
  std::vector<float> hidden;
  std::vector<float> last_samples;
  std::vector<int64_t> history_counts;
  std::vector<std::vector<float>> history_rings;
  int64_t upsampled_rows = 0;
  std::vector<double> qmf_state;
  uint64_t rng_seed = 0;
  uint64_t rng_counter = 0;
  int64_t steps = 0;

  std::vector<uint8_t> Serialize() const;
  static DecoderState Parse(std::span<const uint8_t> bytes);
};

// Autoregressive decoder. Each GRU step samples one value per band from the
// mixture-of-logistics head and the QMF synthesis turns them into num_bands
// output samples. Output equals Decode() for the same seed.
class StreamingDecoder {
 public:
  StreamingDecoder(const VocoderModel& model, uint64_t seed);

  // Returns the audio released by this frame (samples_per_frame() samples
  // once the lookahead is filled, nothing before).
  std::vector<float> PushFrame(std::span<const float> features);
  // Flushes the frames still waiting on lookahead.
  std::vector<float> Finish();

  DecoderState Snapshot() const;
  void Restore(const DecoderState& state);

  int64_t steps() const { return steps_; }

 private:
  void RunRows(std::span<const float> rows, std::vector<float>& audio);

  const VocoderModel* model_;
  ConditioningStream cond_;
  std::vector<float> hidden_;
  std::vector<float> last_;
  QmfSynthesizer synth_;
  CounterRng rng_;
  int64_t steps_ = 0;
};

// Decodes a feature sequence into exactly samples_per_frame() * n_frames
// samples. Deterministic given the seed.
AudioBuffer Decode(const VocoderModel& model, const std::vector<FeatureFrame>& features,
                   uint64_t seed);

// Mean negative log-likelihood per subband sample of `target` under the model,
// feeding the ground-truth previous subband samples to the autoregressive
// input. `target` must hold samples_per_frame() * n_frames samples.
double TeacherForcedNll(const VocoderModel& model, const std::vector<FeatureFrame>& features,
                        const AudioBuffer& target);

}  // namespace nvcodec

#endif  // NVCODEC_VOCODER_H_
