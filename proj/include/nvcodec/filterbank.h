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

#ifndef NVCODEC_FILTERBANK_H_
#define NVCODEC_FILTERBANK_H_

#include <span>
#include <vector>

#include "nvcodec/audio_io.h"

namespace nvcodec {

class WeightSet;

// Low-pass prototypes for the two-band building block, normalized to unit
// energy (sum of h[n]^2 is 1, so the DC gain is close to sqrt(2)).
std::vector<float> DefaultQmfPrototype();  // 16-tap near-perfect-reconstruction
std::vector<float> HaarQmfPrototype();     // exact perfect reconstruction

// Tree of two-band QMF splits giving M = 2^levels critically sampled bands.
//
// Each stage filters with h0 (low) and h1[n] = (-1)^n h0[n] (high) and keeps
// every second output; synthesis uses f0 = h0, f1 = -h1, which cancels
// aliasing exactly. Both outputs of a stage are split again, so bands come out
// in tree order: for M = 4, band 0 = LL, 1 = LH, 2 = HL, 3 = HH. The high
// branch is spectrally inverted after decimation, so band 2 holds 6-8 kHz and
// band 3 holds 4-6 kHz at 16 kHz input.
struct QmfCascade {
  std::vector<float> prototype = DefaultQmfPrototype();
  int levels = 2;

  int num_bands() const { return 1 << levels; }
  // Samples of delay of synthesize(analyze(x)) relative to x:
  // (2^levels - 1) * (taps - 2).
  int group_delay() const;
  void Validate() const;

  static QmfCascade Haar(int levels = 2);
  static QmfCascade FromWeights(const WeightSet& ws);
  void ToWeights(WeightSet& ws) const;
};

// Streaming analysis. Chunked pushes produce exactly the same band samples as
// a single push of the concatenation.
class QmfAnalyzer {
 public:
  explicit QmfAnalyzer(const QmfCascade& cascade);

  // Appends every completed band sample to bands[b].
  void Push(std::span<const float> samples, std::vector<std::vector<float>>& bands);
  int num_bands() const { return cascade_.num_bands(); }

 private:
  struct Stage {
    std::vector<double> history;  // circular, prototype length
    int pos = 0;
    int phase = 0;
  };
  void PushStage(int level, int index, double x, std::vector<std::vector<float>>& bands);

  QmfCascade cascade_;
  std::vector<double> h0_, h1_;
  std::vector<std::vector<Stage>> stages_;  // [level][index]
};

// Streaming synthesis: one sample per band in, num_bands() samples out.
class QmfSynthesizer {
 public:
  explicit QmfSynthesizer(const QmfCascade& cascade);

  // `step` holds one sample per band; writes num_bands() output samples.
  void Push(std::span<const float> step, std::span<float> out);
  int num_bands() const { return cascade_.num_bands(); }

  // Flat snapshot of every delay line, for decoder state serialization.
  std::vector<double> SaveState() const;
  void LoadState(std::span<const double> state);

 private:
  struct Stage {
    std::vector<double> low, high;  // last taps/2 inputs, newest first
  };
  void Synth(int level, int index, std::span<const double> in, std::span<double> out);

  QmfCascade cascade_;
  std::vector<double> f0_, f1_;
  std::vector<std::vector<Stage>> stages_;
};

// Splits 16 kHz audio into num_bands() streams of ceil(N / M) samples (input
// zero-padded to a multiple of M).
std::vector<std::vector<float>> Analyze(const AudioBuffer& audio, const QmfCascade& cascade);
// Inverse of Analyze up to group_delay() samples; output length M * band length.
AudioBuffer Synthesize(const std::vector<std::vector<float>>& bands, const QmfCascade& cascade);

}  // namespace nvcodec

#endif  // NVCODEC_FILTERBANK_H_
