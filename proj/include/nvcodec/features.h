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

#ifndef NVCODEC_FEATURES_H_
#define NVCODEC_FEATURES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nvcodec/audio_io.h"

namespace nvcodec {

class WeightSet;

// Log-melspectrum front end: 80 ms Hann windows every 40 ms (25 Hz), power
// spectrum, HTK mel scale, 160 triangular bands between 125 and 7500 Hz.
struct MelConfig {
  int sample_rate_hz = kSampleRateHz;
  int window_ms = 80;
  int hop_ms = 40;
  int n_mels = 160;
  int fft_size = 2048;
  double fmin_hz = 125.0;
  double fmax_hz = 7500.0;
  double log_floor = 1e-10;

  int window_samples() const { return sample_rate_hz * window_ms / 1000; }
  int hop_samples() const { return sample_rate_hz * hop_ms / 1000; }
  int frame_rate_hz() const { return 1000 / hop_ms; }
  void Validate() const;

  void ToMetadata(WeightSet& ws) const;
  static MelConfig FromMetadata(const WeightSet& ws);
};

struct FeatureFrame {
  std::vector<float> values;
  int64_t frame_index = 0;
};

double HzToMel(double hz);
double MelToHz(double mel);

// Precomputed window and mel weights for one MelConfig.
class MelSpectrogram {
 public:
  explicit MelSpectrogram(const MelConfig& cfg);

  const MelConfig& config() const { return cfg_; }
  // Log-mel vector of one window of window_samples() samples.
  std::vector<float> Compute(std::span<const float> window) const;
  // Center frequency of band m in Hz.
  double CenterHz(int m) const { return center_hz_[m]; }
  // Weight of FFT bin k in band m.
  double Weight(int m, int k) const;

 private:
  struct Band {
    int first_bin;
    std::vector<double> weights;
  };
  MelConfig cfg_;
  std::vector<double> window_;
  std::vector<Band> bands_;
  std::vector<double> center_hz_;
};

// One frame per 40 ms hop (ceil(N / hop) frames); frame t covers samples
// [t * hop, t * hop + window), zero-padded past the end. Values are
// ln(max(mel energy, log_floor)). Empty audio yields no frames.
std::vector<FeatureFrame> ExtractFeatures(const AudioBuffer& audio, const MelConfig& cfg = {});

// Debug dump: text header line "<n_mels> <hop_ms>\n" followed by one record of
// n_mels little-endian float32 per frame.
void WriteFeatureDump(const std::string& path, const std::vector<FeatureFrame>& frames,
                      const MelConfig& cfg);
std::vector<FeatureFrame> ReadFeatureDump(const std::string& path);

}  // namespace nvcodec

#endif  // NVCODEC_FEATURES_H_
