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

#ifndef NVCODEC_AUGMENT_H_
#define NVCODEC_AUGMENT_H_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nvcodec/audio_io.h"
#include "nvcodec/rng.h"

namespace nvcodec {

// Range of randomly drawn mixing SNRs, in dB.
inline constexpr double kMinSnrDb = 1.0;
inline constexpr double kMaxSnrDb = 40.0;

// X2Y data-pairing regimes: X is the source of the conditioning features and
// Y the source of the autoregressive (teacher-forcing) target.
enum class Regime { kC2C, kN2N, kN2C, kDC2C, kDN2N };

enum class AudioSource { kClean, kNoisy, kDenoised };

struct RegimeSpec {
  Regime regime;
  std::string name;
  AudioSource conditioning;
  AudioSource target;
  // Regime whose decoder the pair feeds: dc2c pairs are consumed by a c2c
  // model and dn2n pairs by an n2n model (the denoiser runs at inference).
  Regime trained_as;

  bool needs_denoiser() const { return conditioning == AudioSource::kDenoised; }
};

// Regimes in declaration order: c2c, n2n, n2c, dc2c, dn2n.
const std::array<RegimeSpec, 5>& RegimeTable();
const RegimeSpec& GetRegime(Regime regime);
// Accepts "c2c", "n2n", "n2c", "dc2c", "dn2n"; throws InvalidArgumentError.
const RegimeSpec& ParseRegime(const std::string& name);
std::string SourceName(AudioSource source);

struct MixSpec {
  double snr_db = 10.0;
  uint64_t seed = 0;

  // SNR drawn uniformly from [kMinSnrDb, kMaxSnrDb] with the given generator.
  static MixSpec Random(CounterRng& rng, uint64_t seed);
};

struct MixResult {
  AudioBuffer mixture;               // speech + g * noise, scaled by peak_gain
  std::vector<float> scaled_noise;   // g * aligned noise (before peak_gain)
  double noise_gain = 0.0;           // g
  double peak_gain = 1.0;            // 1, or 1 / peak when the mix clipped
  double achieved_snr_db = 0.0;      // 10 log10(P_speech / P(g * noise))
  size_t noise_offset = 0;           // start of the noise segment used
};

// Loops (random circular offset) or crops (random start) `noise` to `length`
// samples. Returns the offset used through `offset` when non-null.
std::vector<float> AlignNoise(std::span<const float> noise, size_t length, CounterRng& rng,
                              size_t* offset = nullptr);

// Mixes noise into speech at `snr_db`: g = sqrt(P_speech / (P_noise 10^(snr/10)))
// computed in double precision. If the mixture peaks above 1 it is scaled by
// 1 / peak and the gain is recorded. Throws InvalidArgumentError on
// zero-energy speech or noise.
MixResult MixAtSnr(const AudioBuffer& speech, const AudioBuffer& noise, double snr_db,
                   uint64_t seed = 0);

// Denoiser hook for the d* regimes.
using DenoiseFn = std::function<AudioBuffer(const AudioBuffer&)>;

struct AudioPair {
  AudioBuffer conditioning;
  AudioBuffer target;
  const RegimeSpec* regime = nullptr;
  double snr_db = 0.0;  // achieved SNR of the mixture when one was made
  bool mixed = false;
};

// Builds the (conditioning, target) pair for `regime`. A denoiser must be given
// exactly for the d* regimes; otherwise InvalidArgumentError is thrown.
AudioPair BuildPair(const RegimeSpec& regime, const AudioBuffer& clean, const AudioBuffer& noise,
                    const MixSpec& mix, const DenoiseFn& denoiser = nullptr);

// One line of a dataset manifest:
//   clean_path <TAB> noise_path <TAB> snr_db <TAB> regime <TAB> seed
// Blank lines and lines starting with '#' are ignored.
struct ManifestEntry {
  std::string clean_path;
  std::string noise_path;
  double snr_db = 0.0;
  Regime regime = Regime::kC2C;
  uint64_t seed = 0;

  bool operator==(const ManifestEntry&) const = default;
};

std::vector<ManifestEntry> ParseManifest(const std::string& text);
std::string FormatManifest(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> ReadManifest(const std::string& path);
void WriteManifest(const std::string& path, const std::vector<ManifestEntry>& entries);

}  // namespace nvcodec

#endif  // NVCODEC_AUGMENT_H_
