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

#include "nvcodec/augment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "byte_io.h"
#include "nvcodec/errors.h"

namespace nvcodec {
namespace {

double MeanPower(std::span<const float> x) {
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

double MeanPower(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, '\t')) fields.push_back(field);
  return fields;
}

}  // namespace

// ---------------------------------------------------------------------------
// Regimes

const std::array<RegimeSpec, 5>& RegimeTable() {
  static const std::array<RegimeSpec, 5> table = {{
      {Regime::kC2C, "c2c", AudioSource::kClean, AudioSource::kClean, Regime::kC2C},
      {Regime::kN2N, "n2n", AudioSource::kNoisy, AudioSource::kNoisy, Regime::kN2N},
      {Regime::kN2C, "n2c", AudioSource::kNoisy, AudioSource::kClean, Regime::kN2C},
      {Regime::kDC2C, "dc2c", AudioSource::kDenoised, AudioSource::kClean, Regime::kC2C},
      {Regime::kDN2N, "dn2n", AudioSource::kDenoised, AudioSource::kNoisy, Regime::kN2N},
  }};
  return table;
}

const RegimeSpec& GetRegime(Regime regime) {
  return RegimeTable()[static_cast<size_t>(regime)];
}

const RegimeSpec& ParseRegime(const std::string& name) {
  for (const RegimeSpec& r : RegimeTable()) {
    if (r.name == name) return r;
  }
  throw InvalidArgumentError("unknown regime '" + name + "' (expected c2c, n2n, n2c, dc2c or dn2n)");
}

std::string SourceName(AudioSource source) {
  switch (source) {
    case AudioSource::kClean:
      return "clean";
    case AudioSource::kNoisy:
      return "noisy";
    case AudioSource::kDenoised:
      return "denoised";
  }
  return "unknown";
}

MixSpec MixSpec::Random(CounterRng& rng, uint64_t seed) {
  MixSpec m;
  m.snr_db = rng.Uniform(kMinSnrDb, kMaxSnrDb);
  m.seed = seed;
  return m;
}

// ---------------------------------------------------------------------------
// Mixing

std::vector<float> AlignNoise(std::span<const float> noise, size_t length, CounterRng& rng,
                              size_t* offset) {
  if (noise.empty()) throw InvalidArgumentError("noise is empty");
  std::vector<float> out(length);
  size_t start = 0;
  if (noise.size() < length) {
    start = static_cast<size_t>(rng.Below(noise.size()));
    for (size_t i = 0; i < length; ++i) out[i] = noise[(start + i) % noise.size()];
  } else {
    start = static_cast<size_t>(rng.Below(noise.size() - length + 1));
    std::copy_n(noise.begin() + static_cast<std::ptrdiff_t>(start), length, out.begin());
  }
  if (offset) *offset = start;
  return out;
}

MixResult MixAtSnr(const AudioBuffer& speech, const AudioBuffer& noise, double snr_db,
                   uint64_t seed) {
  CheckEngineRate(speech);
  CheckEngineRate(noise);
  if (std::isnan(snr_db)) throw InvalidArgumentError("SNR must be a number");
  const double p_speech = MeanPower(speech.samples);
  if (!(p_speech > 0.0)) throw InvalidArgumentError("speech has zero energy");
  if (!(MeanPower(noise.samples) > 0.0)) throw InvalidArgumentError("noise has zero energy");

  MixResult r;
  CounterRng rng(seed);
  const std::vector<float> aligned =
      AlignNoise(noise.samples, speech.samples.size(), rng, &r.noise_offset);
  const double p_noise = MeanPower(aligned);
  if (!(p_noise > 0.0)) throw InvalidArgumentError("selected noise segment has zero energy");

  r.noise_gain = std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
  const size_t n = speech.samples.size();
  std::vector<double> scaled(n), mixed(n);
  double peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    scaled[i] = r.noise_gain * aligned[i];
    mixed[i] = speech.samples[i] + scaled[i];
    peak = std::max(peak, std::abs(mixed[i]));
  }
  r.peak_gain = peak > 1.0 ? 1.0 / peak : 1.0;
  r.mixture.sample_rate_hz = speech.sample_rate_hz;
  r.mixture.samples.resize(n);
  r.scaled_noise.resize(n);
  for (size_t i = 0; i < n; ++i) {
    r.mixture.samples[i] = static_cast<float>(mixed[i] * r.peak_gain);
    r.scaled_noise[i] = static_cast<float>(scaled[i]);
  }
  const double p_scaled = MeanPower(scaled);
  r.achieved_snr_db = p_scaled > 0.0 ? 10.0 * std::log10(p_speech / p_scaled)
                                     : std::numeric_limits<double>::infinity();
  return r;
}

// ---------------------------------------------------------------------------
// Pairs

AudioPair BuildPair(const RegimeSpec& regime, const AudioBuffer& clean, const AudioBuffer& noise,
                    const MixSpec& mix, const DenoiseFn& denoiser) {
  CheckEngineRate(clean);
  if (regime.needs_denoiser() && !denoiser) {
    throw InvalidArgumentError("regime " + regime.name + " requires a denoiser");
  }
  if (!regime.needs_denoiser() && denoiser) {
    throw InvalidArgumentError("regime " + regime.name + " does not use a denoiser");
  }
  AudioPair pair;
  pair.regime = &regime;
  const bool needs_mix =
      regime.conditioning != AudioSource::kClean || regime.target != AudioSource::kClean;
  AudioBuffer mixed;
  if (needs_mix) {
    MixResult m = MixAtSnr(clean, noise, mix.snr_db, mix.seed);
    mixed = std::move(m.mixture);
    pair.snr_db = m.achieved_snr_db;
    pair.mixed = true;
  }
  switch (regime.conditioning) {
    case AudioSource::kClean:
      pair.conditioning = clean;
      break;
    case AudioSource::kNoisy:
      pair.conditioning = mixed;
      break;
    case AudioSource::kDenoised:
      pair.conditioning = denoiser(mixed);
      break;
  }
  pair.target = regime.target == AudioSource::kClean ? clean : mixed;
  return pair;
}

// ---------------------------------------------------------------------------
// Manifest

std::vector<ManifestEntry> ParseManifest(const std::string& text) {
  std::vector<ManifestEntry> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = SplitTabs(line);
    const std::string where = "manifest line " + std::to_string(line_no);
    if (fields.size() != 5) throw FormatError(where + ": expected 5 tab-separated fields");
    ManifestEntry e;
    e.clean_path = fields[0];
    e.noise_path = fields[1];
    const std::string& snr = fields[2];
    auto [p1, ec1] = std::from_chars(snr.data(), snr.data() + snr.size(), e.snr_db);
    if (ec1 != std::errc() || p1 != snr.data() + snr.size()) {
      throw FormatError(where + ": bad SNR '" + snr + "'");
    }
    try {
      e.regime = ParseRegime(fields[3]).regime;
    } catch (const InvalidArgumentError& err) {
      throw FormatError(where + ": " + err.what());
    }
    const std::string& seed = fields[4];
    auto [p2, ec2] = std::from_chars(seed.data(), seed.data() + seed.size(), e.seed);
    if (ec2 != std::errc() || p2 != seed.data() + seed.size()) {
      throw FormatError(where + ": bad seed '" + seed + "'");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string FormatManifest(const std::vector<ManifestEntry>& entries) {
  std::ostringstream out;
  out.precision(17);
  for (const ManifestEntry& e : entries) {
    out << e.clean_path << '\t' << e.noise_path << '\t' << e.snr_db << '\t'
        << GetRegime(e.regime).name << '\t' << e.seed << '\n';
  }
  return out.str();
}

std::vector<ManifestEntry> ReadManifest(const std::string& path) {
  const auto bytes = internal::ReadFileBytes(path);
  return ParseManifest(std::string(bytes.begin(), bytes.end()));
}

void WriteManifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
  const std::string text = FormatManifest(entries);
  internal::WriteFileBytes(
      path, std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

}  // namespace nvcodec
