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

#include "nvcodec/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "byte_io.h"
#include "nvcodec/errors.h"
#include "nvcodec/weight_set.h"

namespace nvcodec {

void MelConfig::Validate() const {
  if (sample_rate_hz != kSampleRateHz) throw UnsupportedRateError(sample_rate_hz);
  if (hop_ms <= 0 || 1000 % hop_ms != 0) {
    throw InvalidArgumentError("mel hop must divide one second exactly");
  }
  if (window_ms < hop_ms) throw InvalidArgumentError("mel window shorter than hop");
  if (n_mels <= 0) throw InvalidArgumentError("n_mels must be positive");
  if (fft_size < window_samples() || (fft_size & (fft_size - 1)) != 0) {
    throw InvalidArgumentError("fft_size must be a power of two >= window length");
  }
  if (!(fmin_hz >= 0 && fmin_hz < fmax_hz && fmax_hz <= sample_rate_hz / 2.0)) {
    throw InvalidArgumentError("mel band edges out of range");
  }
  if (!(log_floor > 0)) throw InvalidArgumentError("log floor must be positive");
}

void MelConfig::ToMetadata(WeightSet& ws) const {
  ws.SetMeta("mel.window_ms", std::to_string(window_ms));
  ws.SetMeta("mel.hop_ms", std::to_string(hop_ms));
  ws.SetMeta("mel.n_mels", std::to_string(n_mels));
  ws.SetMeta("mel.fft_size", std::to_string(fft_size));
  std::ostringstream s;
  s.precision(17);
  s << fmin_hz;
  ws.SetMeta("mel.fmin_hz", s.str());
  s.str("");
  s << fmax_hz;
  ws.SetMeta("mel.fmax_hz", s.str());
  s.str("");
  s << log_floor;
  ws.SetMeta("mel.log_floor", s.str());
}

MelConfig MelConfig::FromMetadata(const WeightSet& ws) {
  MelConfig c;
  c.window_ms = ws.MetaInt("mel.window_ms", c.window_ms);
  c.hop_ms = ws.MetaInt("mel.hop_ms", c.hop_ms);
  c.n_mels = ws.MetaInt("mel.n_mels", c.n_mels);
  c.fft_size = ws.MetaInt("mel.fft_size", c.fft_size);
  c.fmin_hz = ws.MetaDouble("mel.fmin_hz", c.fmin_hz);
  c.fmax_hz = ws.MetaDouble("mel.fmax_hz", c.fmax_hz);
  c.log_floor = ws.MetaDouble("mel.log_floor", c.log_floor);
  c.Validate();
  return c;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelSpectrogram::MelSpectrogram(const MelConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  const int w = cfg_.window_samples();
  window_.resize(static_cast<size_t>(w));
  // Periodic Hann.
  for (int n = 0; n < w; ++n) {
    window_[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / w);
  }

  const int n_bins = cfg_.fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(cfg_.sample_rate_hz) / cfg_.fft_size;
  const double mel_lo = HzToMel(cfg_.fmin_hz);
  const double mel_hi = HzToMel(cfg_.fmax_hz);
  std::vector<double> edges(static_cast<size_t>(cfg_.n_mels) + 2);
  for (size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (cfg_.n_mels + 1));
  }
  bands_.resize(static_cast<size_t>(cfg_.n_mels));
  center_hz_.resize(static_cast<size_t>(cfg_.n_mels));
  for (int m = 0; m < cfg_.n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    center_hz_[m] = mid;
    Band& band = bands_[m];
    band.first_bin = -1;
    for (int k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      double wgt = 0.0;
      if (f > lo && f < hi) wgt = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      if (wgt > 0.0) {
        if (band.first_bin < 0) band.first_bin = k;
        band.weights.resize(static_cast<size_t>(k - band.first_bin + 1), 0.0);
        band.weights.back() = wgt;
      }
    }
    if (band.first_bin < 0) {
      throw InvalidArgumentError("mel band " + std::to_string(m) + " covers no FFT bin");
    }
  }
}

double MelSpectrogram::Weight(int m, int k) const {
  const Band& b = bands_[m];
  const int off = k - b.first_bin;
  if (off < 0 || off >= static_cast<int>(b.weights.size())) return 0.0;
  return b.weights[off];
}

std::vector<float> MelSpectrogram::Compute(std::span<const float> window) const {
  if (window.size() != window_.size()) throw ShapeError("mel window has wrong length");
  std::vector<double> buf(static_cast<size_t>(cfg_.fft_size), 0.0);
  for (size_t n = 0; n < window.size(); ++n) buf[n] = window[n] * window_[n];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, buf);
  const int n_bins = cfg_.fft_size / 2 + 1;
  std::vector<double> power(static_cast<size_t>(n_bins));
  for (int k = 0; k < n_bins; ++k) power[k] = std::norm(spec[k]);

  std::vector<float> out(static_cast<size_t>(cfg_.n_mels));
  for (int m = 0; m < cfg_.n_mels; ++m) {
    const Band& b = bands_[m];
    double e = 0.0;
    for (size_t j = 0; j < b.weights.size(); ++j) e += b.weights[j] * power[b.first_bin + j];
    out[m] = static_cast<float>(std::log(std::max(e, cfg_.log_floor)));
  }
  return out;
}

std::vector<FeatureFrame> ExtractFeatures(const AudioBuffer& audio, const MelConfig& cfg) {
  CheckEngineRate(audio);
  MelSpectrogram mel(cfg);
  FrameIterator frames(audio.samples, static_cast<size_t>(cfg.hop_samples()),
                       static_cast<size_t>(cfg.window_samples()));
  std::vector<FeatureFrame> out;
  out.reserve(frames.num_frames());
  std::vector<float> window(static_cast<size_t>(cfg.window_samples()));
  for (int64_t t = 0; !frames.Done(); ++t) {
    frames.Next(window);
    out.push_back({mel.Compute(window), t});
  }
  return out;
}

void WriteFeatureDump(const std::string& path, const std::vector<FeatureFrame>& frames,
                      const MelConfig& cfg) {
  internal::ByteWriter w;
  w.Raw(std::to_string(cfg.n_mels) + " " + std::to_string(cfg.hop_ms) + "\n");
  for (const auto& f : frames) {
    if (f.values.size() != static_cast<size_t>(cfg.n_mels)) throw ShapeError("feature frame size mismatch");
    w.F32s(f.values);
  }
  internal::WriteFileBytes(path, w.bytes());
}

std::vector<FeatureFrame> ReadFeatureDump(const std::string& path) {
  const auto bytes = internal::ReadFileBytes(path);
  auto nl = std::find(bytes.begin(), bytes.end(), uint8_t{'\n'});
  if (nl == bytes.end()) throw FormatError("feature dump: missing header line");
  std::istringstream header(std::string(bytes.begin(), nl));
  int n_mels = 0, hop_ms = 0;
  if (!(header >> n_mels >> hop_ms) || n_mels <= 0) throw FormatError("feature dump: bad header");
  const size_t offset = static_cast<size_t>(nl - bytes.begin()) + 1;
  const size_t record = static_cast<size_t>(n_mels) * 4;
  if ((bytes.size() - offset) % record != 0) throw FormatError("feature dump: truncated record");
  internal::ByteReader r(std::span<const uint8_t>(bytes).subspan(offset), "feature dump");
  std::vector<FeatureFrame> frames((bytes.size() - offset) / record);
  for (size_t t = 0; t < frames.size(); ++t) {
    frames[t].frame_index = static_cast<int64_t>(t);
    frames[t].values.resize(static_cast<size_t>(n_mels));
    r.F32s(frames[t].values);
  }
  return frames;
}

}  // namespace nvcodec
