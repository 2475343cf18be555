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

#include "nvcodec/model_init.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nvcodec/augment.h"
#include "nvcodec/errors.h"
#include "nvcodec/filterbank.h"
#include "nvcodec/rng.h"

namespace nvcodec {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<float> Gaussian(CounterRng& rng, size_t n, double stddev) {
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(rng.Normal() * stddev);
  return v;
}

Tensor RandomTensor(CounterRng& rng, std::vector<int> shape, double stddev) {
  const size_t n = ShapeSize(shape);
  return Tensor(std::move(shape), Gaussian(rng, n, stddev));
}

ConvKernel RandomConv(CounterRng& rng, int out, int in, int width) {
  return ConvKernel(RandomTensor(rng, {out, in, width}, 1.0 / std::sqrt(static_cast<double>(in) * width)));
}

DenseMatrix RandomDense(CounterRng& rng, int rows, int cols, double stddev) {
  return DenseMatrix(rows, cols, Gaussian(rng, static_cast<size_t>(rows) * cols, stddev));
}

// Dense or block-pruned matrix with variance scaled to the surviving fan-in.
Matrix RandomPruned(CounterRng& rng, int rows, int cols, double sparsity) {
  const double keep = 1.0 - sparsity;
  DenseMatrix d = RandomDense(rng, rows, cols, 1.0 / std::sqrt(cols * keep));
  if (sparsity <= 0.0) return d;
  return MagnitudePrune(d, sparsity);
}

Matrix RandomBlockDiagonal(CounterRng& rng, int dim, int blocks) {
  DenseMatrix d = RandomDense(rng, dim, dim, 1.0 / std::sqrt(static_cast<double>(dim) / blocks));
  if (blocks <= 1) return d;
  return BlockDiagonalMatrix::FromDense(d, blocks);
}

// Two-pole resonator with unit peak gain, centre and bandwidth in Hz.
class Resonator {
 public:
  double Step(double x, double centre_hz, double bandwidth_hz) {
    const double r = std::exp(-std::numbers::pi * bandwidth_hz / kSampleRateHz);
    const double theta = kTwoPi * centre_hz / kSampleRateHz;
    const double y = (1.0 - r) * x + 2.0 * r * std::cos(theta) * y1_ - r * r * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double y1_ = 0.0;
  double y2_ = 0.0;
};

}  // namespace

VocoderModel RandomVocoder(const VocoderConfig& config, uint64_t seed,
                           const VocoderInitOptions& options) {
  config.Validate();
  CounterRng rng(seed);
  VocoderModel m;
  m.config = config;
  const int h = config.cond_hidden;
  const int d = config.gru_size;
  const double bias_std = 0.01;
  m.conv_in = RandomConv(rng, h, config.n_mels, config.conv_in_width);
  m.conv_in_b = Gaussian(rng, h, bias_std);
  for (int i = 0; i < kNumDilatedLayers; ++i) {
    m.dilated[i] = RandomConv(rng, h, h, config.dilated_width);
    m.dilated_b[i] = Gaussian(rng, h, bias_std);
  }
  for (int i = 0; i < kNumUpsampleLayers; ++i) {
    m.upsample[i] = RandomConv(rng, h, h, config.upsample_width);
    m.upsample_b[i] = Gaussian(rng, h, bias_std);
  }
  const bool divisible = h % 4 == 0 && d % 4 == 0;
  const double sparsity = divisible ? options.input_sparsity : 0.0;
  m.cond_proj = RandomPruned(rng, d, h, sparsity);
  m.cond_proj_b = Gaussian(rng, d, bias_std);
  m.gru.w_r = RandomPruned(rng, d, d, sparsity);
  m.gru.w_z = RandomPruned(rng, d, d, sparsity);
  m.gru.w_n = RandomPruned(rng, d, d, sparsity);
  const int blocks = d % options.recurrent_blocks == 0 ? options.recurrent_blocks : 1;
  m.gru.u_r = RandomBlockDiagonal(rng, d, blocks);
  m.gru.u_z = RandomBlockDiagonal(rng, d, blocks);
  m.gru.u_n = RandomBlockDiagonal(rng, d, blocks);
  m.gru.b_r = Gaussian(rng, d, bias_std);
  m.gru.b_z = Gaussian(rng, d, bias_std);
  m.gru.b_n = Gaussian(rng, d, bias_std);
  m.ar_proj = RandomDense(rng, d, config.num_bands, 1.0);
  m.mol_proj = RandomDense(rng, config.head_size(), d, 0.1 / std::sqrt(static_cast<double>(d)));
  m.mol_proj_b.assign(static_cast<size_t>(config.head_size()), 0.0f);
  const int k = config.mixture_components;
  for (int b = 0; b < config.num_bands; ++b) {
    for (int j = 0; j < k; ++j) {
      // Spread the component means over [-0.5, 0.5].
      m.mol_proj_b[static_cast<size_t>(b * 3 * k + k + j)] =
          k > 1 ? static_cast<float>(-0.5 + double(j) / (k - 1)) : 0.0f;
      m.mol_proj_b[static_cast<size_t>(b * 3 * k + 2 * k + j)] = options.log_scale_bias;
    }
  }
  m.qmf.levels = config.qmf_levels();
  m.PrepareDerived();
  return m;
}

TasNetModel RandomTasNet(const TasNetConfig& config, uint64_t seed,
                         const TasNetInitOptions& options) {
  config.Validate();
  CounterRng rng(seed);
  TasNetModel m;
  m.config = config;
  const int fp = config.mask_filters;
  const int ch = config.block_channels;
  m.enc = RandomConv(rng, config.filters, 1, config.window);
  m.mask_enc = RandomConv(rng, fp, 1, config.window);
  const bool prune = options.pointwise_sparsity > 0.0 && fp % 4 == 0 && ch % 4 == 0;
  for (int k = 0; k < config.num_blocks; ++k) {
    TasNetBlock b;
    b.in_w = RandomPruned(rng, ch, fp, prune ? options.pointwise_sparsity : 0.0);
    b.in_b = Gaussian(rng, ch, 0.01);
    b.prelu1.assign(static_cast<size_t>(ch), 0.25f);
    b.dw = DepthwiseKernel(
        RandomTensor(rng, {ch, 1, config.depthwise_width}, 1.0 / std::sqrt(config.depthwise_width)));
    b.dw_b = Gaussian(rng, ch, 0.01);
    b.prelu2.assign(static_cast<size_t>(ch), 0.25f);
    // Small residual branches keep the 20-block stack well conditioned.
    const double keep = prune ? 1.0 - options.pointwise_sparsity : 1.0;
    DenseMatrix out = RandomDense(rng, fp, ch, 0.2 / std::sqrt(ch * keep));
    b.out_w = prune ? Matrix(MagnitudePrune(out, options.pointwise_sparsity)) : Matrix(out);
    b.out_b = Gaussian(rng, fp, 0.01);
    b.dilation = config.dilation(k);
    m.blocks.push_back(std::move(b));
  }
  m.mask_out = RandomConv(rng, config.filters, fp, config.mask_out_width);
  m.mask_out_b = Gaussian(rng, config.filters, 0.01);
  m.dec = RandomConv(rng, 1, config.filters, config.window);
  return m;
}

QuantizerModel TrainQuantizer(const std::vector<FeatureFrame>& frames, const VqLayout& layout,
                              const KMeansOptions& options) {
  QuantizerModel q;
  q.klt = FitKlt(frames);
  q.codebooks = TrainCodebooks(frames, q.klt, layout, options);
  return q;
}

AudioBuffer SyntheticSpeech(size_t num_samples, uint64_t seed) {
  CounterRng rng(seed);
  const double fs = kSampleRateHz;
  const double pitch_phase = rng.Uniform(0.0, kTwoPi);
  const double formant_phase = rng.Uniform(0.0, kTwoPi);
  const double base_f0 = rng.Uniform(110.0, 190.0);
  Resonator r1, r2, r3;
  std::vector<double> y(num_samples);
  double phase = 0.0;
  // Syllables of 0.15-0.35 s, about one in five silent.
  size_t syllable_end = 0;
  double syllable_len = 1.0, syllable_gain = 0.0;
  size_t syllable_start = 0;
  for (size_t n = 0; n < num_samples; ++n) {
    const double t = static_cast<double>(n) / fs;
    if (n >= syllable_end) {
      syllable_start = n;
      syllable_len = rng.Uniform(0.15, 0.35) * fs;
      syllable_end = n + static_cast<size_t>(syllable_len);
      syllable_gain = rng.Uniform() < 0.2 ? 0.0 : rng.Uniform(0.4, 1.0);
    }
    const double pos = static_cast<double>(n - syllable_start) / syllable_len;
    const double envelope = syllable_gain * std::pow(std::sin(std::numbers::pi * pos), 0.6);

    double f0 = base_f0 + 40.0 * std::sin(kTwoPi * 0.7 * t + pitch_phase) +
                15.0 * std::sin(kTwoPi * 2.3 * t);
    f0 = std::clamp(f0, 90.0, 250.0);
    phase += kTwoPi * f0 / fs;
    if (phase > kTwoPi) phase -= kTwoPi;
    // Band-limited sawtooth as a glottal source.
    double source = 0.0;
    for (int h = 1; h * f0 < 7000.0; ++h) source += std::sin(h * phase) / h;
    source += 0.05 * rng.Normal();

    const double f1 = 550.0 + 250.0 * std::sin(kTwoPi * 3.1 * t + formant_phase);
    const double f2 = 1550.0 + 650.0 * std::sin(kTwoPi * 2.2 * t + 1.3 * formant_phase);
    const double f3 = 2650.0 + 350.0 * std::sin(kTwoPi * 1.4 * t);
    const double v = r1.Step(source, f1, 90.0) + 0.7 * r2.Step(source, f2, 120.0) +
                     0.4 * r3.Step(source, f3, 170.0);
    y[n] = envelope * v + 0.002 * rng.Normal();
  }
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  AudioBuffer out;
  out.samples.resize(num_samples);
  const double scale = peak > 0.0 ? 0.5 / peak : 0.0;
  for (size_t n = 0; n < num_samples; ++n) out.samples[n] = static_cast<float>(y[n] * scale);
  return out;
}

AudioBuffer SyntheticNoise(size_t num_samples, uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> y(num_samples);
  double state = 0.0, energy = 0.0;
  for (size_t n = 0; n < num_samples; ++n) {
    state = 0.85 * state + rng.Normal();
    y[n] = state;
    energy += state * state;
  }
  AudioBuffer out;
  out.samples.resize(num_samples);
  const double rms = num_samples ? std::sqrt(energy / static_cast<double>(num_samples)) : 0.0;
  const double scale = rms > 0.0 ? 0.1 / rms : 0.0;
  for (size_t n = 0; n < num_samples; ++n) out.samples[n] = static_cast<float>(y[n] * scale);
  return out;
}

WeightSet BuildDefaultWeights(const DefaultWeightsOptions& options) {
  options.mel.Validate();
  if (options.mel.n_mels != options.vocoder.n_mels) {
    throw InvalidArgumentError("mel bands and vocoder input size differ");
  }
  const size_t n = static_cast<size_t>(options.training_seconds * kSampleRateHz);
  const AudioBuffer speech = SyntheticSpeech(n, options.seed + 1);
  const AudioBuffer noise = SyntheticNoise(n, options.seed + 2);
  std::vector<FeatureFrame> frames = ExtractFeatures(speech, options.mel);
  // Noisy material widens the feature distribution the quantizer sees.
  CounterRng rng(options.seed + 3);
  const MixSpec mix = MixSpec::Random(rng, options.seed + 4);
  const auto noisy = ExtractFeatures(MixAtSnr(speech, noise, mix.snr_db, mix.seed).mixture,
                                     options.mel);
  frames.insert(frames.end(), noisy.begin(), noisy.end());

  KMeansOptions km;
  km.seed = options.seed;
  WeightSet ws;
  options.mel.ToMetadata(ws);
  TrainQuantizer(frames, DefaultVqLayout(), km).ToWeights(ws);
  RandomVocoder(options.vocoder, options.seed + 5).ToWeights(ws);
  if (options.with_denoiser) {
    TasNetInitOptions tn;
    tn.pointwise_sparsity = kPrunedSparsity;
    RandomTasNet(options.denoiser, options.seed + 6, tn).ToWeights(ws);
  }
  return ws;
}

DefaultWeightsOptions WeightsPreset(const std::string& name) {
  DefaultWeightsOptions w;
  if (name == "small") {
    w.vocoder.cond_hidden = 64;
    w.vocoder.gru_size = 128;
    w.denoiser.filters = 64;
    w.denoiser.mask_filters = 32;
    w.denoiser.block_channels = 64;
    w.denoiser.num_blocks = 4;
    w.training_seconds = 12.0;
  } else if (name != "default") {
    throw InvalidArgumentError("unknown preset '" + name + "' (default or small)");
  }
  return w;
}

}  // namespace nvcodec
