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

// Command-line front end: encode, decode, denoise, roundtrip, mix, metrics,
// inspect and init-weights. Every command is deterministic given its flags;
// --porcelain switches the report to one key=value pair per line.

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "nvcodec/audio_io.h"
#include "nvcodec/augment.h"
#include "nvcodec/codec.h"
#include "nvcodec/denoiser.h"
#include "nvcodec/errors.h"
#include "nvcodec/model_init.h"
#include "nvcodec/quantizer.h"
#include "nvcodec/weight_set.h"

namespace nvcodec {
namespace {

struct Options {
  bool porcelain = false;
  std::string weights;
  uint64_t seed = 0;
  double snr_db = 10.0;
  std::string regime = "c2c";
  std::string input;
  std::string noise;
  std::vector<std::string> inputs;
  std::string output;
  std::string preset = "default";
  bool no_denoiser = false;
};

// Collects key/value results and prints them in either format.
class Report {
 public:
  explicit Report(bool porcelain) : porcelain_(porcelain) {}

  template <typename T>
  Report& Add(const std::string& key, const T& value) {
    std::ostringstream s;
    s << std::setprecision(10) << value;
    items_.emplace_back(key, s.str());
    return *this;
  }

  void Print(const std::string& human) const {
    if (porcelain_) {
      for (const auto& [k, v] : items_) std::cout << k << "=" << v << "\n";
    } else {
      std::cout << human << "\n";
    }
  }

 private:
  bool porcelain_;
  std::vector<std::pair<std::string, std::string>> items_;
};

WeightSet LoadWeights(const Options& o) {
  if (o.weights.empty()) throw InvalidArgumentError("--weights is required");
  return WeightSet::Load(o.weights);
}

int CmdEncode(const Options& o) {
  const EncoderModel model = EncoderModel::FromWeights(LoadWeights(o));
  const AudioBuffer audio = ReadWav(o.input);
  const Bitstream stream = EncodeAudio(model, audio);
  WriteBitstream(o.output, stream);
  Report r(o.porcelain);
  r.Add("frames", stream.num_frames)
      .Add("payload_bytes", stream.payload.size())
      .Add("bitrate_bps", stream.bitrate_bps())
      .Add("output", o.output);
  std::ostringstream h;
  h << "encoded " << stream.num_frames << " frames (" << stream.payload.size()
    << " payload bytes, " << stream.bitrate_bps() << " bps) -> " << o.output;
  r.Print(h.str());
  return 0;
}

int CmdDecode(const Options& o) {
  const CodecModel model = CodecModel::FromWeights(LoadWeights(o));
  const Bitstream stream = ReadBitstream(o.input);
  const AudioBuffer audio = DecodeBitstream(model, stream, o.seed);
  WriteWav(o.output, audio);
  Report r(o.porcelain);
  r.Add("frames", stream.num_frames)
      .Add("samples", audio.samples.size())
      .Add("seed", o.seed)
      .Add("output", o.output);
  std::ostringstream h;
  h << "decoded " << stream.num_frames << " frames to " << audio.samples.size()
    << " samples (seed " << o.seed << ") -> " << o.output;
  r.Print(h.str());
  return 0;
}

int CmdDenoise(const Options& o) {
  const WeightSet ws = LoadWeights(o);
  if (!HasDenoiser(ws)) throw MissingTensorError("tasnet.enc.w");
  const TasNetModel model = TasNetModel::FromWeights(ws);
  const AudioBuffer audio = ReadWav(o.input);
  const AudioBuffer out = Denoise(model, audio);
  WriteWav(o.output, out);
  Report r(o.porcelain);
  r.Add("samples", out.samples.size())
      .Add("lookahead_samples", model.config.lookahead_samples())
      .Add("output", o.output);
  std::ostringstream h;
  h << "denoised " << out.samples.size() << " samples -> " << o.output;
  r.Print(h.str());
  return 0;
}

int CmdRoundtrip(const Options& o) {
  const RegimeSpec& regime = ParseRegime(o.regime);
  const CodecModel model = CodecModel::FromWeights(LoadWeights(o));
  const AudioBuffer audio = ReadWav(o.input);
  const RoundtripResult res = Roundtrip(model, audio, regime, o.seed);
  WriteWav(o.output, res.audio);
  Report r(o.porcelain);
  r.Add("regime", regime.name)
      .Add("denoised", res.denoised ? 1 : 0)
      .Add("frames", res.stream.num_frames)
      .Add("input_samples", audio.samples.size())
      .Add("output_samples", res.audio.samples.size())
      .Add("bitrate_bps", res.bitrate_bps)
      .Add("output", o.output);
  std::ostringstream h;
  h << "roundtrip (" << regime.name << (res.denoised ? ", denoised" : "") << "): "
    << res.stream.num_frames << " frames at " << res.bitrate_bps << " bps, "
    << audio.samples.size() << " -> " << res.audio.samples.size() << " samples -> " << o.output;
  r.Print(h.str());
  return 0;
}

int CmdMix(const Options& o) {
  const AudioBuffer clean = ReadWav(o.input);
  const AudioBuffer noise = ReadWav(o.noise);
  const MixResult m = MixAtSnr(clean, noise, o.snr_db, o.seed);
  WriteWav(o.output, m.mixture);
  Report r(o.porcelain);
  r.Add("snr_db", m.achieved_snr_db)
      .Add("noise_gain", m.noise_gain)
      .Add("peak_gain", m.peak_gain)
      .Add("noise_offset", m.noise_offset)
      .Add("output", o.output);
  std::ostringstream h;
  h << std::setprecision(10) << "mixed at " << m.achieved_snr_db << " dB (noise gain "
    << m.noise_gain << ", peak gain " << m.peak_gain << ") -> " << o.output;
  r.Print(h.str());
  return 0;
}

int CmdMetrics(const Options& o) {
  Report r(o.porcelain);
  std::ostringstream h;
  h << std::setprecision(6) << std::fixed;
  if (o.inputs.size() == 2) {
    const AudioBuffer est = ReadWav(o.inputs[0]);
    const AudioBuffer ref = ReadWav(o.inputs[1]);
    const double v = SiSnr(est.samples, ref.samples);
    r.Add("si_snr_db", v);
    h << "SI-SNR: " << v << " dB";
  } else if (o.inputs.size() == 3) {
    const AudioBuffer noisy = ReadWav(o.inputs[0]);
    const AudioBuffer enhanced = ReadWav(o.inputs[1]);
    const AudioBuffer clean = ReadWav(o.inputs[2]);
    const double sn = SiSnr(noisy.samples, clean.samples);
    const double se = SiSnr(enhanced.samples, clean.samples);
    r.Add("si_snr_noisy_db", sn).Add("si_snr_enhanced_db", se).Add("si_snri_db", se - sn);
    h << "SI-SNR noisy: " << sn << " dB\nSI-SNR enhanced: " << se << " dB\nSI-SNRi: " << se - sn
      << " dB";
  } else {
    throw InvalidArgumentError("metrics takes ESTIMATE REFERENCE or NOISY ENHANCED CLEAN");
  }
  r.Print(h.str());
  return 0;
}

std::string LayoutName(SparsityTag tag) {
  switch (tag) {
    case SparsityTag::kDense:
      return "dense";
    case SparsityTag::kBlock4x4:
      return "block4x4";
    case SparsityTag::kBlockDiagonal:
      return "blockdiag";
  }
  return "unknown";
}

int CmdInspect(const Options& o) {
  const WeightSet ws = WeightSet::Load(o.input);
  size_t total = 0;
  for (const auto& [name, st] : ws.tensors()) {
    const double pct = 100.0 * st.sparsity_fraction();
    total += st.tensor.size();
    if (o.porcelain) {
      std::cout << "tensor=" << name << " shape=" << st.tensor.ShapeString()
                << " layout=" << LayoutName(st.sparsity) << " sparsity_pct=" << std::setprecision(6)
                << pct << "\n";
    } else {
      std::cout << std::left << std::setw(28) << name << " " << std::setw(18)
                << st.tensor.ShapeString() << " " << std::setw(10) << LayoutName(st.sparsity)
                << " " << std::fixed << std::setprecision(2) << pct << "% sparse\n"
                << std::defaultfloat;
    }
  }
  for (const auto& [k, v] : ws.metadata()) {
    if (o.porcelain) {
      std::cout << "meta." << k << "=" << v << "\n";
    } else {
      std::cout << "meta " << k << " = " << v << "\n";
    }
  }
  if (o.porcelain) {
    std::cout << "tensors=" << ws.tensors().size() << "\nparameters=" << total << "\n";
  } else {
    std::cout << ws.tensors().size() << " tensors, " << total << " parameters\n";
  }
  return 0;
}

int CmdInitWeights(const Options& o) {
  DefaultWeightsOptions w = WeightsPreset(o.preset);
  w.seed = o.seed;
  w.with_denoiser = !o.no_denoiser;
  const WeightSet ws = BuildDefaultWeights(w);
  ws.Save(o.output);
  Report r(o.porcelain);
  r.Add("tensors", ws.tensors().size()).Add("preset", o.preset).Add("output", o.output);
  std::ostringstream h;
  h << "wrote " << ws.tensors().size() << " tensors (" << o.preset << " preset, seed " << o.seed
    << ") -> " << o.output;
  r.Print(h.str());
  return 0;
}

}  // namespace
}  // namespace nvcodec

int main(int argc, char** argv) {
  using namespace nvcodec;
  Options o;
  CLI::App app{"nvcodec: 3 kbps neural speech codec"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--porcelain", o.porcelain, "Machine-readable key=value output");

  auto weights_opt = [&](CLI::App* c) {
    c->add_option("--weights", o.weights, "NVW1 weight file")->required();
  };
  auto seed_opt = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed (default 0)");
  };
  auto io = [&](CLI::App* c, const std::string& in, const std::string& out) {
    c->add_option("input", o.input, in)->required();
    c->add_option("output", o.output, out)->required();
  };

  auto* encode = app.add_subcommand("encode", "Encode a WAV file into an NVC1 bitstream");
  io(encode, "Input WAV", "Output bitstream");
  weights_opt(encode);

  auto* decode = app.add_subcommand("decode", "Decode an NVC1 bitstream into a WAV file");
  io(decode, "Input bitstream", "Output WAV");
  weights_opt(decode);
  seed_opt(decode);

  auto* denoise = app.add_subcommand("denoise", "Run the causal ConvTASNet denoiser");
  io(denoise, "Input WAV", "Output WAV");
  weights_opt(denoise);

  auto* roundtrip = app.add_subcommand("roundtrip", "(Denoise), encode and decode a WAV file");
  io(roundtrip, "Input WAV", "Output WAV");
  weights_opt(roundtrip);
  seed_opt(roundtrip);
  roundtrip->add_option("--regime", o.regime, "c2c, n2n, n2c, dc2c or dn2n (d* denoise first)");

  auto* mix = app.add_subcommand("mix", "Mix noise into speech at a given SNR");
  mix->add_option("clean", o.input, "Clean speech WAV")->required();
  mix->add_option("noise", o.noise, "Noise WAV")->required();
  mix->add_option("output", o.output, "Output WAV")->required();
  mix->add_option("--snr-db", o.snr_db, "Target SNR in dB");
  seed_opt(mix);

  auto* metrics = app.add_subcommand(
      "metrics", "SI-SNR of ESTIMATE vs REFERENCE, or SI-SNRi of NOISY ENHANCED CLEAN");
  metrics->add_option("inputs", o.inputs, "WAV files")->required()->expected(2, 3);

  auto* inspect = app.add_subcommand("inspect", "List tensors, shapes and sparsity");
  inspect->add_option("weights", o.input, "NVW1 weight file")->required();

  auto* init = app.add_subcommand("init-weights", "Write a randomly initialized weight file");
  init->add_option("output", o.output, "Output NVW1 file")->required();
  seed_opt(init);
  init->add_option("--preset", o.preset, "default or small");
  init->add_flag("--no-denoiser", o.no_denoiser, "Omit the tasnet.* tensors");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode) return CmdEncode(o);
    if (*decode) return CmdDecode(o);
    if (*denoise) return CmdDenoise(o);
    if (*roundtrip) return CmdRoundtrip(o);
    if (*mix) return CmdMix(o);
    if (*metrics) return CmdMetrics(o);
    if (*inspect) return CmdInspect(o);
    if (*init) return CmdInitWeights(o);
  } catch (const MissingTensorError& e) {
    std::cerr << "error: missing tensor " << e.name() << " (" << e.what() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
