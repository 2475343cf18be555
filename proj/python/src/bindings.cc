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

// Python bindings: audio is exchanged as 1-D float32 numpy arrays at 16 kHz,
// bitstreams and weight files as bytes.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nvcodec/audio_io.h"
#include "nvcodec/augment.h"
#include "nvcodec/codec.h"
#include "nvcodec/denoiser.h"
#include "nvcodec/errors.h"
#include "nvcodec/features.h"
#include "nvcodec/filterbank.h"
#include "nvcodec/model_init.h"
#include "nvcodec/quantizer.h"
#include "nvcodec/weight_set.h"

namespace py = pybind11;

namespace nvcodec {
namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

std::span<const float> View(const FloatArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D audio array");
  return {a.data(), static_cast<size_t>(a.size())};
}

AudioBuffer ToAudio(const FloatArray& a) {
  const auto v = View(a);
  return AudioBuffer{{v.begin(), v.end()}, kSampleRateHz};
}

py::array_t<float> ToArray(const std::vector<float>& v) {
  py::array_t<float> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<float> ToArray(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
  py::array_t<float> out(shape);
  std::copy(t.data.begin(), t.data.end(), out.mutable_data());
  return out;
}

py::array_t<float> FramesToArray(const std::vector<FeatureFrame>& frames, int n_mels) {
  py::array_t<float> out({static_cast<py::ssize_t>(frames.size()), static_cast<py::ssize_t>(n_mels)});
  float* dst = out.mutable_data();
  for (const auto& f : frames) dst = std::copy(f.values.begin(), f.values.end(), dst);
  return out;
}

py::bytes ToBytes(const std::vector<uint8_t>& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

std::vector<uint8_t> FromBytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
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

// A loaded weight file together with the models built from it.
class PyCodec {
 public:
  explicit PyCodec(const WeightSet& ws) : model_(CodecModel::FromWeights(ws)) {}

  py::bytes Encode(const FloatArray& audio) const {
    const AudioBuffer a = ToAudio(audio);
    std::vector<uint8_t> bytes;
    {
      py::gil_scoped_release release;
      bytes = SerializeBitstream(EncodeAudio(model_.encoder, a));
    }
    return ToBytes(bytes);
  }

  py::array_t<float> Decode(const py::bytes& stream, uint64_t seed) const {
    const Bitstream s = ParseBitstream(FromBytes(stream));
    AudioBuffer out;
    {
      py::gil_scoped_release release;
      out = DecodeBitstream(model_, s, seed);
    }
    return ToArray(out.samples);
  }

  py::array_t<float> DecodeFeaturesArray(const py::bytes& stream) const {
    const Bitstream s = ParseBitstream(FromBytes(stream));
    return FramesToArray(DecodeFeatures(model_.encoder, s), model_.encoder.mel.n_mels);
  }

  py::tuple RoundtripAudio(const FloatArray& audio, const std::string& regime, uint64_t seed) const {
    const RegimeSpec& spec = ParseRegime(regime);
    const AudioBuffer a = ToAudio(audio);
    RoundtripResult r;
    {
      py::gil_scoped_release release;
      r = Roundtrip(model_, a, spec, seed);
    }
    return py::make_tuple(ToArray(r.audio.samples), ToBytes(SerializeBitstream(r.stream)));
  }

  py::array_t<float> DenoiseAudio(const FloatArray& audio) const {
    if (!model_.denoiser) throw MissingTensorError("tasnet.enc.w");
    const AudioBuffer a = ToAudio(audio);
    AudioBuffer out;
    {
      py::gil_scoped_release release;
      out = Denoise(*model_.denoiser, a);
    }
    return ToArray(out.samples);
  }

  py::array_t<float> Features(const FloatArray& audio) const {
    return FramesToArray(ExtractFeatures(ToAudio(audio), model_.encoder.mel), model_.encoder.mel.n_mels);
  }

  bool has_denoiser() const { return model_.denoiser.has_value(); }

 private:
  CodecModel model_;
};

py::dict BitstreamInfo(const py::bytes& stream) {
  const Bitstream s = ParseBitstream(FromBytes(stream));
  py::dict d;
  d["frame_bits"] = s.frame_bits;
  d["frame_rate_hz"] = s.frame_rate_hz;
  d["num_frames"] = s.num_frames;
  d["payload_bytes"] = s.payload.size();
  d["bitrate_bps"] = s.bitrate_bps();
  return d;
}

}  // namespace
}  // namespace nvcodec

PYBIND11_MODULE(_core, m) {
  using namespace nvcodec;
  m.doc() = "Native core of the nvcodec speech codec";

  m.attr("SAMPLE_RATE_HZ") = kSampleRateHz;
  m.attr("FRAME_RATE_HZ") = kFrameRateHz;
  m.attr("FRAME_BITS") = kFrameBits;
  m.attr("BITRATE_BPS") = kBitrateBps;
  m.attr("REGIMES") = py::make_tuple("c2c", "n2n", "n2c", "dc2c", "dn2n");

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<UnsupportedRateError>(m, "UnsupportedRateError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<MissingTensorError>(m, "MissingTensorError", base.ptr());
  py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<WeightSet>(m, "Weights", "Named tensors and metadata of an NVW1 weight file.")
      .def_static("load", &WeightSet::Load, py::arg("path"))
      .def_static(
          "from_bytes", [](const py::bytes& b) { return WeightSet::Parse(FromBytes(b)); }, py::arg("data"))
      .def_static(
          "build",
          [](const std::string& preset, uint64_t seed, bool with_denoiser) {
            DefaultWeightsOptions o = WeightsPreset(preset);
            o.seed = seed;
            o.with_denoiser = with_denoiser;
            py::gil_scoped_release release;
            return BuildDefaultWeights(o);
          },
          py::arg("preset") = "small", py::arg("seed") = 0, py::arg("with_denoiser") = true,
          "Randomly initialized decoder and denoiser with a quantizer fitted to synthetic speech.")
      .def("save", &WeightSet::Save, py::arg("path"))
      .def("to_bytes", [](const WeightSet& ws) { return ToBytes(ws.Serialize()); })
      .def("names",
           [](const WeightSet& ws) {
             std::vector<std::string> names;
             for (const auto& [name, st] : ws.tensors()) names.push_back(name);
             return names;
           })
      .def("__contains__", &WeightSet::Has)
      .def("__len__", [](const WeightSet& ws) { return ws.tensors().size(); })
      .def("tensor", [](const WeightSet& ws, const std::string& name) { return ToArray(ws.Get(name).tensor); },
           py::arg("name"))
      .def("layout", [](const WeightSet& ws, const std::string& name) { return LayoutName(ws.Get(name).sparsity); },
           py::arg("name"))
      .def("sparsity", [](const WeightSet& ws, const std::string& name) { return ws.Get(name).sparsity_fraction(); },
           py::arg("name"))
      .def_property_readonly("metadata", &WeightSet::metadata)
      .def_property_readonly("has_denoiser", [](const WeightSet& ws) { return HasDenoiser(ws); });

  py::class_<PyCodec>(m, "Codec", "Encoder, decoder and optional denoiser built from one weight file.")
      .def(py::init<const WeightSet&>(), py::arg("weights"))
      .def("encode", &PyCodec::Encode, py::arg("audio"), "16 kHz audio -> NVC1 bitstream bytes.")
      .def("decode", &PyCodec::Decode, py::arg("stream"), py::arg("seed") = 0,
           "NVC1 bitstream bytes -> 16 kHz audio (640 samples per frame).")
      .def("decode_features", &PyCodec::DecodeFeaturesArray, py::arg("stream"),
           "Dequantized log-mel frames, shape (frames, n_mels).")
      .def("roundtrip", &PyCodec::RoundtripAudio, py::arg("audio"), py::arg("regime") = "c2c",
           py::arg("seed") = 0, "Returns (decoded audio, bitstream bytes).")
      .def("denoise", &PyCodec::DenoiseAudio, py::arg("audio"))
      .def("features", &PyCodec::Features, py::arg("audio"))
      .def_property_readonly("has_denoiser", &PyCodec::has_denoiser);

  m.def("bitstream_info", &BitstreamInfo, py::arg("stream"));
  m.def(
      "features", [](const FloatArray& audio) { return FramesToArray(ExtractFeatures(ToAudio(audio)), MelConfig{}.n_mels); },
      py::arg("audio"), "Log-mel frames with the default front end, shape (frames, 160).");
  m.def(
      "si_snr", [](const FloatArray& est, const FloatArray& ref) { return SiSnr(View(est), View(ref)); },
      py::arg("estimate"), py::arg("reference"));
  m.def(
      "si_snr_improvement",
      [](const FloatArray& noisy, const FloatArray& enhanced, const FloatArray& clean) {
        return SiSnrImprovement(View(noisy), View(enhanced), View(clean));
      },
      py::arg("noisy"), py::arg("enhanced"), py::arg("clean"));
  m.def(
      "mix",
      [](const FloatArray& speech, const FloatArray& noise, double snr_db, uint64_t seed) {
        const MixResult r = MixAtSnr(ToAudio(speech), ToAudio(noise), snr_db, seed);
        py::dict d;
        d["mixture"] = ToArray(r.mixture.samples);
        d["scaled_noise"] = ToArray(r.scaled_noise);
        d["noise_gain"] = r.noise_gain;
        d["peak_gain"] = r.peak_gain;
        d["snr_db"] = r.achieved_snr_db;
        d["noise_offset"] = r.noise_offset;
        return d;
      },
      py::arg("speech"), py::arg("noise"), py::arg("snr_db"), py::arg("seed") = 0);
  m.def(
      "qmf_analyze",
      [](const FloatArray& audio) {
        const auto bands = Analyze(ToAudio(audio), QmfCascade{});
        py::array_t<float> out({static_cast<py::ssize_t>(bands.size()), static_cast<py::ssize_t>(bands[0].size())});
        float* dst = out.mutable_data();
        for (const auto& b : bands) dst = std::copy(b.begin(), b.end(), dst);
        return out;
      },
      py::arg("audio"), "Four critically sampled bands, shape (4, ceil(N / 4)).");
  m.def(
      "qmf_synthesize",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& bands) {
        if (bands.ndim() != 2) throw py::value_error("expected a (bands, samples) array");
        std::vector<std::vector<float>> b(static_cast<size_t>(bands.shape(0)));
        for (size_t i = 0; i < b.size(); ++i) {
          const float* row = bands.data() + i * static_cast<size_t>(bands.shape(1));
          b[i].assign(row, row + bands.shape(1));
        }
        return ToArray(Synthesize(b, QmfCascade{}).samples);
      },
      py::arg("bands"));
  m.def(
      "qmf_delay", [] { return QmfCascade{}.group_delay(); }, "Delay of qmf_synthesize(qmf_analyze(x)).");
  m.def(
      "synthetic_speech", [](size_t n, uint64_t seed) { return ToArray(SyntheticSpeech(n, seed).samples); },
      py::arg("num_samples"), py::arg("seed") = 0);
  m.def(
      "synthetic_noise", [](size_t n, uint64_t seed) { return ToArray(SyntheticNoise(n, seed).samples); },
      py::arg("num_samples"), py::arg("seed") = 0);
  m.def(
      "read_wav",
      [](const std::string& path) {
        const AudioBuffer a = ReadWav(path);
        return py::make_tuple(ToArray(a.samples), a.sample_rate_hz);
      },
      py::arg("path"), "Returns (samples, sample_rate_hz).");
  m.def(
      "write_wav",
      [](const std::string& path, const FloatArray& audio, int rate) {
        AudioBuffer a = ToAudio(audio);
        a.sample_rate_hz = rate;
        WriteWav(path, a);
      },
      py::arg("path"), py::arg("audio"), py::arg("sample_rate_hz") = kSampleRateHz);
}
