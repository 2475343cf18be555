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

#include "nvcodec/audio_io.h"

#include <algorithm>
#include <cmath>

#include "byte_io.h"
#include "nvcodec/errors.h"

namespace nvcodec {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

struct WavFormat {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t rate = 0;
  uint16_t bits = 0;
};

WavFormat ParseFmt(std::span<const uint8_t> chunk) {
  internal::ByteReader r(chunk, "wav fmt chunk");
  WavFormat f;
  f.format = r.U16();
  f.channels = r.U16();
  f.rate = r.U32();
  r.Skip(6);  // byte rate, block align
  f.bits = r.U16();
  if (f.format == kFormatExtensible) {
    if (r.remaining() < 10) throw FormatError("wav: short extensible fmt chunk");
    r.Skip(8);  // cbSize, valid bits, channel mask
    f.format = r.U16();  // first two bytes of the subformat GUID
  }
  return f;
}

}  // namespace

void CheckEngineRate(const AudioBuffer& audio) {
  if (audio.sample_rate_hz != kSampleRateHz) {
    throw UnsupportedRateError(audio.sample_rate_hz);
  }
}

AudioBuffer DecodeWav(std::span<const uint8_t> bytes) {
  internal::ByteReader r(bytes, "wav");
  if (bytes.size() < 12 || r.Str(4) != "RIFF") throw FormatError("wav: missing RIFF tag");
  r.U32();
  if (r.Str(4) != "WAVE") throw FormatError("wav: missing WAVE tag");

  WavFormat fmt;
  bool have_fmt = false;
  std::span<const uint8_t> data;
  bool have_data = false;
  while (r.remaining() >= 8) {
    std::string id = r.Str(4);
    uint32_t size = r.U32();
    // Tolerate a data chunk whose declared size overruns the file.
    size_t avail = std::min<size_t>(size, r.remaining());
    auto body = r.Take(avail);
    if (id == "fmt ") {
      fmt = ParseFmt(body);
      have_fmt = true;
    } else if (id == "data") {
      data = body;
      have_data = true;
    }
    if ((size & 1) && r.remaining() > 0) r.Skip(1);
  }
  if (!have_fmt) throw FormatError("wav: no fmt chunk");
  if (!have_data) throw FormatError("wav: no data chunk");

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !float32) {
    throw FormatError("wav: unsupported codec (format " + std::to_string(fmt.format) +
                      ", " + std::to_string(fmt.bits) + " bits)");
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    throw FormatError("wav: unsupported channel count " + std::to_string(fmt.channels));
  }
  if (fmt.rate != kSampleRateHz) throw UnsupportedRateError(static_cast<int>(fmt.rate));

  const size_t frame_bytes = size_t{fmt.channels} * (fmt.bits / 8);
  const size_t n = data.size() / frame_bytes;
  AudioBuffer audio;
  audio.sample_rate_hz = static_cast<int>(fmt.rate);
  audio.samples.resize(n);
  internal::ByteReader d(data, "wav data");
  for (size_t i = 0; i < n; ++i) {
    float acc = 0.0f;
    for (int c = 0; c < fmt.channels; ++c) {
      float v;
      if (pcm16) {
        v = static_cast<float>(static_cast<int16_t>(d.U16())) / 32768.0f;
      } else {
        v = d.F32();
        if (!std::isfinite(v)) throw FormatError("wav: non-finite sample");
        v = std::clamp(v, -1.0f, 1.0f);
      }
      acc += v;
    }
    audio.samples[i] = fmt.channels == 2 ? 0.5f * acc : acc;
  }
  return audio;
}

AudioBuffer ReadWav(const std::string& path) {
  return DecodeWav(internal::ReadFileBytes(path));
}

int16_t ToPcm16(float sample) {
  if (std::isnan(sample)) return 0;
  const double scaled = std::round(static_cast<double>(sample) * 32768.0);
  return static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::vector<uint8_t> EncodeWav(const AudioBuffer& audio) {
  const uint32_t data_bytes = static_cast<uint32_t>(audio.samples.size() * 2);
  internal::ByteWriter w;
  w.Raw("RIFF");
  w.U32(36 + data_bytes);
  w.Raw("WAVE");
  w.Raw("fmt ");
  w.U32(16);
  w.U16(kFormatPcm);
  w.U16(1);
  w.U32(static_cast<uint32_t>(audio.sample_rate_hz));
  w.U32(static_cast<uint32_t>(audio.sample_rate_hz) * 2);
  w.U16(2);
  w.U16(16);
  w.Raw("data");
  w.U32(data_bytes);
  for (float s : audio.samples) w.U16(static_cast<uint16_t>(ToPcm16(s)));
  return std::move(w.bytes());
}

void WriteWav(const std::string& path, const AudioBuffer& audio) {
  internal::WriteFileBytes(path, EncodeWav(audio));
}

FrameIterator::FrameIterator(std::span<const float> samples, size_t hop, size_t length)
    : samples_(samples), hop_(hop), length_(length) {
  if (hop == 0 || length == 0) throw InvalidArgumentError("frame hop and length must be positive");
  num_frames_ = NumFrames(samples.size(), hop);
}

void FrameIterator::Frame(size_t index, std::span<float> out) const {
  if (out.size() != length_) throw ShapeError("frame buffer has wrong length");
  const size_t start = index * hop_;
  for (size_t i = 0; i < length_; ++i) {
    const size_t pos = start + i;
    out[i] = pos < samples_.size() ? samples_[pos] : 0.0f;
  }
}

void FrameIterator::Next(std::span<float> out) {
  Frame(next_, out);
  ++next_;
}

}  // namespace nvcodec
