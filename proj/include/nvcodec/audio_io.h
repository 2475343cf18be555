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

#ifndef NVCODEC_AUDIO_IO_H_
#define NVCODEC_AUDIO_IO_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nvcodec {

// Native engine sample rate. Every engine-facing operation rejects other rates.
inline constexpr int kSampleRateHz = 16000;

// Mono PCM audio, samples nominally in [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate_hz = kSampleRateHz;

  size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Throws UnsupportedRateError unless the buffer is at kSampleRateHz.
void CheckEngineRate(const AudioBuffer& audio);

// Parses a RIFF/WAVE image. Accepts PCM16 and IEEE float32 (plain or
// WAVE_FORMAT_EXTENSIBLE), mono or stereo. Stereo is averaged to mono, PCM16
// is scaled by 1/32768 and float samples are clamped to [-1, 1].
AudioBuffer DecodeWav(std::span<const uint8_t> bytes);
AudioBuffer ReadWav(const std::string& path);

// 16-bit PCM mono. Samples outside [-1, 1] saturate to [-32768, 32767].
std::vector<uint8_t> EncodeWav(const AudioBuffer& audio);
void WriteWav(const std::string& path, const AudioBuffer& audio);

// Float to PCM16 with rounding and saturation.
int16_t ToPcm16(float sample);

// Fixed-hop framing over a sample sequence. Yields ceil(N / hop) frames of
// `length` samples; frame t starts at t * hop and is zero-padded past the end.
class FrameIterator {
 public:
  FrameIterator(std::span<const float> samples, size_t hop, size_t length);

  size_t num_frames() const { return num_frames_; }
  bool Done() const { return next_ >= num_frames_; }
  // Copies the next frame into `out` (size `length`) and advances.
  void Next(std::span<float> out);
  // Random access to frame `index` without advancing.
  void Frame(size_t index, std::span<float> out) const;

 private:
  std::span<const float> samples_;
  size_t hop_;
  size_t length_;
  size_t num_frames_;
  size_t next_ = 0;
};

inline size_t NumFrames(size_t num_samples, size_t hop) {
  return (num_samples + hop - 1) / hop;
}

}  // namespace nvcodec

#endif  // NVCODEC_AUDIO_IO_H_
