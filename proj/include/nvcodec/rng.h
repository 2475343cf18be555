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

#ifndef NVCODEC_RNG_H_
#define NVCODEC_RNG_H_

#include <cstdint>

namespace nvcodec {

// Counter-based generator used for every random decision in the engine.
//
// Draw i (i = 1, 2, ...) is Mix(seed + i * 0x9E3779B97F4A7C15) where Mix is
// the SplitMix64 finalizer:
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z = z ^ (z >> 31)
// Uniform() maps a draw to ((x >> 11) + 0.5) / 2^53, strictly inside (0, 1).
// The full state is (seed, counter), so it can be snapshotted and resumed.
class CounterRng {
 public:
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  explicit CounterRng(uint64_t seed = 0, uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  static uint64_t Mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t NextU64() {
    ++counter_;
    return Mix(seed_ + counter_ * kGamma);
  }

  double Uniform() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Integer in [0, n) by multiply-shift; n must be positive.
  uint64_t Below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(NextU64()) * n) >> 64);
  }

  // Standard normal via Box-Muller (consumes two draws).
  double Normal();

  uint64_t seed() const { return seed_; }
  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t counter_;
};

}  // namespace nvcodec

#endif  // NVCODEC_RNG_H_
