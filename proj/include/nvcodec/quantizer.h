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

#ifndef NVCODEC_QUANTIZER_H_
#define NVCODEC_QUANTIZER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nvcodec/features.h"
#include "nvcodec/kernels.h"

namespace nvcodec {

class WeightSet;

// 25 frames/s x 120 bits = 3000 bit/s.
inline constexpr int kFrameBits = 120;
inline constexpr int kFrameRateHz = 25;
inline constexpr int kBitrateBps = kFrameBits * kFrameRateHz;

// Decorrelating transform fitted to feature statistics. Rows of `basis` are
// covariance eigenvectors in descending eigenvalue order; each row's largest
// magnitude entry is positive.
struct KltBasis {
  std::vector<float> mean;
  DenseMatrix basis;
  std::vector<double> eigenvalues;

  int dim() const { return static_cast<int>(mean.size()); }
  // basis * (x - mean)
  std::vector<float> Forward(std::span<const float> x) const;
  // basis^T * c + mean
  std::vector<float> Inverse(std::span<const float> c) const;
};

// Requires at least dim + 1 frames. A diagonal load of 1e-6 * trace / dim
// keeps rank-deficient covariances well posed.
KltBasis FitKlt(const std::vector<FeatureFrame>& frames);

struct SubVectorSpec {
  int dim = 0;
  int bits = 0;
  bool operator==(const SubVectorSpec&) const = default;
};
using VqLayout = std::vector<SubVectorSpec>;

// Ten 11-dim and five 10-dim sub-vectors at 8 bits each: 160 dims, 120 bits.
VqLayout DefaultVqLayout();
// "11:8,11:8,..." form used in WeightSet metadata.
std::string FormatVqLayout(const VqLayout& layout);
VqLayout ParseVqLayout(const std::string& text);
int LayoutBits(const VqLayout& layout);
int LayoutDim(const VqLayout& layout);

struct SplitVqCodebooks {
  VqLayout layout;
  std::vector<DenseMatrix> codebooks;  // (2^bits, dim) per sub-vector

  void Validate() const;
};

struct KMeansOptions {
  int iterations = 20;
  uint64_t seed = 0;
};

// Lloyd k-means over the rows of `points`. Initial centroids are a seeded
// draw of distinct rows; an empty cluster is re-seeded with the point farthest
// from its current centroid. Ties in assignment go to the lowest index.
DenseMatrix KMeans(const DenseMatrix& points, int k, const KMeansOptions& opts = {});

// Trains one codebook per sub-vector of the KLT coefficients.
SplitVqCodebooks TrainCodebooks(const std::vector<FeatureFrame>& frames, const KltBasis& klt,
                                const VqLayout& layout, const KMeansOptions& opts = {});

// One codeword index per sub-vector.
using FrameCode = std::vector<uint32_t>;

// Index of the nearest codeword (squared error, lowest index on ties).
uint32_t NearestCodeword(const DenseMatrix& codebook, std::span<const float> v);

FrameCode EncodeFrame(const FeatureFrame& frame, const KltBasis& klt, const SplitVqCodebooks& cb);
// Throws ShapeError unless the code carries exactly the layout's bit budget.
FeatureFrame DecodeFrame(const FrameCode& code, const KltBasis& klt, const SplitVqCodebooks& cb);

// Serialized coded stream: the NVC1 container.
//   "NVC1" | version u8 | frame_bits u16 LE | frame_rate u16 LE |
//   frame count u32 LE | payload (frame codes packed MSB-first, each index
//   written with its sub-vector's bit width, frames back to back).
struct Bitstream {
  static constexpr uint8_t kVersion = 1;
  static constexpr size_t kHeaderBytes = 13;

  uint16_t frame_bits = kFrameBits;
  uint16_t frame_rate_hz = kFrameRateHz;
  uint32_t num_frames = 0;
  std::vector<uint8_t> payload;

  size_t payload_bits() const { return size_t{num_frames} * frame_bits; }
  double bitrate_bps() const { return static_cast<double>(frame_bits) * frame_rate_hz; }
};

Bitstream PackBitstream(const std::vector<FrameCode>& codes, const VqLayout& layout,
                        int frame_rate_hz = kFrameRateHz);
std::vector<FrameCode> UnpackBitstream(const Bitstream& stream, const VqLayout& layout);

std::vector<uint8_t> SerializeBitstream(const Bitstream& stream);
// Throws FormatError on bad magic, unknown version or truncated payload.
Bitstream ParseBitstream(std::span<const uint8_t> bytes);
void WriteBitstream(const std::string& path, const Bitstream& stream);
Bitstream ReadBitstream(const std::string& path);

// KLT + codebooks as shipped inside a WeightSet ("quant." tensors, "vq.layout").
struct QuantizerModel {
  KltBasis klt;
  SplitVqCodebooks codebooks;

  static QuantizerModel FromWeights(const WeightSet& ws);
  void ToWeights(WeightSet& ws) const;
};

}  // namespace nvcodec

#endif  // NVCODEC_QUANTIZER_H_
