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

#ifndef NVCODEC_WEIGHT_SET_H_
#define NVCODEC_WEIGHT_SET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nvcodec/kernels.h"
#include "nvcodec/tensor.h"

namespace nvcodec {

// On-disk layout tag of a stored tensor.
enum class SparsityTag : uint8_t {
  kDense = 0,
  kBlock4x4 = 1,
  kBlockDiagonal = 2,
};

struct StoredTensor {
  Tensor tensor;  // always materialized densely in memory
  SparsityTag sparsity = SparsityTag::kDense;
  std::vector<uint32_t> block_ids;  // kBlock4x4
  int diag_blocks = 0;              // kBlockDiagonal

  // Fraction of structurally-zero entries implied by the layout tag.
  double sparsity_fraction() const;
};

// Named tensors plus string key/value metadata: the NVW1 container.
//
//   "NVW1" | version u8 | tensor count u32
//   per tensor: name (u16 len + utf8) | dtype u8 (0 = f32) | rank u8 |
//               dims u32 each | sparsity u8
//               [block4x4: count u32, ids u32 each, 16 floats per block]
//               [blockdiag: n_blocks u32, n_blocks * (D/n)^2 floats]
//               [dense: product(dims) floats]
//   metadata: count u32, then key (u16 len + utf8), value (u32 len + utf8)
//
// All integers and floats are little-endian.
class WeightSet {
 public:
  static constexpr uint8_t kVersion = 1;

  bool Has(const std::string& name) const { return tensors_.count(name) > 0; }
  // Throws MissingTensorError.
  const StoredTensor& Get(const std::string& name) const;
  // Like Get, but also checks the shape; throws ShapeError naming the tensor.
  const Tensor& GetShaped(const std::string& name, const std::vector<int>& shape) const;
  // Returns the tensor as a matrix honouring its sparsity tag.
  Matrix GetMatrix(const std::string& name, int rows, int cols) const;

  void Put(const std::string& name, Tensor tensor);
  void PutMatrix(const std::string& name, const Matrix& m);
  void Put(const std::string& name, StoredTensor stored);

  const std::map<std::string, StoredTensor>& tensors() const { return tensors_; }

  void SetMeta(const std::string& key, const std::string& value) { meta_[key] = value; }
  std::optional<std::string> Meta(const std::string& key) const;
  std::string MetaOr(const std::string& key, const std::string& fallback) const;
  double MetaDouble(const std::string& key, double fallback) const;
  int MetaInt(const std::string& key, int fallback) const;
  const std::map<std::string, std::string>& metadata() const { return meta_; }

  // Copies every tensor and metadata entry of `other` (other wins on clash).
  void Merge(const WeightSet& other);

  std::vector<uint8_t> Serialize() const;
  static WeightSet Parse(std::span<const uint8_t> bytes);
  void Save(const std::string& path) const;
  static WeightSet Load(const std::string& path);

 private:
  std::map<std::string, StoredTensor> tensors_;
  std::map<std::string, std::string> meta_;
};

}  // namespace nvcodec

#endif  // NVCODEC_WEIGHT_SET_H_
