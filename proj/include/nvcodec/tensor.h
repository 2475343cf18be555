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

#ifndef NVCODEC_TENSOR_H_
#define NVCODEC_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nvcodec {

// Dense row-major float32 tensor. Sequences are stored time-major as
// (time, channels); convolution kernels as (out_channels, in_channels, width).
struct Tensor {
  std::vector<int> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> shape, float fill = 0.0f);
  Tensor(std::vector<int> shape, std::vector<float> data);

  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape.at(static_cast<size_t>(i)); }
  size_t size() const { return data.size(); }

  // Row t of a rank-2 tensor.
  std::span<float> row(int t);
  std::span<const float> row(int t) const;

  std::string ShapeString() const;
  bool AllFinite() const;
};

size_t ShapeSize(const std::vector<int>& shape);

}  // namespace nvcodec

#endif  // NVCODEC_TENSOR_H_
