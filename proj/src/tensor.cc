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

#include "nvcodec/tensor.h"

#include <cmath>

#include "nvcodec/errors.h"

namespace nvcodec {

size_t ShapeSize(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("tensor dimensions must be non-negative");
    n *= static_cast<size_t>(d);
  }
  return n;
}

Tensor::Tensor(std::vector<int> s, float fill)
    : shape(std::move(s)), data(ShapeSize(shape), fill) {}

Tensor::Tensor(std::vector<int> s, std::vector<float> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (data.size() != ShapeSize(shape)) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) +
                     " does not match shape " + ShapeString());
  }
}

std::span<float> Tensor::row(int t) {
  const size_t w = static_cast<size_t>(shape[1]);
  return {data.data() + static_cast<size_t>(t) * w, w};
}

std::span<const float> Tensor::row(int t) const {
  const size_t w = static_cast<size_t>(shape[1]);
  return {data.data() + static_cast<size_t>(t) * w, w};
}

std::string Tensor::ShapeString() const {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

bool Tensor::AllFinite() const {
  for (float v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace nvcodec
