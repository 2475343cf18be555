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

#include "nvcodec/weight_set.h"

#include <cstdlib>

#include "byte_io.h"
#include "nvcodec/errors.h"

namespace nvcodec {

double StoredTensor::sparsity_fraction() const {
  switch (sparsity) {
    case SparsityTag::kDense:
      return 0.0;
    case SparsityTag::kBlock4x4:
      return 1.0 - static_cast<double>(block_ids.size()) * 16.0 / static_cast<double>(tensor.size());
    case SparsityTag::kBlockDiagonal:
      return 1.0 - 1.0 / diag_blocks;
  }
  return 0.0;
}

const StoredTensor& WeightSet::Get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw MissingTensorError(name);
  return it->second;
}

const Tensor& WeightSet::GetShaped(const std::string& name, const std::vector<int>& shape) const {
  const Tensor& t = Get(name).tensor;
  if (t.shape != shape) {
    Tensor want;
    want.shape = shape;
    throw ShapeError("tensor " + name + " has shape " + t.ShapeString() + ", expected " +
                     want.ShapeString());
  }
  return t;
}

Matrix WeightSet::GetMatrix(const std::string& name, int rows, int cols) const {
  const StoredTensor& s = Get(name);
  const Tensor& t = s.tensor;
  const bool ok = (t.rank() == 2 && t.dim(0) == rows && t.dim(1) == cols) ||
                  (t.rank() == 3 && t.dim(0) == rows && t.dim(1) == cols && t.dim(2) == 1);
  if (!ok) {
    throw ShapeError("tensor " + name + " has shape " + t.ShapeString() + ", expected (" +
                     std::to_string(rows) + ", " + std::to_string(cols) + ")");
  }
  DenseMatrix dense = DenseMatrix::FromTensor(t);
  switch (s.sparsity) {
    case SparsityTag::kBlock4x4:
      return BlockSparseMatrix::FromDense(dense, s.block_ids);
    case SparsityTag::kBlockDiagonal:
      return BlockDiagonalMatrix::FromDense(dense, s.diag_blocks);
    case SparsityTag::kDense:
      break;
  }
  return dense;
}

void WeightSet::Put(const std::string& name, Tensor tensor) {
  StoredTensor s;
  s.tensor = std::move(tensor);
  tensors_[name] = std::move(s);
}

void WeightSet::Put(const std::string& name, StoredTensor stored) {
  tensors_[name] = std::move(stored);
}

void WeightSet::PutMatrix(const std::string& name, const Matrix& m) {
  StoredTensor s;
  const DenseMatrix d = Densify(m);
  s.tensor = Tensor({d.rows(), d.cols()}, d.data());
  if (const auto* bs = std::get_if<BlockSparseMatrix>(&m)) {
    s.sparsity = SparsityTag::kBlock4x4;
    s.block_ids = bs->block_ids();
  } else if (const auto* bd = std::get_if<BlockDiagonalMatrix>(&m)) {
    s.sparsity = SparsityTag::kBlockDiagonal;
    s.diag_blocks = bd->n_blocks();
  }
  tensors_[name] = std::move(s);
}

std::optional<std::string> WeightSet::Meta(const std::string& key) const {
  auto it = meta_.find(key);
  if (it == meta_.end()) return std::nullopt;
  return it->second;
}

std::string WeightSet::MetaOr(const std::string& key, const std::string& fallback) const {
  return Meta(key).value_or(fallback);
}

double WeightSet::MetaDouble(const std::string& key, double fallback) const {
  auto v = Meta(key);
  if (!v) return fallback;
  char* end = nullptr;
  const double d = std::strtod(v->c_str(), &end);
  if (end == v->c_str() || *end != '\0') throw FormatError("metadata " + key + " is not a number");
  return d;
}

int WeightSet::MetaInt(const std::string& key, int fallback) const {
  auto v = Meta(key);
  if (!v) return fallback;
  char* end = nullptr;
  const long d = std::strtol(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0') throw FormatError("metadata " + key + " is not an integer");
  return static_cast<int>(d);
}

void WeightSet::Merge(const WeightSet& other) {
  for (const auto& [k, v] : other.tensors_) tensors_[k] = v;
  for (const auto& [k, v] : other.meta_) meta_[k] = v;
}

std::vector<uint8_t> WeightSet::Serialize() const {
  internal::ByteWriter w;
  w.Raw("NVW1");
  w.U8(kVersion);
  w.U32(static_cast<uint32_t>(tensors_.size()));
  for (const auto& [name, s] : tensors_) {
    w.U16(static_cast<uint16_t>(name.size()));
    w.Raw(name);
    w.U8(0);  // f32
    w.U8(static_cast<uint8_t>(s.tensor.rank()));
    for (int d : s.tensor.shape) w.U32(static_cast<uint32_t>(d));
    w.U8(static_cast<uint8_t>(s.sparsity));
    switch (s.sparsity) {
      case SparsityTag::kDense:
        w.F32s(s.tensor.data);
        break;
      case SparsityTag::kBlock4x4: {
        const DenseMatrix dense = DenseMatrix::FromTensor(s.tensor);
        const auto bs = BlockSparseMatrix::FromDense(dense, s.block_ids);
        w.U32(static_cast<uint32_t>(bs.block_ids().size()));
        for (uint32_t id : bs.block_ids()) w.U32(id);
        w.F32s(bs.blocks());
        break;
      }
      case SparsityTag::kBlockDiagonal: {
        const auto bd = BlockDiagonalMatrix::FromDense(DenseMatrix::FromTensor(s.tensor), s.diag_blocks);
        w.U32(static_cast<uint32_t>(s.diag_blocks));
        w.F32s(bd.blocks());
        break;
      }
    }
  }
  w.U32(static_cast<uint32_t>(meta_.size()));
  for (const auto& [k, v] : meta_) {
    w.U16(static_cast<uint16_t>(k.size()));
    w.Raw(k);
    w.U32(static_cast<uint32_t>(v.size()));
    w.Raw(v);
  }
  return std::move(w.bytes());
}

WeightSet WeightSet::Parse(std::span<const uint8_t> bytes) {
  internal::ByteReader r(bytes, "NVW1");
  if (bytes.size() < 4 || r.Str(4) != "NVW1") throw FormatError("NVW1: bad magic");
  const uint8_t version = r.U8();
  if (version != kVersion) throw FormatError("NVW1: unsupported version " + std::to_string(version));
  WeightSet ws;
  const uint32_t count = r.U32();
  for (uint32_t t = 0; t < count; ++t) {
    const std::string name = r.Str(r.U16());
    if (r.U8() != 0) throw FormatError("NVW1: tensor " + name + " has unsupported dtype");
    const int rank = r.U8();
    std::vector<int> shape(static_cast<size_t>(rank));
    for (int& d : shape) {
      d = static_cast<int>(r.U32());
      if (d <= 0) throw FormatError("NVW1: tensor " + name + " has a zero dimension");
    }
    StoredTensor s;
    s.sparsity = static_cast<SparsityTag>(r.U8());
    Tensor tensor(shape);
    switch (s.sparsity) {
      case SparsityTag::kDense:
        r.F32s(tensor.data);
        break;
      case SparsityTag::kBlock4x4: {
        if (rank < 2 || (rank == 3 && shape[2] != 1) || rank > 3) {
          throw FormatError("NVW1: block-sparse tensor " + name + " is not a matrix");
        }
        const uint32_t n = r.U32();
        s.block_ids.resize(n);
        for (auto& id : s.block_ids) id = r.U32();
        std::vector<float> blocks(size_t{n} * 16);
        r.F32s(blocks);
        const auto bs = BlockSparseMatrix::FromBlocks(shape[0], shape[1], s.block_ids, std::move(blocks));
        tensor.data = bs.ToDense().data();
        break;
      }
      case SparsityTag::kBlockDiagonal: {
        if (rank != 2 || shape[0] != shape[1]) {
          throw FormatError("NVW1: block-diagonal tensor " + name + " is not square");
        }
        s.diag_blocks = static_cast<int>(r.U32());
        if (s.diag_blocks <= 0 || shape[0] % s.diag_blocks) {
          throw FormatError("NVW1: bad block count for " + name);
        }
        const size_t bd = static_cast<size_t>(shape[0] / s.diag_blocks);
        std::vector<float> blocks(bd * bd * s.diag_blocks);
        r.F32s(blocks);
        tensor.data = BlockDiagonalMatrix::FromBlocks(shape[0], s.diag_blocks, std::move(blocks))
                          .ToDense()
                          .data();
        break;
      }
      default:
        throw FormatError("NVW1: tensor " + name + " has unknown sparsity tag");
    }
    s.tensor = std::move(tensor);
    ws.tensors_[name] = std::move(s);
  }
  const uint32_t n_meta = r.U32();
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string key = r.Str(r.U16());
    ws.meta_[key] = r.Str(r.U32());
  }
  return ws;
}

void WeightSet::Save(const std::string& path) const {
  internal::WriteFileBytes(path, Serialize());
}

WeightSet WeightSet::Load(const std::string& path) {
  return Parse(internal::ReadFileBytes(path));
}

}  // namespace nvcodec
