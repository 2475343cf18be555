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

#include "nvcodec/kernels.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nvcodec/errors.h"

namespace nvcodec {
namespace {

constexpr int kB = BlockSparseMatrix::kBlockSize;

void CheckVec(size_t got, int want, const char* what) {
  if (got != static_cast<size_t>(want)) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(want) +
                     ", got " + std::to_string(got));
  }
}

double BlockNorm(const DenseMatrix& m, int br, int bc) {
  double s = 0.0;
  for (int i = 0; i < kB; ++i) {
    for (int j = 0; j < kB; ++j) {
      const double v = m.at(br * kB + i, bc * kB + j);
      s += v * v;
    }
  }
  return std::sqrt(s);
}

}  // namespace

float Dot(const float* a, const float* b, int n) {
  float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) acc[l] += a[i + l] * b[i + l];
  }
  for (int l = 0; i < n; ++i, ++l) acc[l] += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

// ---------------------------------------------------------------------------

DenseMatrix::DenseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0f) {}

DenseMatrix::DenseMatrix(int rows, int cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != static_cast<size_t>(rows) * cols) {
    throw ShapeError("dense matrix data length mismatch");
  }
}

DenseMatrix DenseMatrix::FromTensor(const Tensor& t) {
  if (t.rank() == 2) return DenseMatrix(t.dim(0), t.dim(1), t.data);
  if (t.rank() == 3 && t.dim(2) == 1) return DenseMatrix(t.dim(0), t.dim(1), t.data);
  throw ShapeError("matrix tensor must be rank 2 (or rank 3 of width 1), got " +
                   t.ShapeString());
}

BlockSparseMatrix BlockSparseMatrix::FromDense(const DenseMatrix& dense,
                                               std::vector<uint32_t> block_ids) {
  const int bcols = dense.cols() / kB;
  std::vector<float> blocks;
  std::sort(block_ids.begin(), block_ids.end());
  blocks.reserve(block_ids.size() * kB * kB);
  if (dense.rows() % kB || dense.cols() % kB) {
    throw ShapeError("block-sparse matrix dims must be divisible by 4");
  }
  for (uint32_t id : block_ids) {
    const int br = static_cast<int>(id) / bcols;
    const int bc = static_cast<int>(id) % bcols;
    if (br >= dense.rows() / kB) throw ShapeError("block id out of range");
    for (int i = 0; i < kB; ++i) {
      for (int j = 0; j < kB; ++j) blocks.push_back(dense.at(br * kB + i, bc * kB + j));
    }
  }
  return FromBlocks(dense.rows(), dense.cols(), std::move(block_ids), std::move(blocks));
}

BlockSparseMatrix BlockSparseMatrix::FromBlocks(int rows, int cols,
                                                std::vector<uint32_t> block_ids,
                                                std::vector<float> blocks) {
  if (rows <= 0 || cols <= 0 || rows % kB || cols % kB) {
    throw ShapeError("block-sparse matrix dims must be positive multiples of 4");
  }
  if (blocks.size() != block_ids.size() * kB * kB) {
    throw ShapeError("block-sparse payload size does not match block count");
  }
  if (!std::is_sorted(block_ids.begin(), block_ids.end()) ||
      std::adjacent_find(block_ids.begin(), block_ids.end()) != block_ids.end()) {
    throw ShapeError("block ids must be strictly increasing");
  }
  BlockSparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  const int brows = rows / kB;
  const int bcols = cols / kB;
  if (!block_ids.empty() && block_ids.back() >= static_cast<uint32_t>(brows * bcols)) {
    throw ShapeError("block id out of range");
  }
  m.row_start_.assign(static_cast<size_t>(brows) + 1, 0);
  for (uint32_t id : block_ids) ++m.row_start_[id / bcols + 1];
  std::partial_sum(m.row_start_.begin(), m.row_start_.end(), m.row_start_.begin());
  m.block_ids_ = std::move(block_ids);
  m.blocks_ = std::move(blocks);
  return m;
}

double BlockSparseMatrix::sparsity() const {
  return 1.0 - static_cast<double>(stored_blocks()) * kB * kB /
                   (static_cast<double>(rows_) * cols_);
}

DenseMatrix BlockSparseMatrix::ToDense() const {
  DenseMatrix d(rows_, cols_);
  const int bcols = cols_ / kB;
  for (size_t b = 0; b < block_ids_.size(); ++b) {
    const int br = static_cast<int>(block_ids_[b]) / bcols;
    const int bc = static_cast<int>(block_ids_[b]) % bcols;
    for (int i = 0; i < kB; ++i) {
      for (int j = 0; j < kB; ++j) d.at(br * kB + i, bc * kB + j) = blocks_[b * 16 + i * kB + j];
    }
  }
  return d;
}

void BlockSparseMatrix::Multiply(std::span<const float> x, std::span<float> y) const {
  CheckVec(x.size(), cols_, "block-sparse matvec input");
  CheckVec(y.size(), rows_, "block-sparse matvec output");
  const int bcols = cols_ / kB;
  const int brows = rows_ / kB;
  for (int br = 0; br < brows; ++br) {
    float a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    for (int b = row_start_[br]; b < row_start_[br + 1]; ++b) {
      const float* blk = blocks_.data() + static_cast<size_t>(b) * 16;
      const float* xs = x.data() + (block_ids_[b] % bcols) * kB;
      a0 += blk[0] * xs[0] + blk[1] * xs[1] + blk[2] * xs[2] + blk[3] * xs[3];
      a1 += blk[4] * xs[0] + blk[5] * xs[1] + blk[6] * xs[2] + blk[7] * xs[3];
      a2 += blk[8] * xs[0] + blk[9] * xs[1] + blk[10] * xs[2] + blk[11] * xs[3];
      a3 += blk[12] * xs[0] + blk[13] * xs[1] + blk[14] * xs[2] + blk[15] * xs[3];
    }
    y[br * kB + 0] = a0;
    y[br * kB + 1] = a1;
    y[br * kB + 2] = a2;
    y[br * kB + 3] = a3;
  }
}

BlockDiagonalMatrix BlockDiagonalMatrix::FromDense(const DenseMatrix& dense, int n_blocks) {
  if (dense.rows() != dense.cols()) throw ShapeError("block-diagonal matrix must be square");
  if (n_blocks <= 0 || dense.rows() % n_blocks) {
    throw ShapeError("block count must divide the matrix dimension");
  }
  const int bd = dense.rows() / n_blocks;
  std::vector<float> blocks;
  blocks.reserve(static_cast<size_t>(n_blocks) * bd * bd);
  for (int b = 0; b < n_blocks; ++b) {
    for (int i = 0; i < bd; ++i) {
      for (int j = 0; j < bd; ++j) blocks.push_back(dense.at(b * bd + i, b * bd + j));
    }
  }
  return FromBlocks(dense.rows(), n_blocks, std::move(blocks));
}

BlockDiagonalMatrix BlockDiagonalMatrix::FromBlocks(int dim, int n_blocks,
                                                    std::vector<float> blocks) {
  if (dim <= 0 || n_blocks <= 0 || dim % n_blocks) {
    throw ShapeError("block count must divide the matrix dimension");
  }
  const size_t bd = static_cast<size_t>(dim / n_blocks);
  if (blocks.size() != bd * bd * n_blocks) throw ShapeError("block-diagonal payload size mismatch");
  BlockDiagonalMatrix m;
  m.dim_ = dim;
  m.n_blocks_ = n_blocks;
  m.blocks_ = std::move(blocks);
  return m;
}

DenseMatrix BlockDiagonalMatrix::ToDense() const {
  DenseMatrix d(dim_, dim_);
  const int bd = block_dim();
  for (int b = 0; b < n_blocks_; ++b) {
    for (int i = 0; i < bd; ++i) {
      for (int j = 0; j < bd; ++j) {
        d.at(b * bd + i, b * bd + j) = blocks_[(static_cast<size_t>(b) * bd + i) * bd + j];
      }
    }
  }
  return d;
}

void BlockDiagonalMatrix::Multiply(std::span<const float> x, std::span<float> y) const {
  CheckVec(x.size(), dim_, "block-diagonal matvec input");
  CheckVec(y.size(), dim_, "block-diagonal matvec output");
  const int bd = block_dim();
  for (int b = 0; b < n_blocks_; ++b) {
    const float* xs = x.data() + b * bd;
    for (int i = 0; i < bd; ++i) {
      y[b * bd + i] = Dot(blocks_.data() + (static_cast<size_t>(b) * bd + i) * bd, xs, bd);
    }
  }
}

int Rows(const Matrix& m) {
  return std::visit([](const auto& v) { return v.rows(); }, m);
}

int Cols(const Matrix& m) {
  return std::visit([](const auto& v) { return v.cols(); }, m);
}

double Sparsity(const Matrix& m) {
  if (const auto* s = std::get_if<BlockSparseMatrix>(&m)) return s->sparsity();
  if (const auto* d = std::get_if<BlockDiagonalMatrix>(&m)) return d->sparsity();
  return 0.0;
}

DenseMatrix Densify(const Matrix& m) {
  if (const auto* s = std::get_if<BlockSparseMatrix>(&m)) return s->ToDense();
  if (const auto* d = std::get_if<BlockDiagonalMatrix>(&m)) return d->ToDense();
  return std::get<DenseMatrix>(m);
}

void MatVec(const Matrix& m, std::span<const float> x, std::span<float> y) {
  if (const auto* d = std::get_if<DenseMatrix>(&m)) {
    CheckVec(x.size(), d->cols(), "dense matvec input");
    CheckVec(y.size(), d->rows(), "dense matvec output");
    for (int r = 0; r < d->rows(); ++r) y[r] = Dot(d->row(r), x.data(), d->cols());
  } else if (const auto* s = std::get_if<BlockSparseMatrix>(&m)) {
    s->Multiply(x, y);
  } else {
    std::get<BlockDiagonalMatrix>(m).Multiply(x, y);
  }
}

std::vector<float> MatVec(const Matrix& m, std::span<const float> x) {
  std::vector<float> y(static_cast<size_t>(Rows(m)));
  MatVec(m, x, y);
  return y;
}

BlockSparseMatrix MagnitudePrune(const DenseMatrix& dense, double target_sparsity) {
  if (!(target_sparsity >= 0.0 && target_sparsity < 1.0)) {
    throw InvalidArgumentError("target sparsity must lie in [0, 1)");
  }
  if (dense.rows() % kB || dense.cols() % kB || dense.rows() == 0 || dense.cols() == 0) {
    throw ShapeError("pruned matrix dims must be positive multiples of 4");
  }
  const int brows = dense.rows() / kB;
  const int bcols = dense.cols() / kB;
  const int n = brows * bcols;
  std::vector<double> norms(static_cast<size_t>(n));
  for (int br = 0; br < brows; ++br) {
    for (int bc = 0; bc < bcols; ++bc) norms[br * bcols + bc] = BlockNorm(dense, br, bc);
  }
  // The epsilon absorbs rounding in (1 - target) * n for exact ratios such as (n-1)/n.
  int keep = static_cast<int>(std::ceil((1.0 - target_sparsity) * n - 1e-9));
  keep = std::clamp(keep, 1, n);
  std::vector<uint32_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](uint32_t a, uint32_t b) { return norms[a] > norms[b]; });
  order.resize(static_cast<size_t>(keep));
  return BlockSparseMatrix::FromDense(dense, std::move(order));
}

// ---------------------------------------------------------------------------

ConvKernel::ConvKernel(const Tensor& w) {
  if (w.rank() != 3) throw ShapeError("conv kernel must be (out, in, width), got " + w.ShapeString());
  out_ = w.dim(0);
  in_ = w.dim(1);
  width_ = w.dim(2);
  packed_.resize(w.size());
  for (int o = 0; o < out_; ++o) {
    for (int i = 0; i < in_; ++i) {
      for (int k = 0; k < width_; ++k) {
        packed_[(static_cast<size_t>(o) * width_ + k) * in_ + i] =
            w.data[(static_cast<size_t>(o) * in_ + i) * width_ + k];
      }
    }
  }
}

void ConvRow(const ConvKernel& kernel, std::span<const float> bias,
             std::span<const float* const> taps, std::span<float> out) {
  if (taps.size() != static_cast<size_t>(kernel.width())) throw ShapeError("conv tap count mismatch");
  if (!bias.empty()) CheckVec(bias.size(), kernel.out_channels(), "conv bias");
  CheckVec(out.size(), kernel.out_channels(), "conv output row");
  for (int o = 0; o < kernel.out_channels(); ++o) {
    float acc = bias.empty() ? 0.0f : bias[o];
    for (int k = 0; k < kernel.width(); ++k) {
      if (taps[k] != nullptr) acc += Dot(kernel.tap(o, k), taps[k], kernel.in_channels());
    }
    out[o] = acc;
  }
}

int64_t ConvTapIndex(int width, const ConvOptions& opts, int64_t t, int k) {
  return t * opts.stride + (opts.stride - 1) + opts.lookahead -
         static_cast<int64_t>(width - 1 - k) * opts.dilation;
}

Tensor Conv1d(const Tensor& input, const ConvKernel& kernel, std::span<const float> bias,
              const ConvOptions& opts) {
  if (input.rank() != 2 || input.dim(1) != kernel.in_channels()) {
    throw ShapeError("conv1d input " + input.ShapeString() + " does not match kernel input channels " +
                     std::to_string(kernel.in_channels()));
  }
  if (opts.dilation < 1 || opts.stride < 1 || opts.lookahead < 0) {
    throw InvalidArgumentError("conv1d: dilation and stride must be >= 1, lookahead >= 0");
  }
  const int64_t steps = input.dim(0);
  const int64_t out_steps = (steps + opts.stride - 1) / opts.stride;
  Tensor out({static_cast<int>(out_steps), kernel.out_channels()});
  std::vector<const float*> taps(static_cast<size_t>(kernel.width()));
  for (int64_t t = 0; t < out_steps; ++t) {
    for (int k = 0; k < kernel.width(); ++k) {
      const int64_t p = ConvTapIndex(kernel.width(), opts, t, k);
      taps[k] = (p >= 0 && p < steps) ? input.row(static_cast<int>(p)).data() : nullptr;
    }
    ConvRow(kernel, bias, taps, out.row(static_cast<int>(t)));
  }
  return out;
}

Tensor Conv1d(const Tensor& input, const Tensor& kernel, std::span<const float> bias,
              const ConvOptions& opts) {
  return Conv1d(input, ConvKernel(kernel), bias, opts);
}

int64_t TransposeTapIndex(int64_t n, int k, int stride) {
  const int64_t z = n - k;
  if (z < 0 || z % stride != 0) return -1;
  return z / stride;
}

Tensor TransposeConv1d(const Tensor& input, const ConvKernel& kernel, std::span<const float> bias,
                       int stride) {
  if (input.rank() != 2 || input.dim(1) != kernel.in_channels()) {
    throw ShapeError("transpose conv input " + input.ShapeString() +
                     " does not match kernel input channels " + std::to_string(kernel.in_channels()));
  }
  if (stride < 1) throw InvalidArgumentError("transpose conv stride must be >= 1");
  const int64_t steps = input.dim(0);
  const int64_t out_steps = steps * stride;
  Tensor out({static_cast<int>(out_steps), kernel.out_channels()});
  std::vector<const float*> taps(static_cast<size_t>(kernel.width()));
  for (int64_t n = 0; n < out_steps; ++n) {
    for (int k = 0; k < kernel.width(); ++k) {
      const int64_t m = TransposeTapIndex(n, k, stride);
      taps[k] = (m >= 0 && m < steps) ? input.row(static_cast<int>(m)).data() : nullptr;
    }
    ConvRow(kernel, bias, taps, out.row(static_cast<int>(n)));
  }
  return out;
}

Tensor TransposeConv1d(const Tensor& input, const Tensor& kernel, std::span<const float> bias,
                       int stride) {
  return TransposeConv1d(input, ConvKernel(kernel), bias, stride);
}

DepthwiseKernel::DepthwiseKernel(const Tensor& w) {
  if (w.rank() == 3 && w.dim(1) == 1) {
    channels_ = w.dim(0);
    width_ = w.dim(2);
  } else if (w.rank() == 2) {
    channels_ = w.dim(0);
    width_ = w.dim(1);
  } else {
    throw ShapeError("depthwise kernel must be (C, 1, width) or (C, width), got " + w.ShapeString());
  }
  data_ = w.data;
}

void DepthwiseRow(const DepthwiseKernel& kernel, std::span<const float> bias,
                  std::span<const float* const> taps, std::span<float> out) {
  if (taps.size() != static_cast<size_t>(kernel.width())) throw ShapeError("depthwise tap count mismatch");
  if (!bias.empty()) CheckVec(bias.size(), kernel.channels(), "depthwise bias");
  CheckVec(out.size(), kernel.channels(), "depthwise output row");
  for (int c = 0; c < kernel.channels(); ++c) out[c] = bias.empty() ? 0.0f : bias[c];
  for (int k = 0; k < kernel.width(); ++k) {
    if (taps[k] == nullptr) continue;
    for (int c = 0; c < kernel.channels(); ++c) out[c] += kernel.at(c, k) * taps[k][c];
  }
}

Tensor DepthwiseConv1d(const Tensor& input, const DepthwiseKernel& kernel,
                       std::span<const float> bias, int dilation, int lookahead) {
  if (input.rank() != 2 || input.dim(1) != kernel.channels()) {
    throw ShapeError("depthwise input " + input.ShapeString() + " does not match kernel channels " +
                     std::to_string(kernel.channels()));
  }
  if (dilation < 1 || lookahead < 0) throw InvalidArgumentError("depthwise: bad dilation/lookahead");
  const ConvOptions opts{dilation, lookahead, 1};
  const int64_t steps = input.dim(0);
  Tensor out({input.dim(0), kernel.channels()});
  std::vector<const float*> taps(static_cast<size_t>(kernel.width()));
  for (int64_t t = 0; t < steps; ++t) {
    for (int k = 0; k < kernel.width(); ++k) {
      const int64_t p = ConvTapIndex(kernel.width(), opts, t, k);
      taps[k] = (p >= 0 && p < steps) ? input.row(static_cast<int>(p)).data() : nullptr;
    }
    DepthwiseRow(kernel, bias, taps, out.row(static_cast<int>(t)));
  }
  return out;
}

RowHistory::RowHistory(int width, int capacity)
    : width_(width), capacity_(capacity),
      ring_(static_cast<size_t>(width) * capacity, 0.0f) {
  if (width <= 0 || capacity <= 0) throw InvalidArgumentError("row history needs positive size");
}

void RowHistory::Push(std::span<const float> row) {
  CheckVec(row.size(), width_, "history row");
  std::copy(row.begin(), row.end(),
            ring_.begin() + static_cast<std::ptrdiff_t>((count_ % capacity_) * width_));
  ++count_;
}

const float* RowHistory::Get(int64_t index) const {
  if (index < 0 || index >= count_) return nullptr;
  if (index < count_ - capacity_) throw Error("row history: row evicted");
  return ring_.data() + (index % capacity_) * width_;
}

void RowHistory::Restore(int64_t count, std::vector<float> ring) {
  if (ring.size() != ring_.size() || count < 0) throw FormatError("row history snapshot mismatch");
  count_ = count;
  ring_ = std::move(ring);
}

// ---------------------------------------------------------------------------

float Sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

void GruWeights::Validate() const {
  const int d = Rows(u_r);
  const int in = Cols(w_r);
  for (const Matrix* m : {&w_r, &w_z, &w_n}) {
    if (Rows(*m) != d || Cols(*m) != in) throw ShapeError("GRU input matrices disagree in shape");
  }
  for (const Matrix* m : {&u_r, &u_z, &u_n}) {
    if (Rows(*m) != d || Cols(*m) != d) throw ShapeError("GRU recurrent matrices must be DxD");
  }
  for (const auto* b : {&b_r, &b_z, &b_n}) CheckVec(b->size(), d, "GRU bias");
}

void GruStep(const GruWeights& w, std::span<const float> input, std::span<float> state) {
  CheckVec(input.size(), w.input_size(), "GRU input");
  const size_t d = static_cast<size_t>(w.state_size());
  std::vector<float> wx(3 * d);
  std::span<float> all(wx);
  MatVec(w.w_r, input, all.subspan(0, d));
  MatVec(w.w_z, input, all.subspan(d, d));
  MatVec(w.w_n, input, all.subspan(2 * d, d));
  GruStepFromProjections(w, all.subspan(0, d), all.subspan(d, d), all.subspan(2 * d, d), state);
}

void GruStepFromProjections(const GruWeights& w, std::span<const float> wx_r,
                            std::span<const float> wx_z, std::span<const float> wx_n,
                            std::span<float> state) {
  const int d = w.state_size();
  CheckVec(state.size(), d, "GRU state");
  CheckVec(wx_r.size(), d, "GRU r projection");
  CheckVec(wx_z.size(), d, "GRU z projection");
  CheckVec(wx_n.size(), d, "GRU n projection");
  thread_local std::vector<float> uh;
  uh.resize(3 * static_cast<size_t>(d));
  std::span<float> u(uh);
  MatVec(w.u_r, state, u.subspan(0, d));
  MatVec(w.u_z, state, u.subspan(d, d));
  MatVec(w.u_n, state, u.subspan(2 * static_cast<size_t>(d), d));
  for (int i = 0; i < d; ++i) {
    const float r = Sigmoid(wx_r[i] + u[i] + w.b_r[i]);
    const float z = Sigmoid(wx_z[i] + u[d + i] + w.b_z[i]);
    const float n = std::tanh(wx_n[i] + r * (u[2 * d + i] + w.b_n[i]));
    state[i] = (1.0f - z) * state[i] + z * n;
  }
}

}  // namespace nvcodec
