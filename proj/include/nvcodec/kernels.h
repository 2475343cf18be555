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

#ifndef NVCODEC_KERNELS_H_
#define NVCODEC_KERNELS_H_

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "nvcodec/tensor.h"

namespace nvcodec {

// Fixed-order dot product (eight interleaved partial sums). Every kernel in
// the engine reduces through this so that batch and streaming paths agree
// bit for bit.
float Dot(const float* a, const float* b, int n);

// ---------------------------------------------------------------------------
// Matrices

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols);
  DenseMatrix(int rows, int cols, std::vector<float> data);
  // Accepts rank-2 tensors and rank-3 tensors of width 1 (pointwise convs).
  static DenseMatrix FromTensor(const Tensor& t);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  float& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  float at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const float* row(int r) const { return data_.data() + static_cast<size_t>(r) * cols_; }
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<float> data_;
};

// Matrix stored as surviving 4x4 blocks. Block ids are row-major over the
// block grid: id = block_row * (cols / 4) + block_col.
class BlockSparseMatrix {
 public:
  static constexpr int kBlockSize = 4;

  BlockSparseMatrix() = default;
  // Keeps the listed blocks of `dense`; everything else is treated as zero.
  static BlockSparseMatrix FromDense(const DenseMatrix& dense, std::vector<uint32_t> block_ids);
  // Builds from packed block payload (16 floats per listed block).
  static BlockSparseMatrix FromBlocks(int rows, int cols, std::vector<uint32_t> block_ids,
                                      std::vector<float> blocks);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int total_blocks() const { return (rows_ / kBlockSize) * (cols_ / kBlockSize); }
  int stored_blocks() const { return static_cast<int>(block_ids_.size()); }
  const std::vector<uint32_t>& block_ids() const { return block_ids_; }
  const std::vector<float>& blocks() const { return blocks_; }
  // 1 - stored_blocks * 16 / (rows * cols).
  double sparsity() const;
  DenseMatrix ToDense() const;
  void Multiply(std::span<const float> x, std::span<float> y) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<uint32_t> block_ids_;  // sorted ascending
  std::vector<float> blocks_;        // 16 floats per block, row-major
  std::vector<int> row_start_;       // CSR offsets into block_ids_ per block row
};

// Square matrix with dense blocks on the diagonal and zeros elsewhere.
class BlockDiagonalMatrix {
 public:
  BlockDiagonalMatrix() = default;
  // Takes the diagonal blocks of `dense`; requires n_blocks | dim.
  static BlockDiagonalMatrix FromDense(const DenseMatrix& dense, int n_blocks);
  static BlockDiagonalMatrix FromBlocks(int dim, int n_blocks, std::vector<float> blocks);

  int rows() const { return dim_; }
  int cols() const { return dim_; }
  int n_blocks() const { return n_blocks_; }
  int block_dim() const { return n_blocks_ ? dim_ / n_blocks_ : 0; }
  const std::vector<float>& blocks() const { return blocks_; }
  double sparsity() const { return 1.0 - 1.0 / n_blocks_; }
  DenseMatrix ToDense() const;
  void Multiply(std::span<const float> x, std::span<float> y) const;

 private:
  int dim_ = 0;
  int n_blocks_ = 0;
  std::vector<float> blocks_;
};

using Matrix = std::variant<DenseMatrix, BlockSparseMatrix, BlockDiagonalMatrix>;

int Rows(const Matrix& m);
int Cols(const Matrix& m);
double Sparsity(const Matrix& m);
DenseMatrix Densify(const Matrix& m);

// y = m * x. Throws ShapeError on dimension mismatch.
void MatVec(const Matrix& m, std::span<const float> x, std::span<float> y);
std::vector<float> MatVec(const Matrix& m, std::span<const float> x);

// One-shot block magnitude pruning: keeps the ceil((1 - target) * n_blocks)
// 4x4 blocks with the largest Frobenius norm, ties going to the lower block id.
BlockSparseMatrix MagnitudePrune(const DenseMatrix& dense, double target_sparsity);

// ---------------------------------------------------------------------------
// 1-D convolutions over (time, channels) sequences

// Weights (out, in, width) repacked as [out][tap][in].
class ConvKernel {
 public:
  ConvKernel() = default;
  explicit ConvKernel(const Tensor& weights);

  int out_channels() const { return out_; }
  int in_channels() const { return in_; }
  int width() const { return width_; }
  const float* tap(int o, int k) const {
    return packed_.data() + (static_cast<size_t>(o) * width_ + k) * in_;
  }

 private:
  int out_ = 0;
  int in_ = 0;
  int width_ = 0;
  std::vector<float> packed_;
};

// out[o] = bias[o] + sum_k <w[o, :, k], taps[k]>. A null tap is a zero row.
// Empty bias means zero bias.
void ConvRow(const ConvKernel& kernel, std::span<const float> bias,
             std::span<const float* const> taps, std::span<float> out);

struct ConvOptions {
  int dilation = 1;
  // Number of future input steps output t may read; 0 is strictly causal.
  int lookahead = 0;
  int stride = 1;
};

// Input index read by tap k when computing output t:
//   t * stride + (stride - 1) + lookahead - (width - 1 - k) * dilation.
int64_t ConvTapIndex(int width, const ConvOptions& opts, int64_t t, int k);

// Output length ceil(T / stride); out-of-range inputs are zero.
Tensor Conv1d(const Tensor& input, const ConvKernel& kernel, std::span<const float> bias,
              const ConvOptions& opts = {});
Tensor Conv1d(const Tensor& input, const Tensor& kernel, std::span<const float> bias = {},
              const ConvOptions& opts = {});

// Source row of tap k for transposed-conv output n (zero-stuffed index n - k
// divided by stride), or -1 when the tap lands on a stuffed zero.
int64_t TransposeTapIndex(int64_t n, int k, int stride);

// Transposed convolution: tap k of input row j contributes to output row
// j * stride + k. Output length stride * T (later contributions are dropped).
Tensor TransposeConv1d(const Tensor& input, const ConvKernel& kernel,
                       std::span<const float> bias, int stride = 2);
Tensor TransposeConv1d(const Tensor& input, const Tensor& kernel,
                       std::span<const float> bias = {}, int stride = 2);

// Per-channel kernels, shape (C, 1, width) or (C, width).
class DepthwiseKernel {
 public:
  DepthwiseKernel() = default;
  explicit DepthwiseKernel(const Tensor& weights);

  int channels() const { return channels_; }
  int width() const { return width_; }
  float at(int c, int k) const { return data_[static_cast<size_t>(c) * width_ + k]; }

 private:
  int channels_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

void DepthwiseRow(const DepthwiseKernel& kernel, std::span<const float> bias,
                  std::span<const float* const> taps, std::span<float> out);
Tensor DepthwiseConv1d(const Tensor& input, const DepthwiseKernel& kernel,
                       std::span<const float> bias, int dilation = 1, int lookahead = 0);

// Bounded history of fixed-width rows addressed by absolute index, used by
// the streaming graphs. Indices past the newest row read as zero (nullptr).
class RowHistory {
 public:
  RowHistory() = default;
  RowHistory(int width, int capacity);

  void Push(std::span<const float> row);
  // nullptr for index < 0 or index >= count(). Throws for evicted rows.
  const float* Get(int64_t index) const;
  int64_t count() const { return count_; }
  int width() const { return width_; }
  int capacity() const { return capacity_; }

  // Raw state access for snapshots.
  const std::vector<float>& ring() const { return ring_; }
  void Restore(int64_t count, std::vector<float> ring);

 private:
  int width_ = 0;
  int capacity_ = 0;
  int64_t count_ = 0;
  std::vector<float> ring_;
};

// ---------------------------------------------------------------------------
// GRU

float Sigmoid(float x);

// Gate matrices map input (W*) or state (U*) to the D-dimensional state.
struct GruWeights {
  Matrix w_r, w_z, w_n;
  Matrix u_r, u_z, u_n;
  std::vector<float> b_r, b_z, b_n;

  int state_size() const { return Rows(u_r); }
  int input_size() const { return Cols(w_r); }
  void Validate() const;
};

// In-place GRU update of `state`:
//   r  = sigmoid(W_r x + U_r h + b_r)
//   z  = sigmoid(W_z x + U_z h + b_z)
//   n  = tanh(W_n x + r * (U_n h + b_n))
//   h' = (1 - z) * h + z * n
void GruStep(const GruWeights& w, std::span<const float> input, std::span<float> state);

// Same update given precomputed input projections W_r x, W_z x, W_n x.
void GruStepFromProjections(const GruWeights& w, std::span<const float> wx_r,
                            std::span<const float> wx_z, std::span<const float> wx_n,
                            std::span<float> state);

}  // namespace nvcodec

#endif  // NVCODEC_KERNELS_H_
