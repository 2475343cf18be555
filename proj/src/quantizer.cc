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

#include "nvcodec/quantizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "byte_io.h"
#include "nvcodec/errors.h"
#include "nvcodec/rng.h"
#include "nvcodec/weight_set.h"

namespace nvcodec {
namespace {

double SquaredDistance(const float* a, std::span<const float> b) {
  double s = 0.0;
  for (size_t i = 0; i < b.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

class BitWriter {
 public:
  void Put(uint32_t value, int bits) {
    for (int b = bits - 1; b >= 0; --b) {
      if (n_ % 8 == 0) bytes_.push_back(0);
      if ((value >> b) & 1u) bytes_.back() |= static_cast<uint8_t>(0x80u >> (n_ % 8));
      ++n_;
    }
  }
  std::vector<uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
  size_t n_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}
  uint32_t Get(int bits) {
    uint32_t v = 0;
    for (int b = 0; b < bits; ++b) {
      if (n_ / 8 >= bytes_.size()) throw FormatError("NVC1: truncated payload");
      v = (v << 1) | ((bytes_[n_ / 8] >> (7 - n_ % 8)) & 1u);
      ++n_;
    }
    return v;
  }

 private:
  std::span<const uint8_t> bytes_;
  size_t n_ = 0;
};

}  // namespace

std::vector<float> KltBasis::Forward(std::span<const float> x) const {
  if (x.size() != mean.size()) throw ShapeError("KLT input has wrong dimension");
  const int d = dim();
  std::vector<double> centered(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) centered[i] = static_cast<double>(x[i]) - mean[i];
  std::vector<float> c(static_cast<size_t>(d));
  for (int r = 0; r < d; ++r) {
    const float* row = basis.row(r);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += row[i] * centered[i];
    c[r] = static_cast<float>(s);
  }
  return c;
}

std::vector<float> KltBasis::Inverse(std::span<const float> c) const {
  if (c.size() != mean.size()) throw ShapeError("KLT coefficients have wrong dimension");
  const int d = dim();
  std::vector<double> acc(mean.begin(), mean.end());
  for (int r = 0; r < d; ++r) {
    const float* row = basis.row(r);
    for (int i = 0; i < d; ++i) acc[i] += static_cast<double>(row[i]) * c[r];
  }
  return std::vector<float>(acc.begin(), acc.end());
}

KltBasis FitKlt(const std::vector<FeatureFrame>& frames) {
  if (frames.empty()) throw InvalidArgumentError("FitKlt: no frames");
  const int d = static_cast<int>(frames.front().values.size());
  if (static_cast<int>(frames.size()) < d + 1) {
    throw InvalidArgumentError("FitKlt: need at least " + std::to_string(d + 1) + " frames, got " +
                               std::to_string(frames.size()));
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& f : frames) {
    if (static_cast<int>(f.values.size()) != d) throw ShapeError("FitKlt: inconsistent frame sizes");
    for (int i = 0; i < d; ++i) {
      if (!std::isfinite(f.values[i])) throw InvalidArgumentError("FitKlt: non-finite feature");
      mean[i] += f.values[i];
    }
  }
  mean /= static_cast<double>(frames.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd x(d);
  for (const auto& f : frames) {
    for (int i = 0; i < d; ++i) x[i] = f.values[i] - mean[i];
    cov.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(frames.size() - 1);
  cov.diagonal().array() += 1e-6 * cov.trace() / d;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("FitKlt: eigendecomposition failed");

  KltBasis klt;
  klt.mean.resize(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) klt.mean[i] = static_cast<float>(mean[i]);
  klt.basis = DenseMatrix(d, d);
  klt.eigenvalues.resize(static_cast<size_t>(d));
  // Eigen returns ascending eigenvalues.
  for (int r = 0; r < d; ++r) {
    const int src = d - 1 - r;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    for (int i = 0; i < d; ++i) klt.basis.at(r, i) = static_cast<float>(v[i]);
    klt.eigenvalues[r] = eig.eigenvalues()[src];
  }
  return klt;
}

VqLayout DefaultVqLayout() {
  VqLayout layout(10, SubVectorSpec{11, 8});
  layout.insert(layout.end(), 5, SubVectorSpec{10, 8});
  return layout;
}

std::string FormatVqLayout(const VqLayout& layout) {
  std::string s;
  for (size_t i = 0; i < layout.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(layout[i].dim) + ":" + std::to_string(layout[i].bits);
  }
  return s;
}

VqLayout ParseVqLayout(const std::string& text) {
  VqLayout layout;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    SubVectorSpec s;
    char colon = 0;
    std::istringstream is(item);
    if (!(is >> s.dim >> colon >> s.bits) || colon != ':' || s.dim <= 0 || s.bits <= 0 ||
        s.bits > 16) {
      throw FormatError("bad VQ layout entry '" + item + "'");
    }
    layout.push_back(s);
  }
  if (layout.empty()) throw FormatError("empty VQ layout");
  return layout;
}

int LayoutBits(const VqLayout& layout) {
  int b = 0;
  for (const auto& s : layout) b += s.bits;
  return b;
}

int LayoutDim(const VqLayout& layout) {
  int d = 0;
  for (const auto& s : layout) d += s.dim;
  return d;
}

void SplitVqCodebooks::Validate() const {
  if (codebooks.size() != layout.size()) throw ShapeError("codebook count does not match layout");
  for (size_t i = 0; i < layout.size(); ++i) {
    if (codebooks[i].rows() != (1 << layout[i].bits) || codebooks[i].cols() != layout[i].dim) {
      throw ShapeError("codebook " + std::to_string(i) + " does not match layout");
    }
    for (float v : codebooks[i].data()) {
      if (!std::isfinite(v)) throw InvalidArgumentError("non-finite codeword");
    }
  }
}

DenseMatrix KMeans(const DenseMatrix& points, int k, const KMeansOptions& opts) {
  const int n = points.rows();
  const int dim = points.cols();
  if (n == 0 || k <= 0) throw InvalidArgumentError("KMeans: need points and k > 0");
  CounterRng rng(opts.seed);
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.Below(static_cast<uint64_t>(i) + 1)]);
  }
  DenseMatrix centroids(k, dim);
  for (int c = 0; c < k; ++c) {
    std::copy_n(points.row(order[c % n]), dim, &centroids.at(c, 0));
  }

  std::vector<int> assign(static_cast<size_t>(n), -1);
  std::vector<double> dist(static_cast<size_t>(n));
  auto assign_all = [&]() {
    bool changed = false;
    for (int p = 0; p < n; ++p) {
      std::span<const float> v(points.row(p), static_cast<size_t>(dim));
      const int best = static_cast<int>(NearestCodeword(centroids, v));
      dist[p] = SquaredDistance(centroids.row(best), v);
      if (assign[p] != best) changed = true;
      assign[p] = best;
    }
    return changed;
  };

  for (int it = 0; it < opts.iterations; ++it) {
    if (!assign_all() && it > 0) break;
    std::vector<double> sums(static_cast<size_t>(k) * dim, 0.0);
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (int p = 0; p < n; ++p) {
      ++counts[assign[p]];
      for (int j = 0; j < dim; ++j) sums[static_cast<size_t>(assign[p]) * dim + j] += points.at(p, j);
    }
    std::vector<bool> taken(static_cast<size_t>(n), false);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (int j = 0; j < dim; ++j) {
          centroids.at(c, j) = static_cast<float>(sums[static_cast<size_t>(c) * dim + j] / counts[c]);
        }
        continue;
      }
      // Empty cluster: move it onto the worst-represented point not yet used.
      int far = -1;
      for (int p = 0; p < n; ++p) {
        if (!taken[p] && (far < 0 || dist[p] > dist[far])) far = p;
      }
      if (far < 0) continue;
      taken[far] = true;
      dist[far] = 0.0;
      std::copy_n(points.row(far), dim, &centroids.at(c, 0));
    }
  }
  return centroids;
}

SplitVqCodebooks TrainCodebooks(const std::vector<FeatureFrame>& frames, const KltBasis& klt,
                                const VqLayout& layout, const KMeansOptions& opts) {
  if (LayoutDim(layout) != klt.dim()) throw ShapeError("VQ layout does not cover the KLT dimension");
  if (frames.empty()) throw InvalidArgumentError("TrainCodebooks: no frames");
  std::vector<std::vector<float>> coeffs;
  coeffs.reserve(frames.size());
  for (const auto& f : frames) coeffs.push_back(klt.Forward(f.values));

  SplitVqCodebooks cb;
  cb.layout = layout;
  int offset = 0;
  for (size_t s = 0; s < layout.size(); ++s) {
    const int dim = layout[s].dim;
    DenseMatrix pts(static_cast<int>(frames.size()), dim);
    for (size_t p = 0; p < coeffs.size(); ++p) {
      std::copy_n(coeffs[p].data() + offset, dim, &pts.at(static_cast<int>(p), 0));
    }
    KMeansOptions o = opts;
    o.seed = opts.seed + s;
    cb.codebooks.push_back(KMeans(pts, 1 << layout[s].bits, o));
    offset += dim;
  }
  return cb;
}

uint32_t NearestCodeword(const DenseMatrix& codebook, std::span<const float> v) {
  if (codebook.cols() != static_cast<int>(v.size())) throw ShapeError("codeword dimension mismatch");
  uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < codebook.rows(); ++c) {
    const double d = SquaredDistance(codebook.row(c), v);
    if (d < best_d) {
      best_d = d;
      best = static_cast<uint32_t>(c);
    }
  }
  return best;
}

FrameCode EncodeFrame(const FeatureFrame& frame, const KltBasis& klt, const SplitVqCodebooks& cb) {
  const std::vector<float> c = klt.Forward(frame.values);
  FrameCode code;
  code.reserve(cb.layout.size());
  size_t offset = 0;
  for (size_t s = 0; s < cb.layout.size(); ++s) {
    const size_t dim = static_cast<size_t>(cb.layout[s].dim);
    code.push_back(NearestCodeword(cb.codebooks[s], std::span(c).subspan(offset, dim)));
    offset += dim;
  }
  return code;
}

FeatureFrame DecodeFrame(const FrameCode& code, const KltBasis& klt, const SplitVqCodebooks& cb) {
  if (code.size() != cb.layout.size()) {
    throw ShapeError("frame code has " + std::to_string(code.size()) + " indices, layout expects " +
                     std::to_string(cb.layout.size()) + " (" + std::to_string(LayoutBits(cb.layout)) +
                     " bits)");
  }
  std::vector<float> c;
  c.reserve(static_cast<size_t>(klt.dim()));
  for (size_t s = 0; s < code.size(); ++s) {
    if (code[s] >= (1u << cb.layout[s].bits)) throw ShapeError("codeword index out of range");
    const float* w = cb.codebooks[s].row(static_cast<int>(code[s]));
    c.insert(c.end(), w, w + cb.layout[s].dim);
  }
  return FeatureFrame{klt.Inverse(c), 0};
}

Bitstream PackBitstream(const std::vector<FrameCode>& codes, const VqLayout& layout,
                        int frame_rate_hz) {
  Bitstream bs;
  bs.frame_bits = static_cast<uint16_t>(LayoutBits(layout));
  bs.frame_rate_hz = static_cast<uint16_t>(frame_rate_hz);
  bs.num_frames = static_cast<uint32_t>(codes.size());
  BitWriter w;
  for (const auto& code : codes) {
    if (code.size() != layout.size()) throw ShapeError("frame code does not match VQ layout");
    for (size_t s = 0; s < layout.size(); ++s) {
      if (code[s] >= (1u << layout[s].bits)) throw ShapeError("codeword index out of range");
      w.Put(code[s], layout[s].bits);
    }
  }
  bs.payload = std::move(w.bytes());
  return bs;
}

std::vector<FrameCode> UnpackBitstream(const Bitstream& stream, const VqLayout& layout) {
  if (stream.frame_bits != LayoutBits(layout)) {
    throw FormatError("NVC1: stream carries " + std::to_string(stream.frame_bits) +
                      " bits/frame, layout expects " + std::to_string(LayoutBits(layout)));
  }
  BitReader r(stream.payload);
  std::vector<FrameCode> codes(stream.num_frames);
  for (auto& code : codes) {
    code.resize(layout.size());
    for (size_t s = 0; s < layout.size(); ++s) code[s] = r.Get(layout[s].bits);
  }
  return codes;
}

std::vector<uint8_t> SerializeBitstream(const Bitstream& stream) {
  if (stream.payload.size() != (stream.payload_bits() + 7) / 8) {
    throw ShapeError("bitstream payload size does not match frame count");
  }
  internal::ByteWriter w;
  w.Raw("NVC1");
  w.U8(Bitstream::kVersion);
  w.U16(stream.frame_bits);
  w.U16(stream.frame_rate_hz);
  w.U32(stream.num_frames);
  w.Raw(stream.payload);
  return std::move(w.bytes());
}

Bitstream ParseBitstream(std::span<const uint8_t> bytes) {
  internal::ByteReader r(bytes, "NVC1");
  if (bytes.size() < 4 || r.Str(4) != "NVC1") throw FormatError("NVC1: bad magic");
  const uint8_t version = r.U8();
  if (version != Bitstream::kVersion) {
    throw FormatError("NVC1: unsupported version " + std::to_string(version));
  }
  Bitstream bs;
  bs.frame_bits = r.U16();
  bs.frame_rate_hz = r.U16();
  bs.num_frames = r.U32();
  if (bs.frame_bits == 0 || bs.frame_rate_hz == 0) throw FormatError("NVC1: zero frame bits or rate");
  const size_t need = (bs.payload_bits() + 7) / 8;
  if (r.remaining() < need) {
    throw FormatError("NVC1: truncated payload (" + std::to_string(r.remaining()) + " of " +
                      std::to_string(need) + " bytes)");
  }
  if (r.remaining() > need) throw FormatError("NVC1: trailing bytes after payload");
  auto p = r.Take(need);
  bs.payload.assign(p.begin(), p.end());
  return bs;
}

void WriteBitstream(const std::string& path, const Bitstream& stream) {
  internal::WriteFileBytes(path, SerializeBitstream(stream));
}

Bitstream ReadBitstream(const std::string& path) {
  return ParseBitstream(internal::ReadFileBytes(path));
}

QuantizerModel QuantizerModel::FromWeights(const WeightSet& ws) {
  QuantizerModel q;
  const auto layout_text = ws.Meta("vq.layout");
  if (!layout_text) throw MissingTensorError("vq.layout (metadata)");
  const VqLayout layout = ParseVqLayout(*layout_text);
  const int d = LayoutDim(layout);
  q.klt.mean = ws.GetShaped("quant.klt.mean", {d}).data;
  q.klt.basis = DenseMatrix::FromTensor(ws.GetShaped("quant.klt.basis", {d, d}));
  q.codebooks.layout = layout;
  for (size_t s = 0; s < layout.size(); ++s) {
    const std::string name = "quant.vq.cb" + std::to_string(s);
    q.codebooks.codebooks.push_back(
        DenseMatrix::FromTensor(ws.GetShaped(name, {1 << layout[s].bits, layout[s].dim})));
  }
  q.codebooks.Validate();
  return q;
}

void QuantizerModel::ToWeights(WeightSet& ws) const {
  const int d = klt.dim();
  ws.Put("quant.klt.mean", Tensor({d}, klt.mean));
  ws.Put("quant.klt.basis", Tensor({d, d}, klt.basis.data()));
  for (size_t s = 0; s < codebooks.codebooks.size(); ++s) {
    const DenseMatrix& c = codebooks.codebooks[s];
    ws.Put("quant.vq.cb" + std::to_string(s), Tensor({c.rows(), c.cols()}, c.data()));
  }
  ws.SetMeta("vq.layout", FormatVqLayout(codebooks.layout));
}

}  // namespace nvcodec
