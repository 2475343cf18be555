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

#include "oracle/oracle.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nvcodec::oracle {

Vec MatVec(const Mat& m, const Vec& x) {
  Vec y(m.size(), 0.0);
  for (size_t r = 0; r < m.size(); ++r) {
    for (size_t c = 0; c < x.size(); ++c) y[r] += m[r][c] * x[c];
  }
  return y;
}

Mat Transpose(const Mat& m) {
  if (m.empty()) return {};
  Mat t(m[0].size(), Vec(m.size()));
  for (size_t r = 0; r < m.size(); ++r) {
    for (size_t c = 0; c < m[0].size(); ++c) t[c][r] = m[r][c];
  }
  return t;
}

Mat MatMul(const Mat& a, const Mat& b) {
  Mat out(a.size(), Vec(b[0].size(), 0.0));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t k = 0; k < b.size(); ++k) {
      for (size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

void JacobiEigen(const Mat& input, Vec& values, Mat& vectors) {
  const size_t n = input.size();
  Mat a = input;
  Mat v(n, Vec(n, 0.0));
  for (size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-22) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return a[i][i] > a[j][j]; });
  values.assign(n, 0.0);
  vectors.assign(n, Vec(n, 0.0));
  for (size_t r = 0; r < n; ++r) {
    values[r] = a[order[r]][order[r]];
    for (size_t k = 0; k < n; ++k) vectors[r][k] = v[k][order[r]];
  }
}

Mat PseudoInverse(const Mat& a) {
  const Mat at = Transpose(a);
  Mat g = MatMul(at, a);  // n x n
  const size_t n = g.size();
  // Gauss-Jordan inversion with partial pivoting.
  Mat inv(n, Vec(n, 0.0));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r) {
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    }
    if (std::abs(g[piv][col]) < 1e-300) throw std::runtime_error("singular matrix");
    std::swap(g[col], g[piv]);
    std::swap(inv[col], inv[piv]);
    const double d = g[col][col];
    for (size_t k = 0; k < n; ++k) {
      g[col][k] /= d;
      inv[col][k] /= d;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = g[r][col];
      if (f == 0.0) continue;
      for (size_t k = 0; k < n; ++k) {
        g[r][k] -= f * g[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return MatMul(inv, at);
}

Mat Conv(const Mat& x, const Kernel& w, const Vec& b, int dilation, int lookahead, int stride) {
  const int steps = static_cast<int>(x.size());
  const int out_steps = (steps + stride - 1) / stride;
  const size_t outs = w.size();
  const int width = static_cast<int>(w[0][0].size());
  Mat y(static_cast<size_t>(out_steps), Vec(outs, 0.0));
  for (int t = 0; t < out_steps; ++t) {
    for (size_t o = 0; o < outs; ++o) {
      double acc = b.empty() ? 0.0 : b[o];
      for (int k = 0; k < width; ++k) {
        const int s = t * stride + stride - 1 + lookahead - (width - 1 - k) * dilation;
        if (s < 0 || s >= steps) continue;
        for (size_t i = 0; i < w[o].size(); ++i) acc += w[o][i][k] * x[s][i];
      }
      y[t][o] = acc;
    }
  }
  return y;
}

Mat TransposeConv(const Mat& x, const Kernel& w, const Vec& b, int stride) {
  // Scatter form: tap k of input row j lands on output row j * stride + k.
  const size_t steps = x.size() * static_cast<size_t>(stride);
  Mat y(steps, Vec(w.size(), 0.0));
  for (auto& row : y) {
    for (size_t o = 0; o < w.size(); ++o) row[o] = b.empty() ? 0.0 : b[o];
  }
  for (size_t j = 0; j < x.size(); ++j) {
    for (size_t o = 0; o < w.size(); ++o) {
      for (size_t i = 0; i < w[o].size(); ++i) {
        for (size_t k = 0; k < w[o][i].size(); ++k) {
          const size_t n = j * static_cast<size_t>(stride) + k;
          if (n < steps) y[n][o] += w[o][i][k] * x[j][i];
        }
      }
    }
  }
  return y;
}

Mat Depthwise(const Mat& x, const Mat& w, const Vec& b, int dilation) {
  const int steps = static_cast<int>(x.size());
  const int width = static_cast<int>(w[0].size());
  Mat y(x.size(), Vec(w.size(), 0.0));
  for (int t = 0; t < steps; ++t) {
    for (size_t c = 0; c < w.size(); ++c) {
      double acc = b.empty() ? 0.0 : b[c];
      for (int k = 0; k < width; ++k) {
        const int s = t - (width - 1 - k) * dilation;
        if (s >= 0) acc += w[c][k] * x[s][c];
      }
      y[t][c] = acc;
    }
  }
  return y;
}

Vec GruStep(const Gru& g, const Vec& x, const Vec& h) {
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const Vec wr = MatVec(g.wr, x), wz = MatVec(g.wz, x), wn = MatVec(g.wn, x);
  const Vec ur = MatVec(g.ur, h), uz = MatVec(g.uz, h), un = MatVec(g.un, h);
  Vec out(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    const double r = sigmoid(wr[i] + ur[i] + g.br[i]);
    const double z = sigmoid(wz[i] + uz[i] + g.bz[i]);
    const double n = std::tanh(wn[i] + r * (un[i] + g.bn[i]));
    out[i] = (1.0 - z) * h[i] + z * n;
  }
  return out;
}

std::vector<uint32_t> PruneBlocks(const Mat& m, double target) {
  const size_t br = m.size() / 4, bc = m[0].size() / 4;
  std::vector<std::pair<double, uint32_t>> norms;
  for (size_t i = 0; i < br; ++i) {
    for (size_t j = 0; j < bc; ++j) {
      double s = 0.0;
      for (size_t r = 0; r < 4; ++r) {
        for (size_t c = 0; c < 4; ++c) s += m[4 * i + r][4 * j + c] * m[4 * i + r][4 * j + c];
      }
      norms.emplace_back(std::sqrt(s), static_cast<uint32_t>(i * bc + j));
    }
  }
  std::sort(norms.begin(), norms.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const size_t keep = static_cast<size_t>(std::ceil((1.0 - target) * norms.size() - 1e-9));
  std::vector<uint32_t> ids;
  for (size_t i = 0; i < std::max<size_t>(keep, 1); ++i) ids.push_back(norms[i].second);
  std::sort(ids.begin(), ids.end());
  return ids;
}

Vec MelCenters(int n_mels, double fmin, double fmax) {
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  Vec c(static_cast<size_t>(n_mels));
  for (int m = 0; m < n_mels; ++m) {
    c[m] = hz(mel(fmin) + (mel(fmax) - mel(fmin)) * (m + 1) / (n_mels + 1));
  }
  return c;
}

Vec LogMel(const std::vector<float>& window, int fft_size, int sample_rate, int n_mels,
           double fmin, double fmax, double floor) {
  const size_t w = window.size();
  const double pi = std::numbers::pi;
  const int bins = fft_size / 2 + 1;
  Vec power(static_cast<size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    double re = 0.0, im = 0.0;
    for (size_t n = 0; n < w; ++n) {
      const double v = window[n] * (0.5 - 0.5 * std::cos(2.0 * pi * n / w));
      re += v * std::cos(2.0 * pi * k * n / fft_size);
      im -= v * std::sin(2.0 * pi * k * n / fft_size);
    }
    power[k] = re * re + im * im;
  }
  const Vec centers = MelCenters(n_mels, fmin, fmax);
  Vec out(static_cast<size_t>(n_mels));
  for (int m = 0; m < n_mels; ++m) {
    const double lo = m == 0 ? fmin : centers[m - 1];
    const double hi = m + 1 == n_mels ? fmax : centers[m + 1];
    const double c = centers[m];
    double e = 0.0;
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      const double wgt = std::max(0.0, std::min((f - lo) / (c - lo), (hi - f) / (hi - c)));
      e += wgt * power[k];
    }
    out[m] = std::log(std::max(e, floor));
  }
  return out;
}

Mat Lloyd(const Mat& points, Mat centroids, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    Mat sums(centroids.size(), Vec(points[0].size(), 0.0));
    std::vector<int> counts(centroids.size(), 0);
    for (const Vec& p : points) {
      size_t best = 0;
      double best_d = INFINITY;
      for (size_t c = 0; c < centroids.size(); ++c) {
        double d = 0.0;
        for (size_t i = 0; i < p.size(); ++i) d += (p[i] - centroids[c][i]) * (p[i] - centroids[c][i]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      for (size_t i = 0; i < p.size(); ++i) sums[best][i] += p[i];
      ++counts[best];
    }
    for (size_t c = 0; c < centroids.size(); ++c) {
      if (counts[c] == 0) continue;
      for (size_t i = 0; i < sums[c].size(); ++i) centroids[c][i] = sums[c][i] / counts[c];
    }
  }
  return centroids;
}

namespace {

Vec Softmax(const Vec& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  Vec p(logits.size());
  double z = 0.0;
  for (size_t i = 0; i < p.size(); ++i) z += p[i] = std::exp(logits[i] - mx);
  for (double& v : p) v /= z;
  return p;
}

}  // namespace

double MixtureCdf(const Mixture& m, double x, double log_scale_min) {
  const Vec p = Softmax(m.logits);
  double cdf = 0.0;
  for (size_t j = 0; j < p.size(); ++j) {
    const double s = std::exp(std::max(m.log_scales[j], log_scale_min));
    cdf += p[j] / (1.0 + std::exp(-(x - m.means[j]) / s));
  }
  return cdf;
}

double MixturePdf(const Mixture& m, double x, double log_scale_min) {
  const Vec p = Softmax(m.logits);
  double pdf = 0.0;
  for (size_t j = 0; j < p.size(); ++j) {
    const double s = std::exp(std::max(m.log_scales[j], log_scale_min));
    const double z = (x - m.means[j]) / s;
    const double e = std::exp(-std::abs(z));
    pdf += p[j] * e / (s * (1.0 + e) * (1.0 + e));
  }
  return pdf;
}

std::vector<Vec> EquivalentBandFilters(const Vec& prototype, int levels) {
  Vec h1(prototype.size());
  for (size_t n = 0; n < prototype.size(); ++n) h1[n] = (n % 2 ? -1.0 : 1.0) * prototype[n];
  auto upsample = [](const Vec& h, size_t factor) {
    Vec u((h.size() - 1) * factor + 1, 0.0);
    for (size_t n = 0; n < h.size(); ++n) u[n * factor] = h[n];
    return u;
  };
  auto convolve = [](const Vec& a, const Vec& b) {
    Vec c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
      for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  };
  const int bands = 1 << levels;
  std::vector<Vec> out;
  for (int b = 0; b < bands; ++b) {
    Vec eq = {1.0};
    for (int level = 0; level < levels; ++level) {
      // The first split is the most significant bit of the band index.
      const bool high = (b >> (levels - 1 - level)) & 1;
      eq = convolve(eq, upsample(high ? h1 : prototype, size_t{1} << level));
    }
    out.push_back(eq);
  }
  return out;
}

double Energy(const std::vector<float>& x) {
  double e = 0.0;
  for (float v : x) e += static_cast<double>(v) * v;
  return e;
}

}  // namespace nvcodec::oracle
