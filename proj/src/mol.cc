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

#include "nvcodec/mol.h"

#include <algorithm>
#include <limits>

#include "nvcodec/errors.h"

namespace nvcodec {
namespace {

void CheckParams(const MolParams& p) {
  if (p.logits.empty() || p.means.size() != p.logits.size() ||
      p.log_scales.size() != p.logits.size()) {
    throw ShapeError("mixture parameters must have K logits, means and log scales");
  }
}

double Softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

MolParams MolParamsFromHead(std::span<const float> head, int band, int components) {
  const size_t k = static_cast<size_t>(components);
  const size_t base = static_cast<size_t>(band) * 3 * k;
  if (components <= 0 || base + 3 * k > head.size()) throw ShapeError("MoL head too short for band");
  MolParams p;
  p.logits.assign(head.begin() + base, head.begin() + base + k);
  p.means.assign(head.begin() + base + k, head.begin() + base + 2 * k);
  p.log_scales.assign(head.begin() + base + 2 * k, head.begin() + base + 3 * k);
  return p;
}

int MolSelectComponent(const MolParams& params, double u1) {
  CheckParams(params);
  const int k = params.components();
  const double top = *std::max_element(params.logits.begin(), params.logits.end());
  double total = 0.0;
  std::vector<double> w(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    w[j] = std::exp(static_cast<double>(params.logits[j]) - top);
    total += w[j];
  }
  double cum = 0.0;
  for (int j = 0; j < k; ++j) {
    cum += w[j] / total;
    if (u1 < cum) return j;
  }
  return k - 1;
}

float MolSample(const MolParams& params, double u1, double u2, double log_scale_min) {
  const int j = MolSelectComponent(params, u1);
  const double scale = std::exp(std::max(static_cast<double>(params.log_scales[j]), log_scale_min));
  const double x = params.means[j] + scale * (std::log(u2) - std::log1p(-u2));
  return static_cast<float>(std::clamp(x, -1.0, 1.0));
}

double MolLogLikelihood(const MolParams& params, double x, double log_scale_min) {
  CheckParams(params);
  const int k = params.components();
  const double top = *std::max_element(params.logits.begin(), params.logits.end());
  double norm = 0.0;
  for (int j = 0; j < k; ++j) norm += std::exp(params.logits[j] - top);
  const double log_norm = top + std::log(norm);

  std::vector<double> terms(static_cast<size_t>(k));
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    const double log_s = std::max(static_cast<double>(params.log_scales[j]), log_scale_min);
    const double z = (x - params.means[j]) * std::exp(-log_s);
    // log pdf = -z - log s - 2 softplus(-z)
    terms[j] = params.logits[j] - log_norm - z - log_s - 2.0 * Softplus(-z);
    best = std::max(best, terms[j]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return best + std::log(acc);
}

}  // namespace nvcodec
