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

#ifndef NVCODEC_MOL_H_
#define NVCODEC_MOL_H_

#include <cmath>
#include <span>
#include <vector>

namespace nvcodec {

// Log-scale floor, log(1e-4).
inline const double kDefaultLogScaleMin = std::log(1e-4);

// Mixture of K logistic distributions for one band.
struct MolParams {
  std::vector<float> logits;
  std::vector<float> means;
  std::vector<float> log_scales;

  int components() const { return static_cast<int>(logits.size()); }
};

// Slices band `band` out of a head vector laid out as
// [band][logits K | means K | log_scales K].
MolParams MolParamsFromHead(std::span<const float> head, int band, int components);

// Component chosen by inverse CDF over softmax(logits): the first j with
// u1 < sum_{i<=j} p_i (the last component if rounding leaves u1 uncovered).
int MolSelectComponent(const MolParams& params, double u1);

// Draws mean_j + exp(log_scale_j) * (ln u2 - ln(1 - u2)) for the component
// picked by u1, with log scales floored at `log_scale_min` and the result
// clamped to [-1, 1]. u1, u2 must lie in (0, 1).
float MolSample(const MolParams& params, double u1, double u2,
                double log_scale_min = kDefaultLogScaleMin);

// log sum_j softmax(logits)_j * logistic_pdf(x; mean_j, exp(log_scale_j)).
double MolLogLikelihood(const MolParams& params, double x,
                        double log_scale_min = kDefaultLogScaleMin);

}  // namespace nvcodec

#endif  // NVCODEC_MOL_H_
