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
#include <cmath>

#include "gtest/gtest.h"
#include "nvcodec/rng.h"
#include "test_util.h"

namespace nvcodec {
namespace {

MolParams Single(float mean, float log_scale) { return {{0.0f}, {mean}, {log_scale}}; }

oracle::Mixture ToOracle(const MolParams& p) {
  return {testing::ToVec(p.logits), testing::ToVec(p.means), testing::ToVec(p.log_scales)};
}

TEST(MolTest, SamplesFollowTheMixtureCdf) {
  CounterRng params_rng(1);
  for (int set = 0; set < 12; ++set) {
    const int k = 1 + static_cast<int>(params_rng.Below(8));
    MolParams p;
    for (int j = 0; j < k; ++j) {
      p.logits.push_back(static_cast<float>(params_rng.Uniform(-2, 2)));
      p.means.push_back(static_cast<float>(params_rng.Uniform(-0.5, 0.5)));
      p.log_scales.push_back(static_cast<float>(params_rng.Uniform(-6, -3)));
    }
    CounterRng rng(100 + set);
    const int n = 100000;
    std::vector<double> draws(n);
    for (double& d : draws) {
      const double u1 = rng.Uniform();
      d = MolSample(p, u1, rng.Uniform());
    }
    std::sort(draws.begin(), draws.end());
    const oracle::Mixture m = ToOracle(p);
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = oracle::MixtureCdf(m, draws[i], kDefaultLogScaleMin);
      ks = std::max({ks, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
    }
    EXPECT_LT(ks, 0.01) << "parameter set " << set;
  }
}

TEST(MolTest, DensityIntegratesToOne) {
  CounterRng rng(2);
  for (int set = 0; set < 10; ++set) {
    MolParams p;
    for (int j = 0; j < 4; ++j) {
      p.logits.push_back(static_cast<float>(rng.Uniform(-2, 2)));
      p.means.push_back(static_cast<float>(rng.Uniform(-0.5, 0.5)));
      p.log_scales.push_back(static_cast<float>(rng.Uniform(-4, -2)));
    }
    // Trapezoid rule over a range holding all but ~e^-30 of the mass.
    const double lo = -10.0, hi = 10.0, h = 1e-4;
    double integral = 0.0;
    for (double x = lo; x < hi; x += h) {
      integral += 0.5 * h * (std::exp(MolLogLikelihood(p, x)) + std::exp(MolLogLikelihood(p, x + h)));
    }
    EXPECT_NEAR(integral, 1.0, 1e-3) << set;
  }
}

TEST(MolTest, SingleLogisticPeakAndSymmetry) {
  for (float log_s : {-5.0f, -2.0f, 0.0f}) {
    const MolParams p = Single(0.25f, log_s);
    const double s = std::exp(double{log_s});
    EXPECT_NEAR(MolLogLikelihood(p, 0.25), std::log(1.0 / (4.0 * s)), 1e-5);
    for (double d : {0.01, 0.1, 0.7}) {
      EXPECT_NEAR(MolLogLikelihood(p, 0.25 + d), MolLogLikelihood(p, 0.25 - d), 1e-5);
      EXPECT_LT(MolLogLikelihood(p, 0.25 + d), MolLogLikelihood(p, 0.25));
    }
  }
}

TEST(MolTest, LikelihoodMatchesOracleDensity) {
  CounterRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    MolParams p;
    for (int j = 0; j < 3; ++j) {
      p.logits.push_back(static_cast<float>(rng.Uniform(-3, 3)));
      p.means.push_back(static_cast<float>(rng.Uniform(-1, 1)));
      p.log_scales.push_back(static_cast<float>(rng.Uniform(-12, 0)));
    }
    const double x = rng.Uniform(-1, 1);
    const double want = oracle::MixturePdf(ToOracle(p), x, kDefaultLogScaleMin);
    if (want > 1e-30) {
      EXPECT_NEAR(MolLogLikelihood(p, x), std::log(want), 1e-4);
    }
  }
}

TEST(MolTest, MedianDrawReturnsTheMean) {
  MolParams p = {{0.0f, 0.0f}, {-0.3f, 0.6f}, {-3.0f, -1.0f}};
  EXPECT_FLOAT_EQ(MolSample(p, 0.25, 0.5), -0.3f);
  EXPECT_FLOAT_EQ(MolSample(p, 0.75, 0.5), 0.6f);
}

TEST(MolTest, ComponentSelectionByInverseCdf) {
  MolParams p = {{0.0f, 0.0f, std::log(2.0f)}, {0, 0, 0}, {0, 0, 0}};  // p = 1/4, 1/4, 1/2
  EXPECT_EQ(MolSelectComponent(p, 0.1), 0);
  EXPECT_EQ(MolSelectComponent(p, 0.3), 1);
  EXPECT_EQ(MolSelectComponent(p, 0.6), 2);
  EXPECT_EQ(MolSelectComponent(p, 1.0 - 1e-16), 2);
}

TEST(MolTest, SamplesAreClampedAndScalesFloored) {
  const MolParams wide = Single(0.9f, 2.0f);
  EXPECT_EQ(MolSample(wide, 0.5, 1.0 - 1e-12), 1.0f);
  EXPECT_EQ(MolSample(wide, 0.5, 1e-12), -1.0f);
  // A log scale below the floor behaves like the floor itself.
  const MolParams tiny = Single(0.0f, -30.0f);
  const MolParams floor = Single(0.0f, static_cast<float>(kDefaultLogScaleMin));
  EXPECT_NEAR(MolLogLikelihood(tiny, 1e-4), MolLogLikelihood(floor, 1e-4), 1e-4);
  EXPECT_NEAR(MolSample(tiny, 0.5, 0.9), MolSample(floor, 0.5, 0.9), 1e-6);
}

TEST(MolTest, HeadSlicing) {
  // Two bands, K = 2: [l0 l1 m0 m1 s0 s1] per band.
  const std::vector<float> head = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  const MolParams b1 = MolParamsFromHead(head, 1, 2);
  EXPECT_EQ(b1.logits, (std::vector<float>{7, 8}));
  EXPECT_EQ(b1.means, (std::vector<float>{9, 10}));
  EXPECT_EQ(b1.log_scales, (std::vector<float>{11, 12}));
}

}  // namespace
}  // namespace nvcodec
