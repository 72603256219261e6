// Copyright (c) 2026 The Phonodec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phonodec/training_utils.h"

#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "phonodec/errors.h"

namespace phonodec {
namespace {

TEST(AdamWTest, DecayOnlyPath) {
  std::vector<double> theta{1.0}, grad{0.0};
  AdamWState state;
  AdamWOptions opts;
  opts.lr = 0.1;
  opts.weight_decay = 0.01;
  AdamWStep(theta, grad, state, opts);
  EXPECT_NEAR(theta[0], 0.999, 1e-15);
}

TEST(AdamWTest, FirstStepIsSignOfGradient) {
  std::vector<double> theta{0.0}, grad{1.0};
  AdamWState state;
  AdamWOptions opts;
  opts.lr = 0.1;
  opts.weight_decay = 0.0;
  AdamWStep(theta, grad, state, opts);
  EXPECT_NEAR(theta[0], -0.1, 1e-8);
  EXPECT_EQ(state.step, 1);
}

TEST(AdamWTest, TwoStepTraceMatchesReference) {
  // Reference values from a 40-digit evaluation of the same update.
  std::vector<double> theta{0.5};
  AdamWState state;
  AdamWOptions opts;
  opts.lr = 0.01;
  std::vector<double> g1{0.2}, g2{-0.1};
  AdamWStep(theta, g1, state, opts);
  EXPECT_NEAR(theta[0], 0.489950000499999975, 1e-12);
  AdamWStep(theta, g2, state, opts);
  EXPECT_NEAR(theta[0], 0.48722992853386216912, 1e-12);
  EXPECT_NEAR(state.m[0], 0.008, 1e-15);
  EXPECT_NEAR(state.v[0], 0.000984, 1e-15);
}

TEST(AdamWTest, ZeroGradZeroDecayIsIdentity) {
  std::vector<double> theta{0.3, -2.0}, grad{0.0, 0.0};
  AdamWState state;
  AdamWOptions opts;
  opts.weight_decay = 0.0;
  for (int i = 0; i < 5; ++i) AdamWStep(theta, grad, state, opts);
  EXPECT_EQ(theta, (std::vector<double>{0.3, -2.0}));
}

TEST(CosineLrTest, Endpoints) {
  SchedulerConfig cfg;
  cfg.total_epochs = 100;
  EXPECT_EQ(CosineLr(0, cfg), 0.0);
  EXPECT_EQ(CosineLr(cfg.warmup_epochs, cfg), cfg.eta_max);
  EXPECT_EQ(CosineLr(cfg.total_epochs, cfg), cfg.eta_min);
  cfg.eta_min = 1e-5;
  EXPECT_EQ(CosineLr(cfg.total_epochs, cfg), 1e-5);
}

TEST(CosineLrTest, WarmupIsLinearAndDecayMonotone) {
  SchedulerConfig cfg;
  EXPECT_NEAR(CosineLr(5, cfg), cfg.eta_max / 2, 1e-18);
  double prev = CosineLr(cfg.warmup_epochs, cfg);
  for (double t = cfg.warmup_epochs + 0.5; t <= cfg.total_epochs; t += 0.5) {
    const double lr = CosineLr(t, cfg);
    EXPECT_LE(lr, prev);
    prev = lr;
  }
  EXPECT_NEAR(CosineLr(cfg.warmup_epochs - 1e-9, cfg), cfg.eta_max, 1e-12);
}

TEST(LabelSmoothTest, Values) {
  const std::vector<double> p = LabelSmooth(3, 42, 0.1);
  ASSERT_EQ(p.size(), 42u);
  EXPECT_DOUBLE_EQ(p[3], 0.9);
  EXPECT_DOUBLE_EQ(p[0], 0.1 / 41);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  const std::vector<double> hard = LabelSmooth(1, 4, 0.0);
  EXPECT_EQ(hard, (std::vector<double>{0, 1, 0, 0}));
  EXPECT_THROW(LabelSmooth(4, 4, 0.1), ParameterError);
  EXPECT_THROW(LabelSmooth(0, 4, 1.0), ParameterError);
}

TEST(ClipGradNormTest, Examples) {
  std::vector<std::vector<double>> g{{3.0, 4.0}};
  EXPECT_DOUBLE_EQ(ClipGradNorm(g, 1.0), 5.0);
  EXPECT_NEAR(g[0][0], 0.6, 1e-15);
  EXPECT_NEAR(g[0][1], 0.8, 1e-15);
  // Idempotent.
  EXPECT_NEAR(ClipGradNorm(g, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(g[0][0], 0.6, 1e-12);

  std::vector<std::vector<double>> small{{0.1}, {0.2}};
  ClipGradNorm(small, 1.0);
  EXPECT_EQ(small[1][0], 0.2);
}

TEST(ClipGradNormTest, PostClipNormIsMin) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<std::vector<double>> g{{n(gen), n(gen)}, {n(gen)}};
    const double before = ClipGradNorm(g, 1.0);
    const double after = std::sqrt(g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0]);
    EXPECT_NEAR(after, std::min(before, 1.0), 1e-9);
  }
}

FeatureMatrix Ones(std::size_t frames, std::size_t channels) {
  return FeatureMatrix{Matrix(frames, channels, 1.0), 50.0};
}

TEST(SpecAugmentTest, ZeroWidthIsIdentity) {
  AugmentPolicy p;
  p.max_time_width = 0;
  p.max_channel_width = 0;
  const FeatureMatrix in = Ones(150, 32);
  EXPECT_EQ(SpecAugment(in, p).features.values, in.values);
}

TEST(SpecAugmentTest, SeededAndConfinedToMasks) {
  const FeatureMatrix in = Ones(400, 64);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AugmentPolicy p;
    p.seed = seed;
    const AugmentResult a = SpecAugment(in, p);
    const AugmentResult b = SpecAugment(in, p);
    EXPECT_EQ(a.features.values, b.features.values);
    ASSERT_EQ(a.time_masks.size(), 3u);
    ASSERT_EQ(a.channel_masks.size(), 2u);
    std::vector<bool> frame_masked(400, false), channel_masked(64, false);
    for (const MaskSpan& m : a.time_masks) {
      EXPECT_LE(m.width, 100u);
      EXPECT_LE(m.start + m.width, 400u);
      for (std::size_t t = m.start; t < m.start + m.width; ++t) frame_masked[t] = true;
    }
    for (const MaskSpan& m : a.channel_masks) {
      EXPECT_LE(m.width, 25u);
      EXPECT_LE(m.start + m.width, 64u);
      for (std::size_t c = m.start; c < m.start + m.width; ++c) channel_masked[c] = true;
    }
    for (std::size_t t = 0; t < 400; ++t) {
      for (std::size_t c = 0; c < 64; ++c) {
        const bool masked = frame_masked[t] || channel_masked[c];
        EXPECT_EQ(a.features.values(t, c), masked ? 0.0 : 1.0);
      }
    }
  }
}

TEST(SpecAugmentTest, WidthLargerThanDimensionThrows) {
  AugmentPolicy p;
  EXPECT_THROW(SpecAugment(Ones(50, 64), p), ParameterError);
}

}  // namespace
}  // namespace phonodec
