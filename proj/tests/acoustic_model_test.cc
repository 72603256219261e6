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

#include "phonodec/acoustic_model.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "phonodec/errors.h"
#include "test_util.h"

namespace phonodec {
namespace {

ModelConfig TinyConfig() {
  ModelConfig cfg;
  cfg.input_dim = 8;
  cfg.d_model = 16;
  cfg.num_layers = 2;
  cfg.num_heads = 2;
  cfg.head_dim = 8;
  cfg.prenet_gru_hidden = 8;
  cfg.groupnorm_groups = 4;
  return cfg;
}

Matrix RandomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = 2.0 * testing::Uniform01(gen) - 1.0;
  return m;
}

double MaxAbsDiff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  }
  return d;
}

TEST(ModelConfigTest, Validate) {
  EXPECT_NO_THROW(ModelConfig{}.Validate());
  ModelConfig cfg = TinyConfig();
  cfg.groupnorm_groups = 5;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = TinyConfig();
  cfg.conv_kernel = 14;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = TinyConfig();
  cfg.head_dim = 7;
  EXPECT_THROW(cfg.Validate(), ParameterError);
}

TEST(ParamsTest, CountsMatchShapeSum) {
  // Shape sums tallied independently for both configurations.
  EXPECT_EQ(ParamCount(TinyConfig()), 17738);
  EXPECT_EQ(ParamSpecs(TinyConfig()).size(), 83u);
  EXPECT_EQ(ParamCount(ModelConfig{}), 46205610);
  EXPECT_EQ(ParamSpecs(ModelConfig{}).size(), 323u);
  const ModelParams p = InitParams(TinyConfig(), 1);
  EXPECT_EQ(static_cast<std::int64_t>(p.TotalSize()), ParamCount(TinyConfig()));
  EXPECT_NO_THROW(CheckParams(p, TinyConfig()));
}

TEST(ParamsTest, InitIsSeededAndBounded) {
  const ModelConfig cfg = TinyConfig();
  const ModelParams a = InitParams(cfg, 42), b = InitParams(cfg, 42),
                    c = InitParams(cfg, 43);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  for (const ParamSpec& spec : ParamSpecs(cfg)) {
    const Tensor& t = a.at(spec.name);
    EXPECT_EQ(t.shape, spec.shape) << spec.name;
    for (double v : t.data) {
      switch (spec.kind) {
        case ParamKind::kGain: EXPECT_EQ(v, 1.0); break;
        case ParamKind::kBias: EXPECT_EQ(v, 0.0); break;
        case ParamKind::kWeight:
          EXPECT_LE(std::abs(v), 1.0 / std::sqrt(spec.fan_in)) << spec.name;
          break;
      }
    }
  }
}

TEST(ParamsTest, CheckParamsRejectsMismatch) {
  const ModelConfig cfg = TinyConfig();
  ModelParams p = InitParams(cfg, 1);
  p.at("final_norm.gamma") = Tensor({3}, 1.0);
  EXPECT_THROW(CheckParams(p, cfg), DataError);
  ModelParams extra = InitParams(cfg, 1);
  extra.Add("bogus", Tensor({1}));
  EXPECT_THROW(CheckParams(extra, cfg), DataError);
}

TEST(RmsNormTest, Example) {
  const std::vector<double> gamma{1.0, 1.0};
  const Matrix y = RmsNorm(Matrix(1, 2, std::vector<double>{3.0, 4.0}), gamma);
  EXPECT_NEAR(y(0, 0), 0.848528137423857, 1e-9);
  EXPECT_NEAR(y(0, 1), 1.131370849898476, 1e-9);
  const Matrix z = RmsNorm(Matrix(1, 2, 0.0), gamma);
  EXPECT_EQ(z(0, 0), 0.0);
}

TEST(ShapeTest, SubsampledLength) {
  EXPECT_EQ(SubsampledLength(150), 19);
  EXPECT_EQ(SubsampledLength(152), 19);
  EXPECT_EQ(SubsampledLength(8), 1);
  EXPECT_EQ(SubsampledLength(1), 1);
}

TEST(GruTest, OneUnitHandTrace) {
  ModelParams p;
  auto scalar = [&p](const std::string& name, double v) {
    p.Add("g." + name, Tensor({1, 1}, v));
  };
  scalar("W_z", 0.5);
  scalar("U_z", 0.3);
  scalar("W_r", -0.2);
  scalar("U_r", 0.4);
  scalar("W_h", 0.8);
  scalar("U_h", -0.6);
  p.Add("g.b_z", Tensor({1}, 0.1));
  p.Add("g.b_r", Tensor({1}, 0.0));
  p.Add("g.b_h", Tensor({1}, 0.05));
  const Matrix x(2, 1, std::vector<double>{1.0, -1.0});

  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  // t = 0 from h = 0: the reset gate has nothing to act on.
  const double z0 = sig(0.5 + 0.1);
  const double h0 = z0 * std::tanh(0.8 + 0.05);
  // t = 1.
  const double z1 = sig(-0.5 + 0.1 + 0.3 * h0);
  const double r1 = sig(0.2 + 0.4 * h0);
  const double h1 = (1 - z1) * h0 + z1 * std::tanh(-0.8 + 0.05 - 0.6 * r1 * h0);

  const Matrix fwd = GruForward(p, "g.", x, false);
  EXPECT_NEAR(fwd(0, 0), h0, 1e-15);
  EXPECT_NEAR(fwd(1, 0), h1, 1e-15);

  const Matrix bwd = GruForward(p, "g.", x, true);
  const double b1 = sig(-0.5 + 0.1) * std::tanh(-0.8 + 0.05);
  EXPECT_NEAR(bwd(1, 0), b1, 1e-15);
}

TEST(BlockTest, ZeroWeightBlockIsIdentity) {
  const ModelConfig cfg = TinyConfig();
  const ModelParams p = ZeroParams(cfg);
  const Matrix x = RandomMatrix(12, cfg.d_model, 3);
  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    EXPECT_LT(MaxAbsDiff(ConformerBlockForward(p, cfg, layer, x), x), 1e-12);
  }
}

TEST(BlockTest, AttentionRowsAreDistributions) {
  const ModelConfig cfg = TinyConfig();
  const ModelParams p = InitParams(cfg, 5);
  const std::vector<Matrix> heads =
      AttentionWeights(p, cfg, 1, RandomMatrix(9, cfg.d_model, 4));
  ASSERT_EQ(heads.size(), 2u);
  for (const Matrix& a : heads) {
    ASSERT_EQ(a.rows(), 9u);
    ASSERT_EQ(a.cols(), 9u);
    for (std::size_t i = 0; i < 9; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 9; ++j) {
        EXPECT_GE(a(i, j), 0.0);
        sum += a(i, j);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(PositionsTest, SinusoidLayout) {
  const Matrix pe = SinusoidalPositions(4, 6);
  EXPECT_EQ(pe(0, 0), 0.0);
  EXPECT_EQ(pe(0, 1), 1.0);
  EXPECT_NEAR(pe(3, 0), std::sin(3.0), 1e-15);
  EXPECT_NEAR(pe(2, 3), std::cos(2.0 / std::pow(10000.0, 2.0 / 6)), 1e-15);
}

TEST(ForwardTest, ShapesAndLogSoftmax) {
  const ModelConfig cfg = TinyConfig();
  const ModelParams p = InitParams(cfg, 7);
  const Matrix x = RandomMatrix(150, cfg.input_dim, 8);
  EXPECT_EQ(PrenetForward(p, cfg, x).rows(), 150u);
  EXPECT_EQ(PrenetForward(p, cfg, x).cols(), static_cast<std::size_t>(cfg.d_model));
  EXPECT_EQ(SubsampleForward(p, cfg, PrenetForward(p, cfg, x)).rows(), 19u);
  const LogProbMatrix lp = SequenceForward(p, cfg, x);
  ASSERT_EQ(lp.num_frames(), 19u);
  ASSERT_EQ(lp.vocab_size(), 42);
  for (std::size_t t = 0; t < lp.num_frames(); ++t) {
    double sum = 0.0;
    for (int k = 0; k < 42; ++k) sum += std::exp(lp(t, k));
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(ForwardTest, BatchItemsUseTheirOwnLengths) {
  const ModelConfig cfg = TinyConfig();
  const ModelParams p = InitParams(cfg, 7);
  const Matrix a = RandomMatrix(40, cfg.input_dim, 1);
  const Matrix b = RandomMatrix(40, cfg.input_dim, 2);
  Tensor batch({2, 40, cfg.input_dim});
  std::copy(a.data().begin(), a.data().end(), batch.data.begin());
  std::copy(b.data().begin(), b.data().end(), batch.data.begin() + 40 * cfg.input_dim);
  const std::vector<int> lengths{40, 24};
  const ModelOutput out1 = ModelForward(p, cfg, batch, lengths, 1);
  const ModelOutput out2 = ModelForward(p, cfg, batch, lengths, 2);
  EXPECT_EQ(out1.lengths, (std::vector<int>{5, 3}));
  EXPECT_EQ(out1.log_probs[0].frames.data(), out2.log_probs[0].frames.data());
  EXPECT_EQ(out1.log_probs[1].frames.data(), out2.log_probs[1].frames.data());
  Matrix b_short(24, static_cast<std::size_t>(cfg.input_dim));
  std::copy(b.data().begin(), b.data().begin() + 24 * cfg.input_dim, b_short.data().begin());
  EXPECT_EQ(out1.log_probs[1].frames.data(), SequenceForward(p, cfg, b_short).frames.data());
  EXPECT_THROW(ModelForward(p, cfg, batch, std::vector<int>{40, 41}), DataError);
}

TEST(ForwardTest, NonFiniteActivationIsNumericError) {
  const ModelConfig cfg = TinyConfig();
  ModelParams p = InitParams(cfg, 7);
  p.at("prenet.conv1.weight")[0] = NAN;
  EXPECT_THROW(SequenceForward(p, cfg, RandomMatrix(16, cfg.input_dim, 1)), NumericError);
}

}  // namespace
}  // namespace phonodec
