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

#include "phonodec/signal_pipeline.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "phonodec/errors.h"

namespace phonodec {
namespace {

// Steady-state gain of the filter for a unit sinusoid, from simulation:
// run for `settle_s` seconds, then project the last whole periods onto sin
// and cos.
double SimulatedGain(const FilterSOS& f, double hz, double settle_s,
                     int measure_periods) {
  const double fs = f.sample_rate_hz;
  const std::size_t period = static_cast<std::size_t>(std::llround(fs / hz));
  const std::size_t measure = period * static_cast<std::size_t>(measure_periods);
  const std::size_t total = static_cast<std::size_t>(settle_s * fs) + measure;
  std::vector<double> x(total);
  const double w = 2.0 * std::numbers::pi * hz / fs;
  for (std::size_t n = 0; n < total; ++n) x[n] = std::sin(w * n);
  const std::vector<double> y = FilterSignal(f, x);
  double s = 0.0, c = 0.0;
  for (std::size_t n = total - measure; n < total; ++n) {
    s += y[n] * std::sin(w * n);
    c += y[n] * std::cos(w * n);
  }
  return 2.0 * std::hypot(s, c) / static_cast<double>(measure);
}

TEST(BandpassTest, DesignIsStableSos) {
  const FilterSOS f = DesignBandpass(4, 0.3, 300.0, 30000.0);
  EXPECT_EQ(f.sections.size(), 4u);
  for (const Biquad& s : f.sections) EXPECT_DOUBLE_EQ(s[3], 1.0);
  EXPECT_LT(f.MaxPoleRadius(), 1.0);
}

TEST(BandpassTest, AnalyticResponseAtEdgesAndMidband) {
  const FilterSOS f = DesignBandpass(4, 0.3, 300.0, 30000.0);
  EXPECT_NEAR(std::abs(f.Response(0.3)), 1.0 / std::sqrt(2.0), 0.01);
  EXPECT_NEAR(std::abs(f.Response(300.0)), 1.0 / std::sqrt(2.0), 0.01);
  EXPECT_NEAR(std::abs(f.Response(30.0)), 1.0, 0.03);
  EXPECT_LT(std::abs(f.Response(0.0)), 1e-4);
}

TEST(BandpassTest, SimulatedGainsMatchResponse) {
  const FilterSOS f = DesignBandpass(4, 0.3, 300.0, 30000.0);
  for (double hz : {30.0, 300.0}) {
    const double g = SimulatedGain(f, hz, 2.0, 20);
    EXPECT_NEAR(g, std::abs(f.Response(hz)), 2e-3) << hz;
  }
  const double low = SimulatedGain(f, 0.3, 40.0, 2);
  EXPECT_GE(low, 0.65);
  EXPECT_LE(low, 0.75);
}

TEST(BandpassTest, RejectsInvalidBands) {
  EXPECT_THROW(DesignBandpass(4, 300.0, 0.3, 30000.0), ParameterError);
  EXPECT_THROW(DesignBandpass(4, 0.0, 300.0, 30000.0), ParameterError);
  EXPECT_THROW(DesignBandpass(4, 0.3, 20000.0, 30000.0), ParameterError);
  EXPECT_THROW(DesignBandpass(0, 0.3, 300.0, 30000.0), ParameterError);
}

TEST(ApplyFilterTest, ZeroAndShape) {
  const FilterSOS f = DesignBandpass(4, 0.3, 300.0, 30000.0);
  RawRecording rec{Matrix(4, 3000, 0.0), 30000.0};
  const RawRecording out = ApplyFilter(f, rec);
  EXPECT_EQ(out.samples.rows(), 4u);
  EXPECT_EQ(out.samples.cols(), 3000u);
  for (double v : out.samples.data()) EXPECT_EQ(v, 0.0);
}

TEST(ApplyFilterTest, RejectsDc) {
  const FilterSOS f = DesignBandpass(4, 0.3, 300.0, 30000.0);
  const std::vector<double> y = FilterSignal(f, std::vector<double>(30000 * 12, 1.0));
  double tail = 0.0;
  const std::size_t start = y.size() * 3 / 4;
  for (std::size_t i = start; i < y.size(); ++i) tail += std::abs(y[i]);
  EXPECT_LT(tail / static_cast<double>(y.size() - start), 1e-2);
}

TEST(ApplyFilterTest, Linear) {
  const FilterSOS f = DesignBandpass(4, 0.3, 300.0, 30000.0);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 1.0);
  const std::size_t len = 30000 * 5;
  std::vector<double> a(len), b(len), mix(len);
  for (std::size_t i = 0; i < len; ++i) {
    a[i] = n(gen);
    b[i] = n(gen);
    mix[i] = 2.0 * a[i] - 0.5 * b[i];
  }
  const auto ya = FilterSignal(f, a), yb = FilterSignal(f, b), ym = FilterSignal(f, mix);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double expect = 2.0 * ya[i] - 0.5 * yb[i];
    worst = std::max(worst, std::abs(ym[i] - expect));
    scale = std::max(scale, std::abs(expect));
  }
  EXPECT_LT(worst / scale, 1e-9);
}

TEST(CarTest, Examples) {
  const Matrix out = CommonAverageReference(Matrix(2, 1, std::vector<double>{1, 3}));
  EXPECT_DOUBLE_EQ(out(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(out(1, 0), 1.0);
  const Matrix same = CommonAverageReference(Matrix(3, 5, 7.0));
  for (double v : same.data()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(CommonAverageReference(Matrix(1, 5)), ParameterError);
}

TEST(CarTest, ColumnMeansVanish) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(3.0, 10.0);
  Matrix x(512, 100);
  for (double& v : x.data()) v = n(gen);
  const Matrix y = CommonAverageReference(x);
  for (std::size_t t = 0; t < y.cols(); ++t) {
    double m = 0.0;
    for (std::size_t c = 0; c < y.rows(); ++c) m += y(c, t);
    EXPECT_LT(std::abs(m / 512.0), 1e-9);
  }
}

TEST(BinAverageTest, ShapeAndConstant) {
  const FeatureMatrix f = BinAverage(Matrix(4, 1250, 2.5), 600, 30000.0);
  EXPECT_EQ(f.frames(), 2u);
  EXPECT_EQ(f.channel_count(), 4u);
  EXPECT_DOUBLE_EQ(f.frame_rate_hz, 50.0);
  for (double v : f.values.data()) EXPECT_EQ(v, 2.5);
  EXPECT_THROW(BinAverage(Matrix(2, 599), 600, 30000.0), DataError);
}

TEST(BinAverageTest, MeanOfEachWindow) {
  Matrix x(2, 6);
  for (std::size_t t = 0; t < 6; ++t) {
    x(0, t) = static_cast<double>(t);
    x(1, t) = -static_cast<double>(t);
  }
  const FeatureMatrix f = BinAverage(x, 3, 3.0);
  EXPECT_DOUBLE_EQ(f.values(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(f.values(1, 0), 4.0);
  EXPECT_DOUBLE_EQ(f.values(1, 1), -4.0);
}

TEST(SessionStatsTest, Examples) {
  FeatureMatrix a{Matrix(2, 2, std::vector<double>{1, 0, 3, 0}), 50.0};
  const SessionStats s = ComputeSessionStats({a});
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.mean[1], 0.0);
  EXPECT_DOUBLE_EQ(s.std[0], 1.0);
  EXPECT_DOUBLE_EQ(s.std[1], 0.0);
  const SessionStats twice = ComputeSessionStats({a, a});
  EXPECT_EQ(twice.mean, s.mean);
  EXPECT_EQ(twice.std, s.std);
}

TEST(SessionStatsTest, ZScoreNormalizesSession) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> n(5.0, 3.0);
  std::vector<FeatureMatrix> session;
  for (int i = 0; i < 3; ++i) {
    FeatureMatrix f{Matrix(40, 6), 50.0};
    for (double& v : f.values.data()) v = n(gen);
    session.push_back(f);
  }
  const SessionStats stats = ComputeSessionStats(session);
  std::vector<FeatureMatrix> normed;
  for (const FeatureMatrix& f : session) normed.push_back(ZScore(f, stats));
  const SessionStats after = ComputeSessionStats(normed);
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_LT(std::abs(after.mean[c]), 1e-6);
    EXPECT_NEAR(after.std[c], 1.0, 1e-3);
  }
  // Inverse transform recovers the input.
  for (std::size_t t = 0; t < 40; ++t) {
    const double back = normed[0].values(t, 2) * stats.std[2] + stats.mean[2];
    EXPECT_NEAR(back, session[0].values(t, 2), 1e-6 * std::abs(session[0].values(t, 2)));
  }
}

TEST(SessionStatsTest, ConstantChannelMapsToZero) {
  FeatureMatrix f{Matrix(3, 2, std::vector<double>{4, 1, 4, 2, 4, 3}), 50.0};
  const FeatureMatrix z = ZScore(f, ComputeSessionStats({f}));
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(z.values(t, 0), 0.0);
}

TEST(PreprocessTest, ShapeChainAndZeroInput) {
  RawRecording rec{Matrix(8, 3000, 0.0), 30000.0};
  const FeatureMatrix f = Preprocess(rec, std::nullopt, PipelineConfig{});
  EXPECT_EQ(f.frames(), 5u);
  EXPECT_EQ(f.channel_count(), 8u);
  for (double v : f.values.data()) EXPECT_EQ(v, 0.0);
}

TEST(PreprocessTest, EqualsManualComposition) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(0.0, 1.0);
  RawRecording rec{Matrix(6, 6000), 30000.0};
  for (double& v : rec.samples.data()) v = n(gen);
  const PipelineConfig cfg;
  const FilterSOS f = DesignBandpass(cfg.filter_order, cfg.low_hz, cfg.high_hz, 30000.0);
  const FeatureMatrix binned =
      BinAverage(CommonAverageReference(ApplyFilter(f, rec).samples), 600, 30000.0);
  const FeatureMatrix manual = ZScore(binned, ComputeSessionStats({binned}), cfg.zscore_eps);
  const FeatureMatrix piped = Preprocess(rec, std::nullopt, cfg);
  EXPECT_EQ(piped.values, manual.values);
}

}  // namespace
}  // namespace phonodec
