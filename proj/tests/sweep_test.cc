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

#include "phonodec/sweep.h"

#include <set>
#include <sstream>
#include <tuple>

#include "decode_oracle.h"
#include "gtest/gtest.h"
#include "phonodec/errors.h"
#include "test_util.h"

namespace phonodec {
namespace {

EvalSet SmallEvalSet(int vocab, std::uint64_t seed, int trials) {
  std::mt19937_64 gen(seed);
  EvalSet eval;
  for (int i = 0; i < trials; ++i) {
    TokenSeq path;
    for (int t = 0; t < 8; ++t) path.push_back(static_cast<int>(gen() % vocab));
    eval.logits.push_back(testing::SoftOneHot(path, vocab, 0.5));
    TokenSeq ref = Collapse(path);
    if (ref.empty()) ref.push_back(1);
    eval.references.push_back(ref);
  }
  return eval;
}

TEST(SweepSpecTest, DefaultGridCardinality) {
  const std::vector<SweepPoint> points = EnumerateSweep(SweepSpec{});
  EXPECT_EQ(points.size(), 4u * 5u * 6u);
  EXPECT_EQ(points.front(), (SweepPoint{32, 0.5, 0.7}));
  EXPECT_EQ(points[1], (SweepPoint{32, 0.5, 0.8}));
  EXPECT_EQ(points.back(), (SweepPoint{256, 1.5, 1.2}));
}

TEST(SweepSpecTest, ParseAndValidate) {
  const SweepSpec s = ParseSweepSpec(
      "{\"beam_values\":[4,8],\"lm_weights\":[0,1],\"length_alphas\":[0.9],"
      "\"mode\":\"random\",\"n_random\":3,\"seed\":5}");
  EXPECT_EQ(s.mode, SweepMode::kRandom);
  EXPECT_EQ(s.beam_values, (std::vector<int>{4, 8}));
  EXPECT_THROW(ParseSweepSpec("{\"mode\":\"bayes\"}"), DataError);
  EXPECT_THROW(ParseSweepSpec("{\"beam_values\":\"x\"}"), DataError);
  EXPECT_THROW(ParseSweepSpec("{\"beam_values\":[0]}"), ParameterError);
  EXPECT_THROW(ParseSweepSpec("{\"beam_values\":[4,4],\"lm_weights\":[1],"
                              "\"length_alphas\":[1],\"mode\":\"random\",\"n_random\":2}"),
               ParameterError);
}

TEST(SweepSpecTest, RandomModeIsSeededAndDistinct) {
  SweepSpec s;
  s.mode = SweepMode::kRandom;
  s.n_random = 40;
  s.seed = 11;
  const auto a = EnumerateSweep(s);
  EXPECT_EQ(a, EnumerateSweep(s));
  ASSERT_EQ(a.size(), 40u);
  std::set<std::tuple<int, double, double>> seen;
  for (const SweepPoint& p : a) seen.emplace(p.beam, p.lm_weight, p.length_alpha);
  EXPECT_EQ(seen.size(), 40u);
  s.seed = 12;
  EXPECT_NE(a, EnumerateSweep(s));
}

TEST(RunSweepTest, DeterministicCsvAndOrdering) {
  const int vocab = 5;
  const NGramModel lm = testing::ToyLm(vocab, 3);
  const ContextGraph graph(lm);
  const EvalSet eval = SmallEvalSet(vocab, 4, 6);
  SweepSpec spec;
  spec.beam_values = {1, 4};
  spec.lm_weights = {0.0, 1.0};
  spec.length_alphas = {0.9};
  SweepOptions opts;
  opts.deterministic = true;
  const auto rows = RunSweep(spec, eval, graph, opts);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_FALSE(SweepRowBefore(rows[i], rows[i - 1]));
  }
  for (const SweepRow& r : rows) {
    EXPECT_FALSE(r.failed);
    EXPECT_NEAR(r.accuracy, 1.0 - r.per, 1e-15);
    EXPECT_EQ(r.mean_latency_ms, 0.0);
  }
  std::stringstream a, b;
  WriteSweepCsv(rows, a);
  opts.jobs = 3;
  WriteSweepCsv(RunSweep(spec, eval, graph, opts), b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "beam,lm_weight,length_alpha,per,accuracy,mean_latency_ms");

  const auto top = TopK(rows, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].point, rows[0].point);
  EXPECT_EQ(TopK(rows, 10).size(), 4u);
  EXPECT_THROW(TopK(rows, 0), ParameterError);
}

TEST(RunSweepTest, MismatchedEvalSetIsDataError) {
  const NGramModel lm(5, 2);
  const ContextGraph graph(lm);
  EvalSet eval = SmallEvalSet(5, 1, 2);
  eval.references.pop_back();
  EXPECT_THROW(RunSweep(SweepSpec{}, eval, graph), DataError);
}

}  // namespace
}  // namespace phonodec
