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

#include "phonodec/ngram_lm.h"

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "phonodec/errors.h"
#include "test_util.h"

namespace phonodec {
namespace {

constexpr TokenId kA = 1, kB = 2, kC = 3;

double SumOverPredictable(const NGramModel& m,
                          std::span<const TokenId> context) {
  double sum = 0.0;
  for (TokenId w = 1; w <= m.vocab_size(); ++w) {
    sum += std::exp(m.LogProb(w, context));
  }
  return sum;
}

std::vector<TokenSeq> SyntheticCorpus(std::uint64_t seed, int n, int vocab) {
  // A sticky Markov chain so higher orders have structure to capture.
  std::mt19937_64 gen(seed);
  std::vector<TokenSeq> corpus(n);
  for (TokenSeq& s : corpus) {
    const int len = 3 + static_cast<int>(gen() % 10);
    TokenId prev = 1 + static_cast<int>(gen() % (vocab - 1));
    for (int i = 0; i < len; ++i) {
      if (gen() % 3 != 0) prev = 1 + static_cast<int>(gen() % (vocab - 1));
      s.push_back(prev);
    }
  }
  return corpus;
}

TEST(PackTest, RoundTrip) {
  const TokenSeq g{5, 1, 43, 1022, 0, 7};
  for (int k = 0; k <= 6; ++k) {
    const TokenSeq prefix(g.begin(), g.begin() + k);
    EXPECT_EQ(UnpackNGram(PackNGram(prefix), k), prefix);
  }
  EXPECT_NE(PackNGram(TokenSeq{1}), PackNGram(TokenSeq{1, 1}));
}

TEST(CountTest, RawAndContinuationCounts) {
  const std::vector<TokenSeq> corpus{{kA, kB}, {kA, kB}, {kA, kB}, {kA, kC}};
  const CorpusStats s = CountNGrams(corpus, 4, {2, false});
  EXPECT_EQ(s.Count(TokenSeq{kA, kB}), 3);
  EXPECT_EQ(s.Count(TokenSeq{kA}), 4);
  EXPECT_EQ(s.AdjustedCount(TokenSeq{kB}), 1);
  EXPECT_EQ(s.AdjustedCount(TokenSeq{kA}), 0);
  EXPECT_EQ(s.AdjustedCount(TokenSeq{kA, kB}), 3);
}

TEST(KneserNeyTest, ToyBigramByHand) {
  // P(B|A) = (3 - .75)/4 + (.75 * 2 / 4) * 1/2 = 0.75
  // P(C|A) = (1 - .75)/4 + (.75 * 2 / 4) * 1/2 = 0.25
  const std::vector<TokenSeq> corpus{{kA, kB}, {kA, kB}, {kA, kB}, {kA, kC}};
  const CorpusStats s = CountNGrams(corpus, 4, {2, false});
  KneserNeyOptions opts;
  opts.mode = DiscountMode::kFixed;
  opts.uniform_base = false;
  const NGramModel m = TrainKneserNey(s, opts);
  const TokenSeq ctx{kA};
  EXPECT_NEAR(std::exp(m.LogProb(kB, ctx)), 0.75, 1e-12);
  EXPECT_NEAR(std::exp(m.LogProb(kC, ctx)), 0.25, 1e-12);
  EXPECT_NEAR(std::exp(m.LogProb(kB, {})), 0.5, 1e-12);
}

TEST(KneserNeyTest, ModifiedDiscountsFromCountOfCounts) {
  // Y = n1 / (n1 + 2 n2) = 10 / 18
  const Discounts d = ModifiedKneserNeyDiscounts({0, 10, 4, 3, 2}, 0.75);
  const double y = 10.0 / 18.0;
  EXPECT_NEAR(d[0], 1 - 2 * y * 4 / 10, 1e-12);
  EXPECT_NEAR(d[1], 2 - 3 * y * 3 / 4, 1e-12);
  EXPECT_NEAR(d[2], 3 - 4 * y * 2 / 3, 1e-12);
  const Discounts fb = ModifiedKneserNeyDiscounts({0, 10, 0, 3, 2}, 0.75);
  EXPECT_EQ(fb, (Discounts{0.75, 0.75, 0.75}));
}

TEST(KneserNeyTest, DistributionsNormalize) {
  const int vocab = 10;
  const std::vector<TokenSeq> corpus = SyntheticCorpus(3, 1000, vocab);
  const CorpusStats s = CountNGrams(corpus, vocab, {6, true});
  const NGramModel m = TrainKneserNey(s);
  std::mt19937_64 gen(9);
  EXPECT_NEAR(SumOverPredictable(m, {}), 1.0, 1e-9);
  TokenSeq bos{m.bos_id()};
  EXPECT_NEAR(SumOverPredictable(m, bos), 1.0, 1e-9);
  for (int i = 0; i < 300; ++i) {
    TokenSeq ctx;
    const int len = static_cast<int>(gen() % 7);
    // Seen contexts from the corpus half of the time, random otherwise.
    if (i % 2 == 0) {
      const TokenSeq& u = corpus[gen() % corpus.size()];
      const int start = static_cast<int>(gen() % u.size());
      for (int k = start; k < static_cast<int>(u.size()) && k < start + len; ++k) {
        ctx.push_back(u[k]);
      }
    } else {
      for (int k = 0; k < len; ++k) ctx.push_back(1 + static_cast<int>(gen() % (vocab - 1)));
    }
    EXPECT_NEAR(SumOverPredictable(m, ctx), 1.0, 1e-9);
  }
}

TEST(KneserNeyTest, HigherOrderLowersTrainingPerplexity) {
  const int vocab = 10;
  const std::vector<TokenSeq> corpus = SyntheticCorpus(5, 500, vocab);
  const double p1 = Perplexity(TrainKneserNey(CountNGrams(corpus, vocab, {1, true})), corpus);
  const double p3 = Perplexity(TrainKneserNey(CountNGrams(corpus, vocab, {3, true})), corpus);
  EXPECT_LT(p3, p1);
  EXPECT_LE(p1, vocab + 1e-9);
}

TEST(NGramModelTest, EmptyModelIsUniform) {
  const NGramModel m(42, 6);
  EXPECT_TRUE(m.empty());
  EXPECT_NEAR(m.LogProb(5, TokenSeq{1, 2}), std::log(1.0 / 42), 1e-15);
  const std::vector<TokenSeq> corpus{{1, 2, 3}, {4}};
  EXPECT_NEAR(Perplexity(m, corpus), 42.0, 1e-9);
}

TEST(ArpaTest, RoundTripPreservesQueries) {
  const int vocab = 10;
  const std::vector<TokenSeq> corpus = SyntheticCorpus(11, 400, vocab);
  const NGramModel m = TrainKneserNey(CountNGrams(corpus, vocab, {4, true}));
  std::stringstream ss;
  WriteArpa(m, ss);
  const NGramModel back = ReadArpa(ss);
  ASSERT_EQ(back.vocab_size(), vocab);
  ASSERT_EQ(back.max_order(), 4);
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(back.NumNGrams(k), m.NumNGrams(k));
  std::mt19937_64 gen(1);
  for (int i = 0; i < 10000; ++i) {
    TokenSeq ctx;
    const int len = static_cast<int>(gen() % 4);
    if (gen() % 4 == 0) ctx.push_back(m.bos_id());
    for (int k = 0; k < len; ++k) ctx.push_back(1 + static_cast<int>(gen() % (vocab - 1)));
    const TokenId w = 1 + static_cast<int>(gen() % vocab);
    // ARPA stores log10 with limited digits.
    EXPECT_NEAR(back.LogProb(w, ctx), m.LogProb(w, ctx), 1e-6);
  }
}

TEST(ArpaTest, MalformedInputIsDataError) {
  std::stringstream bad("\\data\\\nngram 1=2\n\n\\1-grams:\n-0.3 A\n\\end\\\n");
  EXPECT_THROW(ReadArpa(bad), DataError);
}

TEST(CorpusTest, ParseAndRescore) {
  const Vocabulary v = ParseVocab("AA\nB\n");
  std::stringstream in("AA B\n\nB B AA\n");
  const std::vector<TokenSeq> c = ParseCorpus(in, v);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1], (TokenSeq{2, 2, 1}));
  EXPECT_DOUBLE_EQ(RescoreInterpolate(-10, -5), 0.2 * -10 + 0.8 * -5);
}

}  // namespace
}  // namespace phonodec
