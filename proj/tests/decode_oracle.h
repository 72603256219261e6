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

#ifndef PHONODEC_TESTS_DECODE_ORACLE_H_
#define PHONODEC_TESTS_DECODE_ORACLE_H_

#include <cmath>
#include <random>
#include <vector>

#include "phonodec/ngram_lm.h"
#include "phonodec/wfst_decoder.h"
#include "test_util.h"

namespace phonodec::testing {

// Trigram KN model over phonemes 1..vocab-1 from seeded random utterances.
inline NGramModel ToyLm(int vocab, std::uint64_t seed, int utterances = 200) {
  std::mt19937_64 gen(seed);
  std::vector<TokenSeq> corpus(static_cast<std::size_t>(utterances));
  for (TokenSeq& s : corpus) {
    const int len = 1 + static_cast<int>(gen() % 6);
    TokenId prev = 1;
    for (int i = 0; i < len; ++i) {
      // Favor stepping to the next id so the model is far from uniform.
      prev = gen() % 4 != 0 ? 1 + prev % (vocab - 1)
                            : 1 + static_cast<int>(gen() % (vocab - 1));
      s.push_back(prev);
    }
  }
  return TrainKneserNey(CountNGrams(corpus, vocab, {3, true}));
}

// Scores every collapsed sequence of length <= T over 1..V-1 directly and
// returns the best under RanksBefore.
inline ScoredSequence ExhaustiveBest(const LogProbMatrix& logp,
                                     const ContextGraph& graph,
                                     const BeamConfig& cfg) {
  ScoredSequence best;
  best.score = -INFINITY;
  bool have = false;
  for (std::size_t len = 0; len <= logp.num_frames(); ++len) {
    for (TokenSeq seq : AllPaths(len, logp.vocab_size() - 1)) {
      for (TokenId& id : seq) ++id;
      ScoredSequence cand;
      cand.score = ScoreSequence(graph, logp, seq, cfg);
      cand.ids = std::move(seq);
      if (std::isinf(cand.score)) continue;
      if (!have || RanksBefore(cand, best)) {
        best = std::move(cand);
        have = true;
      }
    }
  }
  return best;
}

}  // namespace phonodec::testing

#endif  // PHONODEC_TESTS_DECODE_ORACLE_H_
