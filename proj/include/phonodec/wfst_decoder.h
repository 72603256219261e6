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

#ifndef PHONODEC_WFST_DECODER_H_
#define PHONODEC_WFST_DECODER_H_

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "phonodec/ctc.h"
#include "phonodec/ngram_lm.h"

namespace phonodec {

// A node of the context graph: the last (up to five) emitted phonemes.
struct LmState {
  static constexpr int kMaxHistory = kMaxNGramOrder - 1;
  std::array<TokenId, kMaxHistory> tokens{};
  int size = 0;

  std::span<const TokenId> view() const { return {tokens.data(), static_cast<std::size_t>(size)}; }
  friend bool operator==(const LmState&, const LmState&) = default;
};

// The language model viewed as a weighted automaton. States are n-gram
// histories, the initial state is the empty history, every state is final
// with weight 0, and the arc for token w out of state h weighs
// log P(w | h). Nothing is precompiled; arcs are evaluated on demand.
class ContextGraph {
 public:
  explicit ContextGraph(const NGramModel& lm) : lm_(&lm) {}

  const NGramModel& lm() const { return *lm_; }
  int vocab_size() const { return lm_->vocab_size(); }

  LmState Initial() const { return {}; }
  LmState Next(const LmState& state, TokenId token) const;
  double Weight(const LmState& state, TokenId token) const {
    return lm_->LogProb(token, state.view());
  }

 private:
  const NGramModel* lm_;
};

// Sum of arc weights along `seq` from the initial state.
double PathWeight(const ContextGraph& graph, const TokenSeq& seq);

// raw / n^alpha; n == 0 leaves the score unchanged.
double LengthNormalize(double raw, std::size_t n, double alpha);

struct BeamConfig {
  int beam_width = 128;
  double lm_weight = 1.0;
  double length_alpha = 0.9;
  int nbest = 10;

  void Validate() const;
};

struct ScoredSequence {
  TokenSeq ids;
  double score = 0.0;     // length-normalized combined score
  double am_score = 0.0;  // CTC prefix log-probability
  double lm_score = 0.0;  // path weight, before lm_weight
};

// Strict weak order used everywhere hypotheses are ranked: higher score,
// then shorter sequence, then lexicographically smaller ids.
bool RanksBefore(const ScoredSequence& a, const ScoredSequence& b);

// (CTC log P(seq) + lm_weight * PathWeight(seq)) / n^alpha, or -inf when the
// sequence cannot be emitted in the available frames.
double ScoreSequence(const ContextGraph& graph, const LogProbMatrix& logp,
                     const TokenSeq& seq, const BeamConfig& cfg);

struct BeamSearchStats {
  std::size_t candidate_scorings = 0;
  std::size_t max_live_prefixes = 0;  // before pruning
  std::size_t lm_states_visited = 0;
};

// Frame-synchronous CTC prefix beam search over the context graph. Returns
// up to cfg.nbest hypotheses ordered by RanksBefore.
std::vector<ScoredSequence> BeamSearch(const LogProbMatrix& logp,
                                       const ContextGraph& graph,
                                       const BeamConfig& cfg,
                                       BeamSearchStats* stats = nullptr);

// Stage-2 rescoring of the greedy output. Each emitted token contributes
// (1-beta) * log P_AM + beta * log P_LM, where log P_AM is the best frame
// log-probability within the run of frames that emitted it.
ScoredSequence RescoreGreedy(const LogProbMatrix& logp,
                             const ContextGraph& graph, double beta);

// Re-ranks a list by (1-beta) * CTC log P(seq) + beta * PathWeight(seq).
std::vector<ScoredSequence> RescoreNBest(const LogProbMatrix& logp,
                                         const ContextGraph& graph,
                                         std::vector<ScoredSequence> nbest,
                                         double beta);

enum class DecodeStage { kGreedy, kLm, kWfst };

DecodeStage ParseDecodeStage(std::string_view name);
std::string_view DecodeStageName(DecodeStage stage);

struct DecodeOptions {
  DecodeStage stage = DecodeStage::kWfst;
  BeamConfig beam;
  double lm_beta = 0.8;
  // When > 0 the lm stage rescores this many beam hypotheses (searched
  // without LM) instead of the greedy sequence alone.
  int rescore_nbest = 0;
};

struct DecodeResult {
  TokenSeq best;
  double score = 0.0;
  std::vector<ScoredSequence> nbest;
};

// `graph` may be null only for the greedy stage.
DecodeResult DecodeLogProbs(const LogProbMatrix& logp,
                            const ContextGraph* graph,
                            const DecodeOptions& opts);

}  // namespace phonodec

#endif  // PHONODEC_WFST_DECODER_H_
