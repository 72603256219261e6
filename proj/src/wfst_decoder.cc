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

#include "phonodec/wfst_decoder.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "phonodec/errors.h"
#include "phonodec/math_util.h"

namespace phonodec {
namespace {

struct SeqHash {
  std::size_t operator()(const TokenSeq& s) const {
    std::size_t h = 1469598103934665603ull;
    for (TokenId id : s) {
      h ^= static_cast<std::size_t>(id) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct PrefixHyp {
  TokenSeq prefix;
  double logp_blank = kLogZero;
  double logp_nonblank = kLogZero;
  double lm_score = 0.0;
  LmState lm_state;
  double score = kLogZero;

  double am() const { return LogAdd(logp_blank, logp_nonblank); }
};

bool HypRanksBefore(const PrefixHyp& a, const PrefixHyp& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.prefix.size() != b.prefix.size()) {
    return a.prefix.size() < b.prefix.size();
  }
  return a.prefix < b.prefix;
}

// Arc weights out of each visited state, computed once per search.
class ArcCache {
 public:
  explicit ArcCache(const ContextGraph& graph) : graph_(graph) {}

  const std::vector<double>& Arcs(const LmState& state) {
    const NGramKey key = PackNGram(state.view());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<double> arcs(graph_.vocab_size(), kLogZero);
    for (TokenId w = 1; w < graph_.vocab_size(); ++w) {
      arcs[w] = graph_.Weight(state, w);
    }
    return cache_.emplace(key, std::move(arcs)).first->second;
  }
  std::size_t size() const { return cache_.size(); }

 private:
  const ContextGraph& graph_;
  std::unordered_map<NGramKey, std::vector<double>> cache_;
};

}  // namespace

LmState ContextGraph::Next(const LmState& state, TokenId token) const {
  const int keep = std::clamp(lm_->max_order() - 1, 0, LmState::kMaxHistory);
  LmState next;
  if (keep == 0) return next;
  const int drop = std::max(state.size + 1 - keep, 0);
  for (int i = drop; i < state.size; ++i) next.tokens[next.size++] = state.tokens[i];
  next.tokens[next.size++] = token;
  return next;
}

double PathWeight(const ContextGraph& graph, const TokenSeq& seq) {
  double total = 0.0;
  LmState state = graph.Initial();
  for (TokenId id : seq) {
    total += graph.Weight(state, id);
    state = graph.Next(state, id);
  }
  return total;
}

double LengthNormalize(double raw, std::size_t n, double alpha) {
  if (n == 0) return raw;
  return raw / std::pow(static_cast<double>(n), alpha);
}

void BeamConfig::Validate() const {
  if (beam_width < 1) throw ParameterError("beam width must be >= 1");
  if (!(length_alpha > 0 && length_alpha <= 2)) {
    throw ParameterError("length alpha must be in (0, 2]");
  }
  if (lm_weight < 0) throw ParameterError("lm weight must be >= 0");
  if (nbest < 1) throw ParameterError("nbest must be >= 1");
}

bool RanksBefore(const ScoredSequence& a, const ScoredSequence& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
  return a.ids < b.ids;
}

double ScoreSequence(const ContextGraph& graph, const LogProbMatrix& logp,
                     const TokenSeq& seq, const BeamConfig& cfg) {
  const double am = CtcSequenceLogProb(logp, seq);
  if (am == kLogZero) return kLogZero;
  const double lm = cfg.lm_weight == 0.0 ? 0.0 : PathWeight(graph, seq);
  return LengthNormalize(am + cfg.lm_weight * lm, seq.size(), cfg.length_alpha);
}

std::vector<ScoredSequence> BeamSearch(const LogProbMatrix& logp,
                                       const ContextGraph& graph,
                                       const BeamConfig& cfg,
                                       BeamSearchStats* stats) {
  cfg.Validate();
  const int vocab = logp.vocab_size();
  if (vocab != graph.vocab_size()) {
    throw DataError("log-prob width " + std::to_string(vocab) +
                    " does not match language model vocabulary " +
                    std::to_string(graph.vocab_size()));
  }
  const bool use_lm = cfg.lm_weight != 0.0;
  ArcCache arcs(graph);
  BeamSearchStats local;

  std::vector<PrefixHyp> beam(1);
  beam[0].logp_blank = 0.0;
  beam[0].lm_state = graph.Initial();
  beam[0].score = 0.0;

  std::vector<PrefixHyp> next;
  std::unordered_map<TokenSeq, std::size_t, SeqHash> index;
  for (std::size_t t = 0; t < logp.num_frames(); ++t) {
    next.clear();
    index.clear();
    auto slot = [&](const PrefixHyp& parent, TokenId appended) -> PrefixHyp& {
      TokenSeq key = parent.prefix;
      if (appended != kBlankId) key.push_back(appended);
      auto [it, inserted] = index.emplace(key, next.size());
      if (inserted) {
        PrefixHyp h;
        h.prefix = std::move(key);
        if (appended == kBlankId) {
          h.lm_score = parent.lm_score;
          h.lm_state = parent.lm_state;
        } else {
          h.lm_state = graph.Next(parent.lm_state, appended);
          h.lm_score = parent.lm_score +
                       (use_lm ? arcs.Arcs(parent.lm_state)[appended] : 0.0);
        }
        next.push_back(std::move(h));
      }
      return next[it->second];
    };

    for (const PrefixHyp& hyp : beam) {
      const double total = hyp.am();
      const TokenId last = hyp.prefix.empty() ? kBlankId : hyp.prefix.back();

      PrefixHyp& same = slot(hyp, kBlankId);
      same.logp_blank = LogAdd(same.logp_blank, total + logp(t, kBlankId));
      ++local.candidate_scorings;

      for (TokenId c = 1; c < vocab; ++c) {
        const double emit = logp(t, c);
        ++local.candidate_scorings;
        if (c == last) {
          PrefixHyp& stay = slot(hyp, kBlankId);
          stay.logp_nonblank = LogAdd(stay.logp_nonblank, hyp.logp_nonblank + emit);
          PrefixHyp& grow = slot(hyp, c);
          grow.logp_nonblank = LogAdd(grow.logp_nonblank, hyp.logp_blank + emit);
        } else {
          PrefixHyp& grow = slot(hyp, c);
          grow.logp_nonblank = LogAdd(grow.logp_nonblank, total + emit);
        }
      }
    }

    local.max_live_prefixes = std::max(local.max_live_prefixes, next.size());
    for (PrefixHyp& h : next) {
      h.score = LengthNormalize(h.am() + cfg.lm_weight * h.lm_score,
                                h.prefix.size(), cfg.length_alpha);
    }
    const std::size_t keep =
        std::min<std::size_t>(next.size(), static_cast<std::size_t>(cfg.beam_width));
    std::partial_sort(next.begin(), next.begin() + keep, next.end(),
                      HypRanksBefore);
    next.resize(keep);
    std::swap(beam, next);
  }

  std::sort(beam.begin(), beam.end(), HypRanksBefore);
  std::vector<ScoredSequence> out;
  for (const PrefixHyp& h : beam) {
    if (static_cast<int>(out.size()) >= cfg.nbest) break;
    if (h.score == kLogZero) continue;
    out.push_back({h.prefix, h.score, h.am(), h.lm_score});
  }
  local.lm_states_visited = arcs.size();
  if (stats) *stats = local;
  return out;
}

ScoredSequence RescoreGreedy(const LogProbMatrix& logp,
                             const ContextGraph& graph, double beta) {
  const TokenSeq path = BestPath(logp);
  ScoredSequence out;
  LmState state = graph.Initial();
  TokenId prev = -1;
  double run_best = kLogZero;
  auto flush = [&](TokenId token) {
    const double lm = graph.Weight(state, token);
    out.ids.push_back(token);
    out.am_score += run_best;
    out.lm_score += lm;
    out.score += RescoreInterpolate(run_best, lm, beta);
    state = graph.Next(state, token);
  };
  for (std::size_t t = 0; t < path.size(); ++t) {
    const TokenId id = path[t];
    if (id != prev) {
      if (prev > 0) flush(prev);
      run_best = kLogZero;
    }
    run_best = std::max(run_best, logp(t, id));
    prev = id;
  }
  if (prev > 0) flush(prev);
  return out;
}

std::vector<ScoredSequence> RescoreNBest(const LogProbMatrix& logp,
                                         const ContextGraph& graph,
                                         std::vector<ScoredSequence> nbest,
                                         double beta) {
  for (ScoredSequence& s : nbest) {
    s.am_score = CtcSequenceLogProb(logp, s.ids);
    s.lm_score = PathWeight(graph, s.ids);
    s.score = RescoreInterpolate(s.am_score, s.lm_score, beta);
  }
  std::sort(nbest.begin(), nbest.end(), RanksBefore);
  return nbest;
}

DecodeStage ParseDecodeStage(std::string_view name) {
  if (name == "greedy") return DecodeStage::kGreedy;
  if (name == "lm") return DecodeStage::kLm;
  if (name == "wfst") return DecodeStage::kWfst;
  throw ParameterError("unknown decode stage " + std::string(name));
}

std::string_view DecodeStageName(DecodeStage stage) {
  switch (stage) {
    case DecodeStage::kGreedy:
      return "greedy";
    case DecodeStage::kLm:
      return "lm";
    case DecodeStage::kWfst:
      return "wfst";
  }
  return "unknown";
}

DecodeResult DecodeLogProbs(const LogProbMatrix& logp,
                            const ContextGraph* graph,
                            const DecodeOptions& opts) {
  DecodeResult result;
  if (opts.stage != DecodeStage::kGreedy && graph == nullptr) {
    throw ParameterError("lm and wfst stages need a language model");
  }
  switch (opts.stage) {
    case DecodeStage::kGreedy: {
      const TokenSeq path = BestPath(logp);
      double score = 0.0;
      for (std::size_t t = 0; t < path.size(); ++t) score += logp(t, path[t]);
      result.best = Collapse(path);
      result.score = score;
      result.nbest.push_back({result.best, score, score, 0.0});
      break;
    }
    case DecodeStage::kLm: {
      if (opts.rescore_nbest > 0) {
        BeamConfig acoustic = opts.beam;
        acoustic.lm_weight = 0.0;
        acoustic.nbest = opts.rescore_nbest;
        result.nbest = RescoreNBest(logp, *graph,
                                    BeamSearch(logp, *graph, acoustic),
                                    opts.lm_beta);
      } else {
        result.nbest.push_back(RescoreGreedy(logp, *graph, opts.lm_beta));
      }
      break;
    }
    case DecodeStage::kWfst:
      result.nbest = BeamSearch(logp, *graph, opts.beam);
      break;
  }
  if (opts.stage != DecodeStage::kGreedy) {
    if (result.nbest.empty()) throw NumericError("decoder produced no hypothesis");
    result.best = result.nbest.front().ids;
    result.score = result.nbest.front().score;
  }
  return result;
}

}  // namespace phonodec
