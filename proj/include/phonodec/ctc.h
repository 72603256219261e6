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

#ifndef PHONODEC_CTC_H_
#define PHONODEC_CTC_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "phonodec/matrix.h"
#include "phonodec/vocab.h"

namespace phonodec {

// Per-frame log-probabilities, frames x classes. Class 0 is the blank.
struct LogProbMatrix {
  Matrix frames;

  std::size_t num_frames() const { return frames.rows(); }
  int vocab_size() const { return static_cast<int>(frames.cols()); }
  double operator()(std::size_t t, int k) const {
    return frames(t, static_cast<std::size_t>(k));
  }
};

// Forward/backward variables over the blank-interleaved target. Both are in
// the log domain; alpha includes the emission at frame t, beta covers frames
// t+1.. only, so sum_s exp(alpha(t,s) + beta(t,s)) = P(target) for every t.
struct CtcLattice {
  Matrix alpha;
  Matrix beta;
  TokenSeq extended;
  double log_likelihood = 0.0;
};

struct CtcLoss {
  double value = 0.0;  // +inf when infeasible
  bool feasible = true;
};

// Merge adjacent duplicates, then drop blanks.
TokenSeq Collapse(std::span<const TokenId> path);

// Minimum number of frames able to emit `target`: its length plus one
// separating blank per adjacent repeat.
std::size_t CtcMinFrames(const TokenSeq& target);

CtcLattice ComputeCtcLattice(const LogProbMatrix& logp,
                             const TokenSeq& target);
CtcLoss ComputeCtcLoss(const LogProbMatrix& logp, const TokenSeq& target);

// log P(target | logp) summed over all alignments; -inf when infeasible.
double CtcSequenceLogProb(const LogProbMatrix& logp, const TokenSeq& target);

// Posterior occupancy gamma(t, k): expected number of alignment paths
// emitting class k at frame t. This is minus the loss gradient when every
// log-probability is treated as a free input.
Matrix CtcOccupancy(const LogProbMatrix& logp, const TokenSeq& target);

// d loss / d z for logp = log_softmax(z): softmax(logp) - gamma.
// Throws DataError when the target is infeasible.
Matrix CtcGrad(const LogProbMatrix& logp, const TokenSeq& target);

// Per-frame argmax, ties to the lowest class id.
TokenSeq BestPath(const LogProbMatrix& logp);
TokenSeq GreedyDecode(const LogProbMatrix& logp);

struct LatticeStats {
  std::size_t cells = 0;             // T * (2U + 1)
  std::size_t simplified_cells = 0;  // T * U
};
LatticeStats ComputeLatticeStats(std::size_t frames, std::size_t target_len);

struct GradCheckResult {
  // Per instance max|a - n| / max(max|a|, max|n|), maximized over instances.
  double max_rel_error = 0.0;
  // Per entry |a - n| / max(|a|, |n|) over entries with max(|a|, |n|) >=
  // 1e-8. Dominated by finite-difference roundoff on small entries.
  double max_entry_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t instances = 0;
};

// Compares CtcGrad (a) with central finite differences (n) of the loss on
// seeded random logits and targets.
GradCheckResult RunCtcGradCheck(std::uint64_t seed, int instances, int frames,
                                int vocab_size, double step = 1e-6);

}  // namespace phonodec

#endif  // PHONODEC_CTC_H_
