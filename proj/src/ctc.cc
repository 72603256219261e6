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

#include "phonodec/ctc.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "phonodec/errors.h"
#include "phonodec/math_util.h"

namespace phonodec {
namespace {

void ValidateTarget(const TokenSeq& target, int vocab_size) {
  for (TokenId id : target) {
    if (id == kBlankId) throw DataError("CTC target contains the blank id");
    if (id < 0 || id >= vocab_size) {
      throw DataError("CTC target id " + std::to_string(id) +
                      " outside vocabulary of size " +
                      std::to_string(vocab_size));
    }
  }
}

TokenSeq Extend(const TokenSeq& target) {
  TokenSeq ext(2 * target.size() + 1, kBlankId);
  for (std::size_t u = 0; u < target.size(); ++u) ext[2 * u + 1] = target[u];
  return ext;
}

bool CanSkip(const TokenSeq& ext, std::size_t s) {
  return s >= 2 && ext[s] != kBlankId && ext[s] != ext[s - 2];
}

}  // namespace

TokenSeq Collapse(std::span<const TokenId> path) {
  TokenSeq out;
  TokenId prev = -1;
  for (TokenId id : path) {
    if (id != prev && id != kBlankId) out.push_back(id);
    prev = id;
  }
  return out;
}

std::size_t CtcMinFrames(const TokenSeq& target) {
  std::size_t n = target.size();
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++n;
  }
  return n;
}

CtcLattice ComputeCtcLattice(const LogProbMatrix& logp,
                             const TokenSeq& target) {
  ValidateTarget(target, logp.vocab_size());
  const std::size_t frames = logp.num_frames();
  CtcLattice lat;
  lat.extended = Extend(target);
  const std::size_t states = lat.extended.size();
  lat.alpha = Matrix(frames, states, kLogZero);
  lat.beta = Matrix(frames, states, kLogZero);
  if (frames == 0) {
    lat.log_likelihood = target.empty() ? 0.0 : kLogZero;
    return lat;
  }
  const TokenSeq& ext = lat.extended;

  lat.alpha(0, 0) = logp(0, ext[0]);
  if (states > 1) lat.alpha(0, 1) = logp(0, ext[1]);
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = lat.alpha(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, lat.alpha(t - 1, s - 1));
      if (CanSkip(ext, s)) acc = LogAdd(acc, lat.alpha(t - 1, s - 2));
      lat.alpha(t, s) = acc == kLogZero ? kLogZero : acc + logp(t, ext[s]);
    }
  }

  const std::size_t last = frames - 1;
  lat.beta(last, states - 1) = 0.0;
  if (states > 1) lat.beta(last, states - 2) = 0.0;
  for (std::size_t t = last; t-- > 0;) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = lat.beta(t + 1, s) + logp(t + 1, ext[s]);
      if (s + 1 < states) {
        acc = LogAdd(acc, lat.beta(t + 1, s + 1) + logp(t + 1, ext[s + 1]));
      }
      if (s + 2 < states && CanSkip(ext, s + 2)) {
        acc = LogAdd(acc, lat.beta(t + 1, s + 2) + logp(t + 1, ext[s + 2]));
      }
      lat.beta(t, s) = acc;
    }
  }

  double total = lat.alpha(last, states - 1);
  if (states > 1) total = LogAdd(total, lat.alpha(last, states - 2));
  lat.log_likelihood = total;
  return lat;
}

CtcLoss ComputeCtcLoss(const LogProbMatrix& logp, const TokenSeq& target) {
  ValidateTarget(target, logp.vocab_size());
  if (CtcMinFrames(target) > logp.num_frames()) {
    return {std::numeric_limits<double>::infinity(), false};
  }
  const CtcLattice lat = ComputeCtcLattice(logp, target);
  if (lat.log_likelihood == kLogZero) {
    return {std::numeric_limits<double>::infinity(), false};
  }
  return {-lat.log_likelihood, true};
}

double CtcSequenceLogProb(const LogProbMatrix& logp, const TokenSeq& target) {
  const CtcLoss loss = ComputeCtcLoss(logp, target);
  return loss.feasible ? -loss.value : kLogZero;
}

Matrix CtcOccupancy(const LogProbMatrix& logp, const TokenSeq& target) {
  if (CtcMinFrames(target) > logp.num_frames()) {
    throw DataError("CTC target is infeasible for the number of frames");
  }
  const CtcLattice lat = ComputeCtcLattice(logp, target);
  if (lat.log_likelihood == kLogZero) {
    throw NumericError("CTC target has zero probability");
  }
  Matrix gamma(logp.num_frames(), logp.vocab_size(), 0.0);
  for (std::size_t t = 0; t < logp.num_frames(); ++t) {
    for (std::size_t s = 0; s < lat.extended.size(); ++s) {
      const double a = lat.alpha(t, s) + lat.beta(t, s);
      if (a == kLogZero) continue;
      gamma(t, lat.extended[s]) += std::exp(a - lat.log_likelihood);
    }
  }
  return gamma;
}

Matrix CtcGrad(const LogProbMatrix& logp, const TokenSeq& target) {
  Matrix grad = CtcOccupancy(logp, target);
  for (std::size_t t = 0; t < logp.num_frames(); ++t) {
    auto row = logp.frames.row(t);
    const double lse = LogSumExp(row);
    for (std::size_t k = 0; k < row.size(); ++k) {
      grad(t, k) = std::exp(row[k] - lse) - grad(t, k);
    }
  }
  return grad;
}

TokenSeq BestPath(const LogProbMatrix& logp) {
  TokenSeq path(logp.num_frames());
  for (std::size_t t = 0; t < logp.num_frames(); ++t) {
    auto row = logp.frames.row(t);
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k] > row[best]) best = k;
    }
    path[t] = static_cast<TokenId>(best);
  }
  return path;
}

TokenSeq GreedyDecode(const LogProbMatrix& logp) {
  return Collapse(BestPath(logp));
}

LatticeStats ComputeLatticeStats(std::size_t frames, std::size_t target_len) {
  return {frames * (2 * target_len + 1), frames * target_len};
}

GradCheckResult RunCtcGradCheck(std::uint64_t seed, int instances, int frames,
                                int vocab_size, double step) {
  if (instances < 1 || frames < 1 || vocab_size < 2 || !(step > 0)) {
    throw ParameterError("gradcheck needs instances, frames >= 1 and vocab >= 2");
  }
  std::mt19937_64 gen(seed);
  auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  auto loss_of = [](const Matrix& z, const TokenSeq& target) {
    LogProbMatrix lp{z};
    for (std::size_t t = 0; t < z.rows(); ++t) LogSoftmaxInPlace(lp.frames.row(t));
    return ComputeCtcLoss(lp, target).value;
  };
  GradCheckResult result;
  for (int n = 0; n < instances; ++n) {
    Matrix z(static_cast<std::size_t>(frames), static_cast<std::size_t>(vocab_size));
    for (double& v : z.data()) v = 4.0 * uniform() - 2.0;
    TokenSeq target;
    do {
      target.clear();
      const int len = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(frames));
      for (int i = 0; i < len; ++i) {
        target.push_back(1 + static_cast<int>(gen() % static_cast<std::uint64_t>(vocab_size - 1)));
      }
    } while (CtcMinFrames(target) > static_cast<std::size_t>(frames));

    LogProbMatrix lp{z};
    for (std::size_t t = 0; t < z.rows(); ++t) LogSoftmaxInPlace(lp.frames.row(t));
    const Matrix grad = CtcGrad(lp, target);
    double worst_diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < z.data().size(); ++i) {
      Matrix plus = z, minus = z;
      plus.data()[i] += step;
      minus.data()[i] -= step;
      const double numeric = (loss_of(plus, target) - loss_of(minus, target)) / (2 * step);
      const double analytic = grad.data()[i];
      const double diff = std::abs(analytic - numeric);
      const double entry_scale = std::max(std::abs(analytic), std::abs(numeric));
      worst_diff = std::max(worst_diff, diff);
      scale = std::max(scale, entry_scale);
      if (entry_scale >= 1e-8) {
        result.max_entry_rel_error =
            std::max(result.max_entry_rel_error, diff / entry_scale);
      }
    }
    result.max_abs_error = std::max(result.max_abs_error, worst_diff);
    if (scale > 0) {
      result.max_rel_error = std::max(result.max_rel_error, worst_diff / scale);
    }
    ++result.instances;
  }
  return result;
}

}  // namespace phonodec
