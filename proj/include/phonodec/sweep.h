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

#ifndef PHONODEC_SWEEP_H_
#define PHONODEC_SWEEP_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phonodec/ctc.h"
#include "phonodec/wfst_decoder.h"

namespace phonodec {

enum class SweepMode { kGrid, kRandom };

// Search space over decoder settings. Omitted lists in the JSON form take
// the defaults below.
struct SweepSpec {
  std::vector<int> beam_values = {32, 64, 128, 256};
  std::vector<double> lm_weights = {0.5, 0.75, 1.0, 1.25, 1.5};
  std::vector<double> length_alphas = {0.7, 0.8, 0.9, 1.0, 1.1, 1.2};
  SweepMode mode = SweepMode::kGrid;
  int n_random = 0;
  std::uint64_t seed = 0;

  void Validate() const;
};

SweepSpec ParseSweepSpec(const std::string& json_text);
SweepSpec LoadSweepSpec(const std::string& path);

struct SweepPoint {
  int beam = 0;
  double lm_weight = 0.0;
  double length_alpha = 0.0;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

// Grid: beams outermost, then lm weights, then alphas. Random: n_random
// distinct points drawn from the value lists with a seeded generator.
std::vector<SweepPoint> EnumerateSweep(const SweepSpec& spec);

struct EvalSet {
  std::vector<LogProbMatrix> logits;
  std::vector<TokenSeq> references;
};

struct SweepRow {
  SweepPoint point;
  double per = 0.0;
  double accuracy = 0.0;
  double mean_latency_ms = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepOptions {
  int jobs = 1;
  // Report zero latency so repeated runs produce identical output.
  bool deterministic = false;
};

// Decodes every trial at every point with the wfst stage and scores it.
// Rows come back sorted by SweepRowBefore; failed points sort last.
std::vector<SweepRow> RunSweep(const SweepSpec& spec, const EvalSet& eval,
                               const ContextGraph& graph,
                               const SweepOptions& options = {});

// Accuracy descending, then beam, lm weight and alpha ascending.
bool SweepRowBefore(const SweepRow& a, const SweepRow& b);

std::vector<SweepRow> TopK(const std::vector<SweepRow>& rows, int k);

// Header beam,lm_weight,length_alpha,per,accuracy,mean_latency_ms. Failed
// rows carry "nan" in the three result columns.
void WriteSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace phonodec

#endif  // PHONODEC_SWEEP_H_
