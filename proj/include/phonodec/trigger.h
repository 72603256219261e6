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

#ifndef PHONODEC_TRIGGER_H_
#define PHONODEC_TRIGGER_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phonodec/metrics.h"
#include "phonodec/vocab.h"

namespace phonodec {

// Relative frequency per non-blank class (class id c at index c - 1).
struct FrequencyTable {
  std::vector<double> freq;
  std::int64_t token_total = 0;
};

FrequencyTable PhonemeFrequencies(const std::vector<TokenSeq>& corpus,
                                  int vocab_size);

inline constexpr double kTriggerEps = 0.001;

double TriggerScore(double precision, double recall, double frequency,
                    double eps = kTriggerEps);

struct TriggerCandidate {
  TokenId id = 0;
  double precision = 0.0;
  double recall = 0.0;
  double frequency = 0.0;
  double score = 0.0;
};

// Sorted by score descending, ties by class id ascending.
std::vector<TriggerCandidate> RankTriggers(
    const std::vector<ClassPrecisionRecall>& pr, const FrequencyTable& freq,
    double eps = kTriggerEps);

// a + b * log2(D / W + 1)
double FittsPointingTime(double a, double b, double distance, double width);

// `symbol,freq` rows (header optional), ordered to match `symbols`.
FrequencyTable ReadFrequencyCsv(std::istream& in,
                                const std::vector<std::string>& symbols);
void WriteRankedCsv(const std::vector<TriggerCandidate>& ranked,
                    const std::vector<std::string>& symbols,
                    std::ostream& out);

}  // namespace phonodec

#endif  // PHONODEC_TRIGGER_H_
