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

#ifndef PHONODEC_METRICS_H_
#define PHONODEC_METRICS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phonodec/vocab.h"

namespace phonodec {

enum class EditOp { kMatch, kSub, kDel, kIns };

struct AlignedPair {
  EditOp op;
  TokenId ref = -1;  // -1 for insertions
  TokenId hyp = -1;  // -1 for deletions
};

struct Alignment {
  std::vector<AlignedPair> ops;
  std::size_t matches = 0;
  std::size_t subs = 0;
  std::size_t dels = 0;
  std::size_t ins = 0;
  std::size_t ref_len = 0;

  std::size_t cost() const { return subs + dels + ins; }
};

// Minimum-edit alignment with unit costs. Among optimal alignments the
// traceback prefers match, then substitution, deletion, insertion.
Alignment Align(const TokenSeq& ref, const TokenSeq& hyp);

struct ErrorRates {
  double per = 0.0;  // may exceed 1 when insertions dominate
  double sub_rate = 0.0;
  double del_rate = 0.0;
  double ins_rate = 0.0;
  double accuracy = 1.0;
  std::size_t n_ref = 0;
};

ErrorRates ComputeErrorRates(std::span<const Alignment> alignments);

// Word tokens from SIL-separated phoneme groups, e.g. "W_AH_T".
std::vector<std::string> WordsFromPhonemes(const TokenSeq& ids,
                                           const Vocabulary& vocab);
std::vector<std::string> WordsFromText(std::string_view text);

// Corpus-level word error rate with the same alignment as Align().
double WordErrorRate(const std::vector<std::vector<std::string>>& refs,
                     const std::vector<std::vector<std::string>>& hyps);
Alignment AlignWords(const std::vector<std::string>& ref,
                     const std::vector<std::string>& hyp);

// Counts over non-blank classes, rows = reference, columns = hypothesis.
// Class id c is stored at index c - 1.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int num_classes)
      : num_classes_(num_classes),
        counts_(static_cast<std::size_t>(num_classes) * num_classes, 0) {}

  int num_classes() const { return num_classes_; }
  std::int64_t at(int ref_index, int hyp_index) const {
    return counts_[static_cast<std::size_t>(ref_index) * num_classes_ +
                   hyp_index];
  }
  std::int64_t& at(int ref_index, int hyp_index) {
    return counts_[static_cast<std::size_t>(ref_index) * num_classes_ +
                   hyp_index];
  }
  std::int64_t RowSum(int ref_index) const;
  std::int64_t ColSum(int hyp_index) const;

  // Match and substitution ops only.
  void Add(const Alignment& alignment);

 private:
  int num_classes_ = 0;
  std::vector<std::int64_t> counts_;
};

ConfusionMatrix BuildConfusion(std::span<const Alignment> alignments,
                               int vocab_size);

struct ClassPrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = false;  // false when the column is empty
  bool recall_defined = false;     // false when the row is empty
};

std::vector<ClassPrecisionRecall> PrecisionRecall(const ConfusionMatrix& m);

double ExpectedWordAccuracy(double per, double mean_len);

// CSV with a header row and a leading column of symbols.
void WriteConfusionCsv(const ConfusionMatrix& m,
                       const std::vector<std::string>& symbols,
                       std::ostream& out);
ConfusionMatrix ReadConfusionCsv(std::istream& in,
                                 std::vector<std::string>* symbols);

void WritePerClassCsv(const ConfusionMatrix& m,
                      const std::vector<std::string>& symbols,
                      std::ostream& out);

}  // namespace phonodec

#endif  // PHONODEC_METRICS_H_
