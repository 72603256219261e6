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

#ifndef PHONODEC_NGRAM_LM_H_
#define PHONODEC_NGRAM_LM_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "phonodec/vocab.h"

namespace phonodec {

// Token layout shared by the counter, the model and the ARPA codec, for a
// CTC vocabulary of size V: phonemes 1..V-1, end-of-sentence V, and the
// start-of-sentence context symbol V+1. Id 0 (blank) never appears. The
// predictable set is {1..V-1, </s>}, V symbols in total.
inline TokenId EosId(int vocab_size) { return vocab_size; }
inline TokenId BosId(int vocab_size) { return vocab_size + 1; }

inline constexpr int kMaxNGramOrder = 6;

using NGramKey = std::uint64_t;

// Packs up to kMaxNGramOrder ids (each < 1023) into one key.
NGramKey PackNGram(std::span<const TokenId> ngram);
TokenSeq UnpackNGram(NGramKey key, int order);

struct CountOptions {
  int order = kMaxNGramOrder;
  bool sentence_boundaries = true;
};

// Raw and Kneser-Ney adjusted counts for orders 1..order. Adjusted counts
// are raw counts at the highest order and for n-grams starting with <s>;
// otherwise they are continuation counts N1+(. g).
struct CorpusStats {
  int order = 0;
  int vocab_size = 0;
  bool sentence_boundaries = true;
  std::int64_t token_total = 0;  // predicted tokens, end symbols included
  std::vector<std::unordered_map<NGramKey, std::int64_t>> counts;
  std::vector<std::unordered_map<NGramKey, std::int64_t>> adjusted;
  // count_of_counts[k-1][j] = number of k-grams with adjusted count j, j=1..4
  std::vector<std::array<std::int64_t, 5>> count_of_counts;

  std::int64_t Count(std::span<const TokenId> ngram) const;
  std::int64_t AdjustedCount(std::span<const TokenId> ngram) const;
};

CorpusStats CountNGrams(const std::vector<TokenSeq>& corpus, int vocab_size,
                        const CountOptions& opts = {});

enum class DiscountMode { kFixed, kModified };

struct KneserNeyOptions {
  DiscountMode mode = DiscountMode::kModified;
  double fixed_discount = 0.75;
  // Interpolate the unigram level with a uniform 1/V distribution so every
  // predictable token has support. When off the unigram level is the plain
  // continuation-count distribution.
  bool uniform_base = true;
};

// Discounts for counts 1, 2 and 3+ at one order.
using Discounts = std::array<double, 3>;

Discounts ModifiedKneserNeyDiscounts(const std::array<std::int64_t, 5>& coc,
                                     double fallback);

// Backoff n-gram model. Probabilities are stored as natural logs in
// interpolated form: every stored n-gram carries its full interpolated
// probability, and contexts carry the weight applied when backing off.
class NGramModel {
 public:
  struct Entry {
    double log_prob = 0.0;
    double log_backoff = 0.0;
    bool has_backoff = false;
  };

  NGramModel() = default;
  // An empty model answers log(1/V) for every query.
  NGramModel(int vocab_size, int max_order, bool sentence_boundaries = true);

  int vocab_size() const { return vocab_size_; }
  int max_order() const { return max_order_; }
  bool sentence_boundaries() const { return sentence_boundaries_; }
  TokenId eos_id() const { return EosId(vocab_size_); }
  TokenId bos_id() const { return BosId(vocab_size_); }
  bool empty() const;

  // Natural-log P(token | context) with recursive backoff. Only the last
  // max_order-1 context tokens are used.
  double LogProb(TokenId token, std::span<const TokenId> context) const;

  const Entry* Find(std::span<const TokenId> ngram) const;
  Entry& Upsert(std::span<const TokenId> ngram);
  std::size_t NumNGrams(int order) const;
  const std::unordered_map<NGramKey, Entry>& Table(int order) const {
    return tables_[order - 1];
  }

  // Names for ids 0..V+1 used by the ARPA codec.
  const std::vector<std::string>& symbols() const { return symbols_; }
  void SetSymbols(const Vocabulary& vocab);
  // Names for ids 1..V-1.
  void SetSymbolNames(const std::vector<std::string>& names);

 private:
  int vocab_size_ = 0;
  int max_order_ = 0;
  bool sentence_boundaries_ = true;
  std::vector<std::unordered_map<NGramKey, Entry>> tables_;
  std::vector<std::string> symbols_;
};

NGramModel TrainKneserNey(const CorpusStats& stats,
                          const KneserNeyOptions& opts = {});

// exp of the mean negative log-probability per predicted token. Sentences
// start from the <s> context and end with </s> when the model was trained
// with sentence boundaries.
double Perplexity(const NGramModel& model, const std::vector<TokenSeq>& corpus);

void WriteArpa(const NGramModel& model, std::ostream& out);
void WriteArpa(const NGramModel& model, const std::string& path);
// With `vocab` symbols are resolved through it; otherwise ids are assigned
// in order of first appearance in the unigram section.
NGramModel ReadArpa(std::istream& in, const Vocabulary* vocab = nullptr);
NGramModel ReadArpa(const std::string& path, const Vocabulary* vocab = nullptr);

// (1 - beta) * am + beta * lm
inline double RescoreInterpolate(double am_logp, double lm_logp,
                                 double beta = 0.8) {
  return (1.0 - beta) * am_logp + beta * lm_logp;
}

// One utterance per line, whitespace-separated symbols.
std::vector<TokenSeq> ReadCorpus(const std::string& path,
                                 const Vocabulary& vocab);
std::vector<TokenSeq> ParseCorpus(std::istream& in, const Vocabulary& vocab);

}  // namespace phonodec

#endif  // PHONODEC_NGRAM_LM_H_
