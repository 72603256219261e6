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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "phonodec/errors.h"
#include "phonodec/math_util.h"

namespace phonodec {
namespace {

constexpr int kBitsPerToken = 10;
constexpr TokenId kMaxPackedId = (1 << kBitsPerToken) - 2;

struct ContextAgg {
  std::int64_t total = 0;
  std::array<std::int64_t, 3> by_bucket{};  // adjusted count 1, 2, 3+
};

int Bucket(std::int64_t count) {
  return static_cast<int>(std::min<std::int64_t>(count, 3)) - 1;
}

double Gamma(const ContextAgg& agg, const Discounts& d) {
  return (d[0] * agg.by_bucket[0] + d[1] * agg.by_bucket[1] +
          d[2] * agg.by_bucket[2]) /
         static_cast<double>(agg.total);
}

double SafeLog(double p) { return p > 0 ? std::log(p) : kLogZero; }

// Inserts `ngram` and all its prefixes with their current backoff-derived
// probabilities so that every context is reachable from the tables.
void EnsureEntryWithPrefixes(NGramModel& model, const TokenSeq& ngram) {
  for (std::size_t len = 1; len <= ngram.size(); ++len) {
    std::span<const TokenId> prefix(ngram.data(), len);
    if (model.Find(prefix)) continue;
    const double lp =
        model.LogProb(prefix.back(), prefix.subspan(0, len - 1));
    model.Upsert(prefix).log_prob = lp;
  }
}

}  // namespace

NGramKey PackNGram(std::span<const TokenId> ngram) {
  if (ngram.size() > static_cast<std::size_t>(kMaxNGramOrder)) {
    throw ParameterError("n-gram longer than the maximum order");
  }
  NGramKey key = 0;
  for (std::size_t i = 0; i < ngram.size(); ++i) {
    if (ngram[i] < 0 || ngram[i] > kMaxPackedId) {
      throw ParameterError("token id out of packable range");
    }
    key |= static_cast<NGramKey>(ngram[i] + 1) << (kBitsPerToken * i);
  }
  return key;
}

TokenSeq UnpackNGram(NGramKey key, int order) {
  TokenSeq out(order);
  constexpr NGramKey kMask = (NGramKey{1} << kBitsPerToken) - 1;
  for (int i = 0; i < order; ++i) {
    out[i] = static_cast<TokenId>((key >> (kBitsPerToken * i)) & kMask) - 1;
  }
  return out;
}

std::int64_t CorpusStats::Count(std::span<const TokenId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order) return 0;
  const auto& table = counts[ngram.size() - 1];
  auto it = table.find(PackNGram(ngram));
  return it == table.end() ? 0 : it->second;
}

std::int64_t CorpusStats::AdjustedCount(std::span<const TokenId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order) return 0;
  const auto& table = adjusted[ngram.size() - 1];
  auto it = table.find(PackNGram(ngram));
  return it == table.end() ? 0 : it->second;
}

CorpusStats CountNGrams(const std::vector<TokenSeq>& corpus, int vocab_size,
                        const CountOptions& opts) {
  if (opts.order < 1 || opts.order > kMaxNGramOrder) {
    throw ParameterError("n-gram order must be in [1, 6]");
  }
  if (vocab_size < 2 || BosId(vocab_size) > kMaxPackedId) {
    throw ParameterError("unsupported vocabulary size");
  }
  if (corpus.empty()) throw DataError("empty corpus");

  CorpusStats stats;
  stats.order = opts.order;
  stats.vocab_size = vocab_size;
  stats.sentence_boundaries = opts.sentence_boundaries;
  stats.counts.resize(opts.order);
  stats.adjusted.resize(opts.order);
  stats.count_of_counts.assign(opts.order, {});

  TokenSeq sentence;
  for (const TokenSeq& seq : corpus) {
    sentence.clear();
    if (opts.sentence_boundaries) sentence.push_back(BosId(vocab_size));
    for (TokenId id : seq) {
      if (id < 1 || id >= vocab_size) {
        throw DataError("corpus token id " + std::to_string(id) +
                        " outside vocabulary");
      }
      sentence.push_back(id);
    }
    if (opts.sentence_boundaries) sentence.push_back(EosId(vocab_size));
    const std::size_t first = opts.sentence_boundaries ? 1 : 0;
    for (std::size_t i = first; i < sentence.size(); ++i) {
      ++stats.token_total;
      for (int k = 1; k <= opts.order && static_cast<std::size_t>(k) <= i + 1;
           ++k) {
        std::span<const TokenId> gram(sentence.data() + i + 1 - k, k);
        ++stats.counts[k - 1][PackNGram(gram)];
      }
    }
  }

  const TokenId bos = BosId(vocab_size);
  stats.adjusted[opts.order - 1] = stats.counts[opts.order - 1];
  for (int k = opts.order - 1; k >= 1; --k) {
    auto& adj = stats.adjusted[k - 1];
    for (const auto& [key, count] : stats.counts[k - 1]) {
      if (UnpackNGram(key, k)[0] == bos) adj[key] = count;
    }
    for (const auto& [key, count] : stats.counts[k]) {
      const TokenSeq longer = UnpackNGram(key, k + 1);
      ++adj[PackNGram(std::span<const TokenId>(longer).subspan(1))];
    }
  }
  for (int k = 1; k <= opts.order; ++k) {
    for (const auto& [key, count] : stats.adjusted[k - 1]) {
      if (count >= 1 && count <= 4) ++stats.count_of_counts[k - 1][count];
    }
  }
  return stats;
}

Discounts ModifiedKneserNeyDiscounts(const std::array<std::int64_t, 5>& coc,
                                     double fallback) {
  const Discounts fixed{fallback, fallback, fallback};
  for (int j = 1; j <= 4; ++j) {
    if (coc[j] <= 0) return fixed;
  }
  const double n1 = coc[1], n2 = coc[2], n3 = coc[3], n4 = coc[4];
  const double y = n1 / (n1 + 2.0 * n2);
  const Discounts d{1.0 - 2.0 * y * n2 / n1, 2.0 - 3.0 * y * n3 / n2,
                    3.0 - 4.0 * y * n4 / n3};
  for (int j = 0; j < 3; ++j) {
    if (!(d[j] > 0.0 && d[j] <= j + 1.0)) return fixed;
  }
  return d;
}

NGramModel::NGramModel(int vocab_size, int max_order, bool sentence_boundaries)
    : vocab_size_(vocab_size),
      max_order_(max_order),
      sentence_boundaries_(sentence_boundaries),
      tables_(max_order) {
  if (vocab_size < 2 || BosId(vocab_size) > kMaxPackedId) {
    throw ParameterError("unsupported vocabulary size");
  }
  if (max_order < 1 || max_order > kMaxNGramOrder) {
    throw ParameterError("n-gram order must be in [1, 6]");
  }
  symbols_.resize(vocab_size + 2);
  symbols_[0] = "<blank>";
  for (int i = 1; i < vocab_size; ++i) symbols_[i] = "P" + std::to_string(i);
  symbols_[eos_id()] = "</s>";
  symbols_[bos_id()] = "<s>";
}

void NGramModel::SetSymbols(const Vocabulary& vocab) {
  if (vocab.size() != vocab_size_) {
    throw DataError("vocabulary size does not match language model");
  }
  for (int i = 1; i < vocab_size_; ++i) symbols_[i] = vocab.Symbol(i);
}

void NGramModel::SetSymbolNames(const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != vocab_size_ - 1) {
    throw DataError("symbol count does not match language model");
  }
  for (int i = 1; i < vocab_size_; ++i) symbols_[i] = names[i - 1];
}

bool NGramModel::empty() const {
  for (const auto& t : tables_) {
    if (!t.empty()) return false;
  }
  return true;
}

const NGramModel::Entry* NGramModel::Find(
    std::span<const TokenId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > max_order_) {
    return nullptr;
  }
  const auto& table = tables_[ngram.size() - 1];
  auto it = table.find(PackNGram(ngram));
  return it == table.end() ? nullptr : &it->second;
}

NGramModel::Entry& NGramModel::Upsert(std::span<const TokenId> ngram) {
  if (ngram.empty() || static_cast<int>(ngram.size()) > max_order_) {
    throw ParameterError("n-gram order outside model range");
  }
  return tables_[ngram.size() - 1][PackNGram(ngram)];
}

std::size_t NGramModel::NumNGrams(int order) const {
  return tables_[order - 1].size();
}

double NGramModel::LogProb(TokenId token,
                           std::span<const TokenId> context) const {
  const std::size_t n =
      std::min<std::size_t>(context.size(), max_order_ - 1);
  std::span<const TokenId> ctx = context.subspan(context.size() - n);
  std::array<TokenId, kMaxNGramOrder> buf;
  double backoff = 0.0;
  for (std::size_t k = n;; --k) {
    std::copy(ctx.end() - k, ctx.end(), buf.begin());
    buf[k] = token;
    if (const Entry* e = Find(std::span<const TokenId>(buf.data(), k + 1))) {
      return backoff + e->log_prob;
    }
    if (k == 0) break;
    if (const Entry* h = Find(std::span<const TokenId>(buf.data(), k))) {
      if (h->has_backoff) backoff += h->log_backoff;
    }
  }
  return backoff - std::log(static_cast<double>(vocab_size_));
}

NGramModel TrainKneserNey(const CorpusStats& stats,
                          const KneserNeyOptions& opts) {
  NGramModel model(stats.vocab_size, stats.order, stats.sentence_boundaries);
  const int vocab = stats.vocab_size;
  const TokenId bos = BosId(vocab);

  for (int k = 1; k <= stats.order; ++k) {
    const auto& adj = stats.adjusted[k - 1];
    const Discounts d =
        opts.mode == DiscountMode::kFixed
            ? Discounts{opts.fixed_discount, opts.fixed_discount,
                        opts.fixed_discount}
            : ModifiedKneserNeyDiscounts(stats.count_of_counts[k - 1],
                                         opts.fixed_discount);

    std::unordered_map<NGramKey, ContextAgg> contexts;
    for (const auto& [key, count] : adj) {
      if (count <= 0) continue;
      const TokenSeq g = UnpackNGram(key, k);
      auto& agg =
          contexts[PackNGram(std::span<const TokenId>(g).subspan(0, k - 1))];
      agg.total += count;
      ++agg.by_bucket[Bucket(count)];
    }

    if (k == 1) {
      const ContextAgg& agg = contexts[PackNGram({})];
      const double gamma = agg.total > 0 ? Gamma(agg, d) : 1.0;
      for (TokenId w = 1; w <= vocab; ++w) {
        const TokenId one[1] = {w};
        auto it = adj.find(PackNGram(one));
        const std::int64_t a = it == adj.end() ? 0 : it->second;
        double p;
        if (agg.total == 0) {
          p = 1.0 / vocab;
        } else if (opts.uniform_base) {
          p = gamma / vocab;
          if (a > 0) p += std::max(a - d[Bucket(a)], 0.0) / agg.total;
        } else {
          p = static_cast<double>(a) / agg.total;
        }
        model.Upsert(one).log_prob = SafeLog(p);
      }
      if (stats.sentence_boundaries) {
        const TokenId one[1] = {bos};
        model.Upsert(one).log_prob = kLogZero;
      }
      continue;
    }

    // Backoff weights live on the (k-1)-gram entries of each context.
    for (const auto& [hkey, agg] : contexts) {
      const TokenSeq h = UnpackNGram(hkey, k - 1);
      EnsureEntryWithPrefixes(model, h);
      NGramModel::Entry& e = model.Upsert(h);
      e.has_backoff = true;
      e.log_backoff = SafeLog(Gamma(agg, d));
    }

    std::vector<std::pair<TokenSeq, double>> pending;
    pending.reserve(adj.size());
    for (const auto& [key, count] : adj) {
      if (count <= 0) continue;
      const TokenSeq g = UnpackNGram(key, k);
      std::span<const TokenId> gs(g);
      const ContextAgg& agg = contexts.at(PackNGram(gs.subspan(0, k - 1)));
      const double lower =
          std::exp(model.LogProb(g.back(), gs.subspan(1, k - 2)));
      const double p =
          std::max(count - d[Bucket(count)], 0.0) / agg.total +
          Gamma(agg, d) * lower;
      pending.emplace_back(g, SafeLog(p));
    }
    // Insert after all lower-order queries for this order are done.
    for (auto& [g, lp] : pending) model.Upsert(g).log_prob = lp;
  }
  return model;
}

double Perplexity(const NGramModel& model,
                  const std::vector<TokenSeq>& corpus) {
  if (corpus.empty()) throw DataError("empty corpus");
  double total = 0.0;
  std::size_t count = 0;
  TokenSeq ctx;
  for (const TokenSeq& seq : corpus) {
    ctx.clear();
    if (model.sentence_boundaries()) ctx.push_back(model.bos_id());
    for (TokenId id : seq) {
      total += model.LogProb(id, ctx);
      ctx.push_back(id);
      ++count;
    }
    if (model.sentence_boundaries()) {
      total += model.LogProb(model.eos_id(), ctx);
      ++count;
    }
  }
  if (count == 0) throw DataError("corpus has no tokens to score");
  return std::exp(-total / static_cast<double>(count));
}

std::vector<TokenSeq> ParseCorpus(std::istream& in, const Vocabulary& vocab) {
  std::vector<TokenSeq> corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    corpus.push_back(EncodeString(vocab, line));
  }
  return corpus;
}

std::vector<TokenSeq> ReadCorpus(const std::string& path,
                                 const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path);
  return ParseCorpus(in, vocab);
}

}  // namespace phonodec
