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

#include "phonodec/metrics.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "phonodec/errors.h"

namespace phonodec {

Alignment Align(const TokenSeq& ref, const TokenSeq& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return cost[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  Alignment a;
  a.ref_len = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i - 1, j - 1) == here) {
      a.ops.push_back({EditOp::kMatch, ref[i - 1], hyp[j - 1]});
      ++a.matches;
      --i, --j;
    } else if (i > 0 && j > 0 && ref[i - 1] != hyp[j - 1] &&
               at(i - 1, j - 1) + 1 == here) {
      a.ops.push_back({EditOp::kSub, ref[i - 1], hyp[j - 1]});
      ++a.subs;
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      a.ops.push_back({EditOp::kDel, ref[i - 1], -1});
      ++a.dels;
      --i;
    } else {
      a.ops.push_back({EditOp::kIns, -1, hyp[j - 1]});
      ++a.ins;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

ErrorRates ComputeErrorRates(std::span<const Alignment> alignments) {
  std::size_t s = 0, d = 0, ins = 0, n = 0;
  for (const auto& a : alignments) {
    s += a.subs;
    d += a.dels;
    ins += a.ins;
    n += a.ref_len;
  }
  if (n == 0) throw DataError("no reference tokens to score");
  ErrorRates r;
  const double total = static_cast<double>(n);
  r.n_ref = n;
  r.sub_rate = s / total;
  r.del_rate = d / total;
  r.ins_rate = ins / total;
  r.per = r.sub_rate + r.del_rate + r.ins_rate;
  r.accuracy = 1.0 - r.per;
  return r;
}

std::vector<std::string> WordsFromPhonemes(const TokenSeq& ids,
                                           const Vocabulary& vocab) {
  std::vector<std::string> words;
  for (const TokenSeq& group : SplitOnSil(ids, vocab)) {
    std::string word;
    for (TokenId id : group) {
      if (!word.empty()) word += '_';
      word += vocab.Symbol(id);
    }
    words.push_back(std::move(word));
  }
  return words;
}

std::vector<std::string> WordsFromText(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

Alignment AlignWords(const std::vector<std::string>& ref,
                     const std::vector<std::string>& hyp) {
  std::unordered_map<std::string, TokenId> interned;
  auto intern = [&interned](const std::vector<std::string>& words) {
    TokenSeq ids;
    for (const auto& w : words) {
      auto [it, _] = interned.emplace(w, static_cast<TokenId>(interned.size()));
      ids.push_back(it->second);
    }
    return ids;
  };
  const TokenSeq r = intern(ref);
  const TokenSeq h = intern(hyp);
  return Align(r, h);
}

double WordErrorRate(const std::vector<std::vector<std::string>>& refs,
                     const std::vector<std::vector<std::string>>& hyps) {
  if (refs.size() != hyps.size()) {
    throw DataError("reference and hypothesis counts differ");
  }
  std::vector<Alignment> alignments;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    alignments.push_back(AlignWords(refs[i], hyps[i]));
  }
  return ComputeErrorRates(alignments).per;
}

std::int64_t ConfusionMatrix::RowSum(int ref_index) const {
  std::int64_t sum = 0;
  for (int j = 0; j < num_classes_; ++j) sum += at(ref_index, j);
  return sum;
}

std::int64_t ConfusionMatrix::ColSum(int hyp_index) const {
  std::int64_t sum = 0;
  for (int i = 0; i < num_classes_; ++i) sum += at(i, hyp_index);
  return sum;
}

void ConfusionMatrix::Add(const Alignment& alignment) {
  for (const AlignedPair& p : alignment.ops) {
    if (p.op != EditOp::kMatch && p.op != EditOp::kSub) continue;
    if (p.ref < 1 || p.ref > num_classes_ || p.hyp < 1 ||
        p.hyp > num_classes_) {
      throw DataError("aligned token outside confusion matrix classes");
    }
    ++at(p.ref - 1, p.hyp - 1);
  }
}

ConfusionMatrix BuildConfusion(std::span<const Alignment> alignments,
                               int vocab_size) {
  ConfusionMatrix m(vocab_size - 1);
  for (const auto& a : alignments) m.Add(a);
  return m;
}

std::vector<ClassPrecisionRecall> PrecisionRecall(const ConfusionMatrix& m) {
  std::vector<ClassPrecisionRecall> out(m.num_classes());
  for (int c = 0; c < m.num_classes(); ++c) {
    const auto diag = static_cast<double>(m.at(c, c));
    const auto col = m.ColSum(c);
    const auto row = m.RowSum(c);
    if (col > 0) {
      out[c].precision = diag / static_cast<double>(col);
      out[c].precision_defined = true;
    }
    if (row > 0) {
      out[c].recall = diag / static_cast<double>(row);
      out[c].recall_defined = true;
    }
  }
  return out;
}

double ExpectedWordAccuracy(double per, double mean_len) {
  if (!(per >= 0 && per <= 1)) throw ParameterError("per must be in [0, 1]");
  return std::pow(1.0 - per, mean_len);
}

void WriteConfusionCsv(const ConfusionMatrix& m,
                       const std::vector<std::string>& symbols,
                       std::ostream& out) {
  if (static_cast<int>(symbols.size()) != m.num_classes()) {
    throw DataError("symbol count does not match confusion matrix");
  }
  out << "ref\\hyp";
  for (const auto& s : symbols) out << ',' << s;
  out << '\n';
  for (int i = 0; i < m.num_classes(); ++i) {
    out << symbols[i];
    for (int j = 0; j < m.num_classes(); ++j) out << ',' << m.at(i, j);
    out << '\n';
  }
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
      field.pop_back();
    }
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

ConfusionMatrix ReadConfusionCsv(std::istream& in,
                                 std::vector<std::string>* symbols) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("confusion CSV is empty");
  std::vector<std::string> header = SplitCsvLine(line);
  if (header.size() < 2) throw DataError("confusion CSV header too short");
  header.erase(header.begin());
  const int n = static_cast<int>(header.size());
  ConfusionMatrix m(n);
  int row = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitCsvLine(line);
    if (static_cast<int>(fields.size()) != n + 1 || row >= n) {
      throw DataError("confusion CSV line " + std::to_string(lineno) +
                      " has the wrong shape");
    }
    if (fields[0] != header[row]) {
      throw DataError("confusion CSV row label " + fields[0] +
                      " does not match header order");
    }
    for (int j = 0; j < n; ++j) {
      try {
        m.at(row, j) = std::stoll(fields[j + 1]);
      } catch (const std::exception&) {
        throw DataError("confusion CSV line " + std::to_string(lineno) +
                        " has a non-integer count");
      }
    }
    ++row;
  }
  if (row != n) throw DataError("confusion CSV is missing rows");
  if (symbols) *symbols = header;
  return m;
}

void WritePerClassCsv(const ConfusionMatrix& m,
                      const std::vector<std::string>& symbols,
                      std::ostream& out) {
  const auto pr = PrecisionRecall(m);
  out << "symbol,precision,recall,precision_defined,recall_defined,support\n";
  for (int c = 0; c < m.num_classes(); ++c) {
    out << symbols[c] << ',' << pr[c].precision << ',' << pr[c].recall << ','
        << (pr[c].precision_defined ? 1 : 0) << ','
        << (pr[c].recall_defined ? 1 : 0) << ',' << m.RowSum(c) << '\n';
  }
}

}  // namespace phonodec
