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

#include "phonodec/trigger.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "phonodec/errors.h"

namespace phonodec {

FrequencyTable PhonemeFrequencies(const std::vector<TokenSeq>& corpus,
                                  int vocab_size) {
  FrequencyTable table;
  std::vector<std::int64_t> counts(vocab_size - 1, 0);
  for (const auto& seq : corpus) {
    for (TokenId id : seq) {
      if (id < 1 || id >= vocab_size) {
        throw DataError("token id " + std::to_string(id) + " out of range");
      }
      ++counts[id - 1];
      ++table.token_total;
    }
  }
  if (table.token_total == 0) throw DataError("corpus has no tokens");
  table.freq.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    table.freq[i] = static_cast<double>(counts[i]) /
                    static_cast<double>(table.token_total);
  }
  return table;
}

double TriggerScore(double precision, double recall, double frequency,
                    double eps) {
  return precision * recall / (frequency + eps);
}

std::vector<TriggerCandidate> RankTriggers(
    const std::vector<ClassPrecisionRecall>& pr, const FrequencyTable& freq,
    double eps) {
  if (pr.size() != freq.freq.size()) {
    throw DataError("precision/recall and frequency tables differ in size");
  }
  std::vector<TriggerCandidate> out;
  for (std::size_t i = 0; i < pr.size(); ++i) {
    TriggerCandidate c;
    c.id = static_cast<TokenId>(i) + 1;
    c.precision = pr[i].precision;
    c.recall = pr[i].recall;
    c.frequency = freq.freq[i];
    c.score = TriggerScore(c.precision, c.recall, c.frequency, eps);
    out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TriggerCandidate& a, const TriggerCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.id < b.id;
                   });
  return out;
}

double FittsPointingTime(double a, double b, double distance, double width) {
  if (!(width > 0)) throw ParameterError("target width must be > 0");
  if (distance < 0) throw ParameterError("distance must be >= 0");
  return a + b * std::log2(distance / width + 1.0);
}

FrequencyTable ReadFrequencyCsv(std::istream& in,
                                const std::vector<std::string>& symbols) {
  std::unordered_map<std::string, double> by_symbol;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("frequency CSV line " + std::to_string(lineno) +
                      " has no comma");
    }
    const std::string sym = line.substr(0, comma);
    const std::string val = line.substr(comma + 1);
    if (lineno == 1 && sym == "symbol") continue;
    double f = 0.0;
    try {
      std::size_t used = 0;
      f = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw DataError("frequency CSV line " + std::to_string(lineno) +
                      " has a bad value");
    }
    if (f < 0) throw DataError("negative frequency for " + sym);
    by_symbol[sym] = f;
  }
  FrequencyTable table;
  for (const auto& s : symbols) {
    auto it = by_symbol.find(s);
    table.freq.push_back(it == by_symbol.end() ? 0.0 : it->second);
  }
  return table;
}

void WriteRankedCsv(const std::vector<TriggerCandidate>& ranked,
                    const std::vector<std::string>& symbols,
                    std::ostream& out) {
  out << "rank,symbol,precision,recall,frequency,score\n";
  int rank = 1;
  for (const auto& c : ranked) {
    out << rank++ << ',' << symbols.at(c.id - 1) << ',' << c.precision << ','
        << c.recall << ',' << c.frequency << ',' << c.score << '\n';
  }
}

}  // namespace phonodec
