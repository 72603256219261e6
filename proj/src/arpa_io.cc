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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "phonodec/errors.h"
#include "phonodec/math_util.h"
#include "phonodec/ngram_lm.h"

namespace phonodec {
namespace {

// log10 values at or below this are read back as log(0).
constexpr double kArpaLogZero = -99.0;

double ToLog10(double ln) {
  return ln == kLogZero ? kArpaLogZero : ln / std::numbers::ln10;
}

double FromLog10(double l10) {
  return l10 <= kArpaLogZero ? kLogZero : l10 * std::numbers::ln10;
}

struct ArpaLine {
  std::vector<std::string> words;
  double log10_prob = 0.0;
  double log10_backoff = 0.0;
  bool has_backoff = false;
};

[[noreturn]] void Fail(int lineno, const std::string& what) {
  throw DataError("ARPA line " + std::to_string(lineno) + ": " + what);
}

double ParseNumber(const std::string& s, int lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    Fail(lineno, "bad number '" + s + "'");
  }
  if (used != s.size()) Fail(lineno, "bad number '" + s + "'");
  return v;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void WriteArpa(const NGramModel& model, std::ostream& out) {
  const auto& symbols = model.symbols();
  out << "\\data\\\n";
  for (int k = 1; k <= model.max_order(); ++k) {
    out << "ngram " << k << '=' << model.NumNGrams(k) << '\n';
  }
  out << std::setprecision(10);
  for (int k = 1; k <= model.max_order(); ++k) {
    out << "\n\\" << k << "-grams:\n";
    std::vector<std::pair<TokenSeq, const NGramModel::Entry*>> rows;
    for (const auto& [key, entry] : model.Table(k)) {
      rows.emplace_back(UnpackNGram(key, k), &entry);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [gram, entry] : rows) {
      out << ToLog10(entry->log_prob) << '\t';
      for (std::size_t i = 0; i < gram.size(); ++i) {
        if (i) out << ' ';
        out << symbols.at(gram[i]);
      }
      if (entry->has_backoff) out << '\t' << ToLog10(entry->log_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void WriteArpa(const NGramModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write ARPA file " + path);
  WriteArpa(model, out);
  if (!out) throw DataError("failed writing ARPA file " + path);
}

NGramModel ReadArpa(std::istream& in, const Vocabulary* vocab) {
  std::string raw;
  int lineno = 0;
  auto next_line = [&](std::string& line) {
    while (std::getline(in, raw)) {
      ++lineno;
      line = Trim(raw);
      if (!line.empty()) return true;
    }
    return false;
  };

  std::string line;
  if (!next_line(line) || line != "\\data\\") {
    Fail(lineno, "expected \\data\\ header");
  }
  std::vector<std::size_t> declared;
  while (next_line(line) && line.rfind("ngram ", 0) == 0) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) Fail(lineno, "malformed ngram count line");
    const int k = static_cast<int>(ParseNumber(Trim(line.substr(6, eq - 6)), lineno));
    const double n = ParseNumber(Trim(line.substr(eq + 1)), lineno);
    if (k != static_cast<int>(declared.size()) + 1 || n < 0) {
      Fail(lineno, "ngram counts must be listed in order");
    }
    declared.push_back(static_cast<std::size_t>(n));
  }
  if (declared.empty()) Fail(lineno, "no ngram counts in \\data\\ section");
  if (static_cast<int>(declared.size()) > kMaxNGramOrder) {
    Fail(lineno, "order exceeds supported maximum");
  }

  std::vector<std::vector<ArpaLine>> sections(declared.size());
  std::vector<std::vector<int>> line_numbers(declared.size());
  for (std::size_t k = 1; k <= declared.size(); ++k) {
    const std::string header = "\\" + std::to_string(k) + "-grams:";
    if (line != header) Fail(lineno, "expected section header " + header);
    for (std::size_t i = 0; i < declared[k - 1]; ++i) {
      if (!next_line(line)) Fail(lineno, "unexpected end of file");
      if (line[0] == '\\') Fail(lineno, "section has fewer entries than declared");
      std::istringstream fields(line);
      std::vector<std::string> tok;
      std::string t;
      while (fields >> t) tok.push_back(t);
      if (tok.size() != k + 1 && tok.size() != k + 2) {
        Fail(lineno, "wrong number of fields for a " + std::to_string(k) + "-gram");
      }
      ArpaLine row;
      row.log10_prob = ParseNumber(tok[0], lineno);
      row.words.assign(tok.begin() + 1, tok.begin() + 1 + k);
      if (tok.size() == k + 2) {
        row.has_backoff = true;
        row.log10_backoff = ParseNumber(tok.back(), lineno);
      }
      sections[k - 1].push_back(std::move(row));
      line_numbers[k - 1].push_back(lineno);
    }
    if (!next_line(line)) Fail(lineno, "missing \\end\\ marker");
  }
  if (line != "\\end\\") Fail(lineno, "expected \\end\\ marker");

  std::unordered_map<std::string, TokenId> ids;
  int vocab_size = 0;
  bool boundaries = false;
  for (const auto& row : sections[0]) {
    if (row.words[0] == "<s>") boundaries = true;
  }
  if (vocab) {
    vocab_size = vocab->size();
    for (int i = 1; i < vocab_size; ++i) ids[vocab->Symbol(i)] = i;
  } else {
    TokenId next = 1;
    for (const auto& row : sections[0]) {
      const std::string& w = row.words[0];
      if (w == "<s>" || w == "</s>" || ids.count(w)) continue;
      ids[w] = next++;
    }
    vocab_size = next;
  }
  ids["</s>"] = EosId(vocab_size);
  ids["<s>"] = BosId(vocab_size);

  NGramModel model(vocab_size, static_cast<int>(declared.size()), boundaries);
  if (vocab) model.SetSymbols(*vocab);
  for (std::size_t k = 0; k < sections.size(); ++k) {
    for (std::size_t i = 0; i < sections[k].size(); ++i) {
      const ArpaLine& row = sections[k][i];
      TokenSeq gram;
      for (const auto& w : row.words) {
        auto it = ids.find(w);
        if (it == ids.end()) {
          Fail(line_numbers[k][i], "unknown symbol " + w);
        }
        gram.push_back(it->second);
      }
      NGramModel::Entry& e = model.Upsert(gram);
      e.log_prob = FromLog10(row.log10_prob);
      e.has_backoff = row.has_backoff;
      e.log_backoff = row.has_backoff ? FromLog10(row.log10_backoff) : 0.0;
    }
  }
  if (!vocab) {
    std::vector<std::string> names(vocab_size - 1);
    for (const auto& [w, id] : ids) {
      if (id >= 1 && id < vocab_size) names[id - 1] = w;
    }
    model.SetSymbolNames(names);
  }
  return model;
}

NGramModel ReadArpa(const std::string& path, const Vocabulary* vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ARPA file " + path);
  return ReadArpa(in, vocab);
}

}  // namespace phonodec
