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

#include "phonodec/vocab.h"

#include <fstream>
#include <sstream>

#include "phonodec/errors.h"

namespace phonodec {
namespace {

bool ValidLabel(const std::string& label) {
  if (label.empty()) return false;
  for (char c : label) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_';
    if (!ok) return false;
  }
  return label[0] >= 'A' && label[0] <= 'Z';
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw DataError("vocabulary is empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const std::string& s = symbols_[i];
    if (!ValidLabel(s)) throw DataError("invalid phoneme label '" + s + "'");
    const TokenId id = static_cast<TokenId>(i) + 1;
    if (!index_.emplace(s, id).second) {
      throw DataError("duplicate symbol " + s);
    }
    if (s == "SIL") sil_id_ = id;
  }
}

const std::string& Vocabulary::Symbol(TokenId id) const {
  if (id < 1 || id >= size()) {
    throw DataError("token id " + std::to_string(id) + " out of range");
  }
  return symbols_[id - 1];
}

std::optional<TokenId> Vocabulary::Find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary ParseVocab(std::string_view text) {
  std::vector<std::string> symbols;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream fields(line);
    std::string sym;
    if (!(fields >> sym)) continue;
    std::string extra;
    if (fields >> extra) {
      throw DataError("vocab line has more than one symbol: " + line);
    }
    symbols.push_back(sym);
  }
  return Vocabulary(std::move(symbols));
}

Vocabulary LoadVocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocab file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseVocab(buf.str());
}

TokenSeq Encode(const Vocabulary& vocab,
                const std::vector<std::string>& labels) {
  TokenSeq ids;
  ids.reserve(labels.size());
  for (const auto& label : labels) {
    auto id = vocab.Find(label);
    if (!id) throw DataError("unknown symbol " + label);
    ids.push_back(*id);
  }
  return ids;
}

std::vector<std::string> Decode(const Vocabulary& vocab, const TokenSeq& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(vocab.Symbol(id));
  return out;
}

TokenSeq EncodeString(const Vocabulary& vocab, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> labels;
  std::string tok;
  while (in >> tok) labels.push_back(tok);
  return Encode(vocab, labels);
}

std::vector<TokenSeq> SplitOnSil(const TokenSeq& ids, const Vocabulary& vocab) {
  std::vector<TokenSeq> groups;
  TokenSeq current;
  const auto sil = vocab.sil_id();
  for (TokenId id : ids) {
    if (sil && id == *sil) {
      if (!current.empty()) groups.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(id);
    }
  }
  if (!current.empty()) groups.push_back(std::move(current));
  return groups;
}

}  // namespace phonodec
