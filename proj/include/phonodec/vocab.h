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

#ifndef PHONODEC_VOCAB_H_
#define PHONODEC_VOCAB_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phonodec {

using TokenId = int;
using TokenSeq = std::vector<TokenId>;

inline constexpr TokenId kBlankId = 0;

// CTC output vocabulary. Id 0 is the blank and is not a symbol; the
// symbols listed in the vocab file take ids 1..size()-1 in file order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws DataError on duplicates, empty input or malformed labels.
  explicit Vocabulary(std::vector<std::string> symbols);

  // Number of CTC classes, blank included.
  int size() const { return static_cast<int>(symbols_.size()) + 1; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  const std::string& Symbol(TokenId id) const;
  std::optional<TokenId> Find(std::string_view symbol) const;
  // Id of "SIL" when the vocabulary has one.
  std::optional<TokenId> sil_id() const { return sil_id_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, TokenId> index_;
  std::optional<TokenId> sil_id_;
};

// One symbol per line, '#' starts a comment, blank lines are skipped.
Vocabulary LoadVocab(const std::string& path);
Vocabulary ParseVocab(std::string_view text);

TokenSeq Encode(const Vocabulary& vocab,
                const std::vector<std::string>& labels);
std::vector<std::string> Decode(const Vocabulary& vocab, const TokenSeq& ids);

// Splits on whitespace and encodes, e.g. "W AH T SIL D UW".
TokenSeq EncodeString(const Vocabulary& vocab, std::string_view text);

// Groups of consecutive non-SIL ids. SIL separators are dropped and empty
// groups elided. Without a SIL symbol the whole sequence is one group.
std::vector<TokenSeq> SplitOnSil(const TokenSeq& ids, const Vocabulary& vocab);

}  // namespace phonodec

#endif  // PHONODEC_VOCAB_H_
