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

#ifndef PHONODEC_FORMATS_H_
#define PHONODEC_FORMATS_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "phonodec/ctc.h"
#include "phonodec/signal_pipeline.h"
#include "phonodec/vocab.h"
#include "phonodec/wfst_decoder.h"

namespace phonodec {

// Newline-delimited JSON records exchanged between CLI stages. Readers skip
// blank lines and report malformed input as DataError with a line number.

struct RawTrial {
  std::string session;
  std::string trial_id;
  RawRecording recording;
};

struct FeatureTrial {
  std::string session;
  std::string trial_id;
  FeatureMatrix features;
};

struct LogitTrial {
  std::string trial_id;
  LogProbMatrix log_probs;
};

struct DecodeRecord {
  std::string trial_id;
  TokenSeq best;
  std::vector<std::string> best_symbols;
  double score = 0.0;
  std::vector<ScoredSequence> nbest;
  DecodeStage stage = DecodeStage::kWfst;
  double latency_ms = 0.0;
};

struct ReferenceRecord {
  std::string trial_id;
  TokenSeq phonemes;
};

std::vector<RawTrial> ReadRawTrials(std::istream& in);
void WriteRawTrial(std::ostream& out, const RawTrial& trial);

std::vector<FeatureTrial> ReadFeatureTrials(std::istream& in);
void WriteFeatureTrial(std::ostream& out, const FeatureTrial& trial);

std::vector<LogitTrial> ReadLogitTrials(std::istream& in);
void WriteLogitTrial(std::ostream& out, const LogitTrial& trial);

std::vector<DecodeRecord> ReadDecodeRecords(std::istream& in);
void WriteDecodeRecord(std::ostream& out, const DecodeRecord& record);

// "phonemes" may be a list of symbols or one space-separated string.
std::vector<ReferenceRecord> ReadReferences(std::istream& in,
                                            const Vocabulary& vocab);
void WriteReference(std::ostream& out, const ReferenceRecord& ref,
                    const Vocabulary& vocab);

}  // namespace phonodec

#endif  // PHONODEC_FORMATS_H_
