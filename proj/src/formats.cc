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

#include "phonodec/formats.h"

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "phonodec/errors.h"

namespace phonodec {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

// Calls parse(object) for every non-blank line, prefixing errors with the
// line number.
template <typename T, typename Parse>
std::vector<T> ReadLines(std::istream& in, Parse parse) {
  std::vector<T> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw DataError("expected a JSON object");
      out.push_back(parse(j));
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string RequireString(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw DataError(std::string("missing string field \"") + key + "\"");
  }
  return j.at(key).get<std::string>();
}

double RequireNumber(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw DataError(std::string("missing numeric field \"") + key + "\"");
  }
  return j.at(key).get<double>();
}

Matrix RequireMatrix(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw DataError(std::string("missing array field \"") + key + "\"");
  }
  const json& rows = j.at(key);
  const std::size_t cols = rows.empty() ? 0 : rows.at(0).size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows[r];
    if (!row.is_array() || row.size() != cols) {
      throw DataError(std::string("field \"") + key + "\" is not rectangular");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw DataError(std::string("field \"") + key + "\" has a non-number");
      }
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

ojson MatrixJson(const Matrix& m) {
  ojson rows = ojson::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows.push_back(ojson(std::vector<double>(m.row(r).begin(), m.row(r).end())));
  }
  return rows;
}

TokenSeq RequireIds(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw DataError(std::string("missing id list \"") + key + "\"");
  }
  TokenSeq ids;
  for (const json& v : j.at(key)) {
    if (!v.is_number_integer()) throw DataError("token ids must be integers");
    ids.push_back(v.get<int>());
  }
  return ids;
}

void WriteLine(std::ostream& out, const ojson& j) { out << j.dump() << '\n'; }

}  // namespace

std::vector<RawTrial> ReadRawTrials(std::istream& in) {
  return ReadLines<RawTrial>(in, [](const json& j) {
    RawTrial t;
    t.session = j.contains("session") ? RequireString(j, "session") : "";
    t.trial_id = RequireString(j, "trial_id");
    t.recording.sample_rate_hz = RequireNumber(j, "sample_rate_hz");
    t.recording.samples = RequireMatrix(j, "samples");
    return t;
  });
}

void WriteRawTrial(std::ostream& out, const RawTrial& trial) {
  ojson j;
  j["session"] = trial.session;
  j["trial_id"] = trial.trial_id;
  j["sample_rate_hz"] = trial.recording.sample_rate_hz;
  j["samples"] = MatrixJson(trial.recording.samples);
  WriteLine(out, j);
}

std::vector<FeatureTrial> ReadFeatureTrials(std::istream& in) {
  return ReadLines<FeatureTrial>(in, [](const json& j) {
    FeatureTrial t;
    t.session = j.contains("session") ? RequireString(j, "session") : "";
    t.trial_id = RequireString(j, "trial_id");
    t.features.frame_rate_hz = RequireNumber(j, "frame_rate_hz");
    t.features.values = RequireMatrix(j, "features");
    return t;
  });
}

void WriteFeatureTrial(std::ostream& out, const FeatureTrial& trial) {
  ojson j;
  j["session"] = trial.session;
  j["trial_id"] = trial.trial_id;
  j["frame_rate_hz"] = trial.features.frame_rate_hz;
  j["features"] = MatrixJson(trial.features.values);
  WriteLine(out, j);
}

std::vector<LogitTrial> ReadLogitTrials(std::istream& in) {
  return ReadLines<LogitTrial>(in, [](const json& j) {
    LogitTrial t;
    t.trial_id = RequireString(j, "trial_id");
    t.log_probs.frames = RequireMatrix(j, "frames");
    if (t.log_probs.frames.cols() < 2 && t.log_probs.num_frames() > 0) {
      throw DataError("log-prob rows need at least two classes");
    }
    return t;
  });
}

void WriteLogitTrial(std::ostream& out, const LogitTrial& trial) {
  ojson j;
  j["trial_id"] = trial.trial_id;
  j["frames"] = MatrixJson(trial.log_probs.frames);
  WriteLine(out, j);
}

std::vector<DecodeRecord> ReadDecodeRecords(std::istream& in) {
  return ReadLines<DecodeRecord>(in, [](const json& j) {
    DecodeRecord r;
    r.trial_id = RequireString(j, "trial_id");
    r.best = RequireIds(j, "best");
    if (j.contains("best_symbols")) {
      r.best_symbols = j.at("best_symbols").get<std::vector<std::string>>();
    }
    if (j.contains("score")) r.score = RequireNumber(j, "score");
    if (j.contains("nbest")) {
      for (const json& h : j.at("nbest")) {
        ScoredSequence s;
        s.ids = RequireIds(h, "ids");
        s.score = RequireNumber(h, "score");
        r.nbest.push_back(std::move(s));
      }
    }
    if (j.contains("stage")) r.stage = ParseDecodeStage(RequireString(j, "stage"));
    if (j.contains("latency_ms")) r.latency_ms = RequireNumber(j, "latency_ms");
    return r;
  });
}

void WriteDecodeRecord(std::ostream& out, const DecodeRecord& record) {
  ojson j;
  j["trial_id"] = record.trial_id;
  j["best"] = record.best;
  j["best_symbols"] = record.best_symbols;
  j["score"] = record.score;
  ojson nbest = ojson::array();
  for (const ScoredSequence& s : record.nbest) {
    ojson h;
    h["ids"] = s.ids;
    h["score"] = s.score;
    nbest.push_back(std::move(h));
  }
  j["nbest"] = std::move(nbest);
  j["stage"] = std::string(DecodeStageName(record.stage));
  j["latency_ms"] = record.latency_ms;
  WriteLine(out, j);
}

std::vector<ReferenceRecord> ReadReferences(std::istream& in,
                                            const Vocabulary& vocab) {
  return ReadLines<ReferenceRecord>(in, [&vocab](const json& j) {
    ReferenceRecord r;
    r.trial_id = RequireString(j, "trial_id");
    if (!j.contains("phonemes")) throw DataError("missing field \"phonemes\"");
    const json& p = j.at("phonemes");
    if (p.is_string()) {
      r.phonemes = EncodeString(vocab, p.get<std::string>());
    } else if (p.is_array()) {
      r.phonemes = Encode(vocab, p.get<std::vector<std::string>>());
    } else {
      throw DataError("\"phonemes\" must be a string or a list of symbols");
    }
    return r;
  });
}

void WriteReference(std::ostream& out, const ReferenceRecord& ref,
                    const Vocabulary& vocab) {
  ojson j;
  j["trial_id"] = ref.trial_id;
  j["phonemes"] = Decode(vocab, ref.phonemes);
  WriteLine(out, j);
}

}  // namespace phonodec
