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

#ifndef PHONODEC_MODEL_IO_H_
#define PHONODEC_MODEL_IO_H_

#include <iosfwd>
#include <string>

#include "phonodec/acoustic_model.h"

namespace phonodec {

// JSON object whose keys mirror the ModelConfig field names. Missing keys
// keep their defaults; unknown keys are rejected.
ModelConfig ParseModelConfig(const std::string& json_text);
ModelConfig LoadModelConfig(const std::string& path);
std::string ModelConfigToJson(const ModelConfig& cfg);

// Binary parameter file: magic "CXL1", then per tensor a u32 name length,
// the name bytes, a u32 rank, rank u32 dims and float32 values, all
// little-endian, repeated until end of file.
void WriteParams(const ModelParams& params, std::ostream& out);
void WriteParams(const ModelParams& params, const std::string& path);
ModelParams ReadParams(std::istream& in);
ModelParams ReadParams(const std::string& path);

}  // namespace phonodec

#endif  // PHONODEC_MODEL_IO_H_
