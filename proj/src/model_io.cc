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

#include "phonodec/model_io.h"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "phonodec/errors.h"

namespace phonodec {
namespace {

constexpr char kMagic[4] = {'C', 'X', 'L', '1'};
constexpr std::uint32_t kMaxRank = 8;
constexpr std::uint32_t kMaxNameLength = 4096;

static_assert(std::endian::native == std::endian::little,
              "parameter IO assumes a little-endian host");

void PutU32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

// Returns false on clean EOF before any byte was read.
bool GetU32(std::istream& in, std::uint32_t* v, bool eof_ok) {
  in.read(reinterpret_cast<char*>(v), sizeof *v);
  if (in.gcount() == 0 && in.eof() && eof_ok) return false;
  if (in.gcount() != sizeof *v) throw DataError("truncated parameter file");
  return true;
}

template <typename T>
void Field(const nlohmann::json& j, const char* key, T* out) {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string("model config field ") + key +
                    " has the wrong type");
  }
}

}  // namespace

ModelConfig ParseModelConfig(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("model config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("model config must be a JSON object");
  static const std::array<const char*, 12> kKeys = {
      "input_dim",     "d_model",           "num_layers",       "num_heads",
      "head_dim",      "ff_expansion",      "conv_kernel",      "prenet_kernel",
      "prenet_gru_hidden", "groupnorm_groups", "dropout",       "vocab_size"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : kKeys) known |= item.key() == k;
    if (!known) throw DataError("unknown model config field " + item.key());
  }
  ModelConfig cfg;
  Field(j, "input_dim", &cfg.input_dim);
  Field(j, "d_model", &cfg.d_model);
  Field(j, "num_layers", &cfg.num_layers);
  Field(j, "num_heads", &cfg.num_heads);
  Field(j, "head_dim", &cfg.head_dim);
  Field(j, "ff_expansion", &cfg.ff_expansion);
  Field(j, "conv_kernel", &cfg.conv_kernel);
  Field(j, "prenet_kernel", &cfg.prenet_kernel);
  Field(j, "prenet_gru_hidden", &cfg.prenet_gru_hidden);
  Field(j, "groupnorm_groups", &cfg.groupnorm_groups);
  Field(j, "dropout", &cfg.dropout);
  Field(j, "vocab_size", &cfg.vocab_size);
  cfg.Validate();
  return cfg;
}

ModelConfig LoadModelConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseModelConfig(ss.str());
}

std::string ModelConfigToJson(const ModelConfig& cfg) {
  nlohmann::ordered_json j;
  j["input_dim"] = cfg.input_dim;
  j["d_model"] = cfg.d_model;
  j["num_layers"] = cfg.num_layers;
  j["num_heads"] = cfg.num_heads;
  j["head_dim"] = cfg.head_dim;
  j["ff_expansion"] = cfg.ff_expansion;
  j["conv_kernel"] = cfg.conv_kernel;
  j["prenet_kernel"] = cfg.prenet_kernel;
  j["prenet_gru_hidden"] = cfg.prenet_gru_hidden;
  j["groupnorm_groups"] = cfg.groupnorm_groups;
  j["dropout"] = cfg.dropout;
  j["vocab_size"] = cfg.vocab_size;
  return j.dump(2);
}

void WriteParams(const ModelParams& params, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  for (const std::string& name : params.names()) {
    const Tensor& t = params.at(name);
    PutU32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    PutU32(out, static_cast<std::uint32_t>(t.rank()));
    for (int d : t.shape) PutU32(out, static_cast<std::uint32_t>(d));
    std::vector<float> values(t.data.begin(), t.data.end());
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
  }
  if (!out) throw DataError("failed writing parameter file");
}

void WriteParams(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  WriteParams(params, out);
}

ModelParams ReadParams(std::istream& in) {
  char magic[4] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("parameter file does not start with CXL1");
  }
  ModelParams params;
  std::uint32_t name_len = 0;
  while (GetU32(in, &name_len, true)) {
    if (name_len == 0 || name_len > kMaxNameLength) {
      throw DataError("bad tensor name length " + std::to_string(name_len));
    }
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (static_cast<std::uint32_t>(in.gcount()) != name_len) {
      throw DataError("truncated parameter file");
    }
    std::uint32_t rank = 0;
    GetU32(in, &rank, false);
    if (rank > kMaxRank) throw DataError("tensor " + name + " has rank " + std::to_string(rank));
    Shape shape(rank);
    for (int& d : shape) {
      std::uint32_t dim = 0;
      GetU32(in, &dim, false);
      if (dim > (1u << 28)) throw DataError("tensor " + name + " dimension too large");
      d = static_cast<int>(dim);
    }
    std::vector<float> values(ShapeNumel(shape));
    const auto bytes = static_cast<std::streamsize>(values.size() * sizeof(float));
    in.read(reinterpret_cast<char*>(values.data()), bytes);
    if (in.gcount() != bytes) throw DataError("truncated data for tensor " + name);
    Tensor t(std::move(shape), std::vector<double>(values.begin(), values.end()));
    if (!t.AllFinite()) throw DataError("tensor " + name + " has non-finite values");
    params.Add(name, std::move(t));
  }
  return params;
}

ModelParams ReadParams(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open parameter file " + path);
  return ReadParams(in);
}

}  // namespace phonodec
