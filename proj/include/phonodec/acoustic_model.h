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

#ifndef PHONODEC_ACOUSTIC_MODEL_H_
#define PHONODEC_ACOUSTIC_MODEL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phonodec/ctc.h"
#include "phonodec/matrix.h"
#include "phonodec/tensor.h"

namespace phonodec {

struct ModelConfig {
  int input_dim = 512;
  int d_model = 384;
  int num_layers = 12;
  int num_heads = 6;
  int head_dim = 64;
  int ff_expansion = 4;
  int conv_kernel = 15;
  int prenet_kernel = 5;
  int prenet_gru_hidden = 256;
  int groupnorm_groups = 32;
  double dropout = 0.15;  // kept for completeness; the forward pass is inference only
  int vocab_size = 42;

  void Validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Named parameter tensors in a fixed canonical order.
class ModelParams {
 public:
  void Add(const std::string& name, Tensor tensor);
  bool Contains(const std::string& name) const;
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);

  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return order_.size(); }
  std::size_t TotalSize() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::map<std::string, Tensor> tensors_;
  std::vector<std::string> order_;
};

enum class ParamKind { kWeight, kBias, kGain };

struct ParamSpec {
  std::string name;
  Shape shape;
  ParamKind kind;
  int fan_in;
};

// Every tensor the configuration defines, in canonical order.
std::vector<ParamSpec> ParamSpecs(const ModelConfig& cfg);

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from a 64-bit Mersenne
// twister, biases 0, gains 1. The bit-level draw is fixed so results agree
// across standard libraries.
ModelParams InitParams(const ModelConfig& cfg, std::uint64_t seed);

// All weights and biases zero, all gains one.
ModelParams ZeroParams(const ModelConfig& cfg);

// Closed-form parameter total.
std::int64_t ParamCount(const ModelConfig& cfg);

// Throws DataError if a tensor is missing, extra or misshapen.
void CheckParams(const ModelParams& params, const ModelConfig& cfg);

// Rows of `x` divided by their root mean square and scaled by gamma.
Matrix RmsNorm(const Matrix& x, std::span<const double> gamma,
               double eps = 1e-8);

int SubsampledLength(int frames);

// x is time x channels for one sequence in every function below.
Matrix GruForward(const ModelParams& params, const std::string& prefix,
                  const Matrix& x, bool reverse);
Matrix PrenetForward(const ModelParams& params, const ModelConfig& cfg,
                     const Matrix& x);
Matrix SubsampleForward(const ModelParams& params, const ModelConfig& cfg,
                        const Matrix& x);
Matrix SinusoidalPositions(int frames, int d_model);

// Attention probabilities for layer `layer`, one frames x frames matrix per
// head, computed from the normalized block input.
std::vector<Matrix> AttentionWeights(const ModelParams& params,
                                     const ModelConfig& cfg, int layer,
                                     const Matrix& x);

Matrix ConformerBlockForward(const ModelParams& params,
                             const ModelConfig& cfg, int layer,
                             const Matrix& x);

// Whole network for one sequence of input frames.
LogProbMatrix SequenceForward(const ModelParams& params,
                              const ModelConfig& cfg, const Matrix& features);

struct ModelOutput {
  std::vector<LogProbMatrix> log_probs;
  std::vector<int> lengths;
};

// features is [B, T, input_dim]; item b uses its first lengths[b] frames.
ModelOutput ModelForward(const ModelParams& params, const ModelConfig& cfg,
                         const Tensor& features, std::span<const int> lengths,
                         int jobs = 1);

// Batched shape-preserving wrappers over [B, T, C] tensors.
Tensor PrenetForward(const ModelParams& params, const ModelConfig& cfg,
                     const Tensor& x);
Tensor SubsampleForward(const ModelParams& params, const ModelConfig& cfg,
                        const Tensor& x, std::vector<int>* lengths = nullptr);

}  // namespace phonodec

#endif  // PHONODEC_ACOUSTIC_MODEL_H_
