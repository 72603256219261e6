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

#ifndef PHONODEC_TRAINING_UTILS_H_
#define PHONODEC_TRAINING_UTILS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "phonodec/signal_pipeline.h"

namespace phonodec {

struct AdamWState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

struct AdamWOptions {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// One bias-corrected AdamW update with decoupled weight decay. `state` is
// lazily sized on the first call.
void AdamWStep(std::span<double> theta, std::span<const double> grad,
               AdamWState& state, const AdamWOptions& opts);

struct SchedulerConfig {
  double eta_max = 3e-4;
  double eta_min = 0.0;
  double warmup_epochs = 10.0;
  double total_epochs = 100.0;
};

// Linear warmup from 0, then cosine decay to eta_min at total_epochs.
// `epoch` may be fractional; values past total_epochs stay at eta_min.
double CosineLr(double epoch, const SchedulerConfig& cfg);

std::vector<double> LabelSmooth(int target, int vocab_size, double eps = 0.1);

// Scales every gradient by max_norm / global_norm when the global L2 norm
// exceeds max_norm. Returns the norm before clipping.
double ClipGradNorm(std::vector<std::vector<double>>& grads,
                    double max_norm = 1.0);

struct AugmentPolicy {
  int n_time_masks = 3;
  int max_time_width = 100;
  int n_channel_masks = 2;
  int max_channel_width = 25;
  std::uint64_t seed = 0;
};

struct MaskSpan {
  std::size_t start = 0;
  std::size_t width = 0;
};

struct AugmentResult {
  FeatureMatrix features;
  std::vector<MaskSpan> time_masks;
  std::vector<MaskSpan> channel_masks;
};

// Zeroes whole frames and whole channels. Mask widths are drawn from
// {0..max} and starts uniformly over the valid range.
AugmentResult SpecAugment(const FeatureMatrix& features,
                          const AugmentPolicy& policy);

}  // namespace phonodec

#endif  // PHONODEC_TRAINING_UTILS_H_
