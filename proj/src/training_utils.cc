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

#include "phonodec/training_utils.h"

#include <cmath>
#include <numbers>
#include <random>

#include "phonodec/errors.h"

namespace phonodec {

void AdamWStep(std::span<double> theta, std::span<const double> grad,
               AdamWState& state, const AdamWOptions& opts) {
  if (theta.size() != grad.size()) {
    throw ParameterError("parameter and gradient sizes differ");
  }
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(theta.size(), 0.0);
    state.v.assign(theta.size(), 0.0);
  }
  if (state.m.size() != theta.size() || state.v.size() != theta.size()) {
    throw ParameterError("optimizer state does not match parameters");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(opts.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(opts.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = opts.beta1 * state.m[i] + (1.0 - opts.beta1) * grad[i];
    state.v[i] = opts.beta2 * state.v[i] + (1.0 - opts.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= opts.lr * (m_hat / (std::sqrt(v_hat) + opts.eps) +
                           opts.weight_decay * theta[i]);
  }
}

double CosineLr(double epoch, const SchedulerConfig& cfg) {
  if (!(cfg.warmup_epochs >= 0 && cfg.warmup_epochs < cfg.total_epochs) ||
      cfg.eta_min > cfg.eta_max) {
    throw ParameterError("invalid scheduler configuration");
  }
  if (epoch < 0) throw ParameterError("epoch must be >= 0");
  if (epoch < cfg.warmup_epochs) {
    return cfg.eta_max * epoch / cfg.warmup_epochs;
  }
  if (epoch >= cfg.total_epochs) return cfg.eta_min;
  const double progress =
      (epoch - cfg.warmup_epochs) / (cfg.total_epochs - cfg.warmup_epochs);
  return cfg.eta_min + 0.5 * (cfg.eta_max - cfg.eta_min) *
                           (1.0 + std::cos(std::numbers::pi * progress));
}

std::vector<double> LabelSmooth(int target, int vocab_size, double eps) {
  if (vocab_size < 2 || target < 0 || target >= vocab_size) {
    throw ParameterError("label smoothing target out of range");
  }
  if (!(eps >= 0 && eps < 1)) {
    throw ParameterError("label smoothing eps must be in [0, 1)");
  }
  std::vector<double> p(vocab_size, eps / (vocab_size - 1));
  p[target] = 1.0 - eps;
  return p;
}

double ClipGradNorm(std::vector<std::vector<double>>& grads, double max_norm) {
  if (!(max_norm > 0)) throw ParameterError("max_norm must be > 0");
  double sq = 0.0;
  for (const auto& g : grads) {
    for (double v : g) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& g : grads) {
      for (double& v : g) v *= scale;
    }
  }
  return norm;
}

AugmentResult SpecAugment(const FeatureMatrix& features,
                          const AugmentPolicy& policy) {
  const std::size_t frames = features.frames();
  const std::size_t channels = features.channel_count();
  if (policy.max_time_width < 0 || policy.max_channel_width < 0 ||
      policy.n_time_masks < 0 || policy.n_channel_masks < 0) {
    throw ParameterError("augment widths and counts must be >= 0");
  }
  if (static_cast<std::size_t>(policy.max_time_width) > frames ||
      static_cast<std::size_t>(policy.max_channel_width) > channels) {
    throw ParameterError("mask width exceeds feature dimensions");
  }
  std::mt19937_64 rng(policy.seed);
  auto draw = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  AugmentResult out{features, {}, {}};
  for (int i = 0; i < policy.n_time_masks; ++i) {
    const std::size_t width = draw(0, policy.max_time_width);
    const std::size_t start = draw(0, frames - width);
    out.time_masks.push_back({start, width});
    for (std::size_t t = start; t < start + width; ++t) {
      for (double& v : out.features.values.row(t)) v = 0.0;
    }
  }
  for (int i = 0; i < policy.n_channel_masks; ++i) {
    const std::size_t width = draw(0, policy.max_channel_width);
    const std::size_t start = draw(0, channels - width);
    out.channel_masks.push_back({start, width});
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t c = start; c < start + width; ++c) {
        out.features.values(t, c) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace phonodec
