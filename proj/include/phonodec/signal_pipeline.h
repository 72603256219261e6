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

#ifndef PHONODEC_SIGNAL_PIPELINE_H_
#define PHONODEC_SIGNAL_PIPELINE_H_

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "phonodec/matrix.h"

namespace phonodec {

// Multichannel recording, channel-major: samples(c, t).
struct RawRecording {
  Matrix samples;
  double sample_rate_hz = 30000.0;

  std::size_t channel_count() const { return samples.rows(); }
  std::size_t length() const { return samples.cols(); }
};

// Time-major features: values(t, c).
struct FeatureMatrix {
  Matrix values;
  double frame_rate_hz = 50.0;

  std::size_t frames() const { return values.rows(); }
  std::size_t channel_count() const { return values.cols(); }
};

// One biquad: b0 b1 b2 / a0 a1 a2 with a0 == 1.
using Biquad = std::array<double, 6>;

struct FilterSOS {
  std::vector<Biquad> sections;
  int order = 0;
  double low_hz = 0.0;
  double high_hz = 0.0;
  double sample_rate_hz = 0.0;

  // Complex response at frequency `hz`.
  std::complex<double> Response(double hz) const;
  // Largest pole radius over all sections; < 1 means stable.
  double MaxPoleRadius() const;
};

struct SessionStats {
  std::vector<double> mean;
  std::vector<double> std;
};

struct PipelineConfig {
  int filter_order = 4;
  double low_hz = 0.3;
  double high_hz = 300.0;
  double frame_rate_hz = 50.0;
  double zscore_eps = 1e-8;
};

// Digital Butterworth bandpass (prototype order `order` per band edge, so
// 2*order poles) built with a prewarped bilinear transform and returned as
// cascaded second-order sections.
FilterSOS DesignBandpass(int order, double low_hz, double high_hz,
                         double sample_rate_hz);

// Causal, zero initial state, applied to every channel independently.
RawRecording ApplyFilter(const FilterSOS& filter, const RawRecording& rec);
// Single-channel variant, transposed direct form II per section.
std::vector<double> FilterSignal(const FilterSOS& filter,
                                 const std::vector<double>& x);

Matrix CommonAverageReference(const Matrix& channel_major);

// Averages non-overlapping windows of `bin` samples; the trailing partial
// window is dropped and the result is transposed to time-major.
FeatureMatrix BinAverage(const Matrix& channel_major, int bin,
                         double sample_rate_hz);

SessionStats ComputeSessionStats(const std::vector<FeatureMatrix>& frames);

FeatureMatrix ZScore(const FeatureMatrix& frame, const SessionStats& stats,
                     double eps = 1e-8);

// Filter -> CAR -> bin. Everything before normalization.
FeatureMatrix ExtractFeatures(const RawRecording& rec,
                              const PipelineConfig& cfg);

// Full four-stage chain. Without `stats` the recording is normalized by its
// own statistics.
FeatureMatrix Preprocess(const RawRecording& rec,
                         const std::optional<SessionStats>& stats,
                         const PipelineConfig& cfg);

}  // namespace phonodec

#endif  // PHONODEC_SIGNAL_PIPELINE_H_
