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

#include "phonodec/signal_pipeline.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "phonodec/errors.h"

namespace phonodec {
namespace {

using Complex = std::complex<double>;

int BinSize(double sample_rate_hz, double frame_rate_hz) {
  if (sample_rate_hz <= 0 || frame_rate_hz <= 0) {
    throw ParameterError("sample and frame rates must be positive");
  }
  const double ratio = sample_rate_hz / frame_rate_hz;
  const double rounded = std::round(ratio);
  if (rounded < 1 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw ParameterError("sample rate " + std::to_string(sample_rate_hz) +
                         " is not an integer multiple of frame rate " +
                         std::to_string(frame_rate_hz));
  }
  return static_cast<int>(rounded);
}

}  // namespace

Complex FilterSOS::Response(double hz) const {
  const Complex z = std::polar(1.0, -2.0 * std::numbers::pi * hz /
                                        sample_rate_hz);  // z^-1
  Complex h = 1.0;
  for (const Biquad& s : sections) {
    h *= (s[0] + s[1] * z + s[2] * z * z) / (s[3] + s[4] * z + s[5] * z * z);
  }
  return h;
}

double FilterSOS::MaxPoleRadius() const {
  double radius = 0.0;
  for (const Biquad& s : sections) {
    // Roots of z^2 + a1 z + a2.
    const Complex disc = std::sqrt(Complex(s[4] * s[4] - 4.0 * s[5], 0.0));
    radius = std::max({radius, std::abs((-s[4] + disc) / 2.0),
                       std::abs((-s[4] - disc) / 2.0)});
  }
  return radius;
}

FilterSOS DesignBandpass(int order, double low_hz, double high_hz,
                         double sample_rate_hz) {
  if (order < 1) throw ParameterError("filter order must be >= 1");
  if (!(low_hz > 0 && low_hz < high_hz && high_hz < sample_rate_hz / 2)) {
    throw ParameterError("invalid band: need 0 < low < high < fs/2");
  }
  const double fs2 = 2.0 * sample_rate_hz;
  const double wl = fs2 * std::tan(std::numbers::pi * low_hz / sample_rate_hz);
  const double wh =
      fs2 * std::tan(std::numbers::pi * high_hz / sample_rate_hz);
  const double bw = wh - wl;
  const double w0_sq = wl * wh;

  // Analog lowpass prototype poles on the left half of the unit circle,
  // mapped through s -> (s^2 + w0^2) / (s * bw).
  std::vector<Complex> analog;
  for (int k = 0; k < order; ++k) {
    const Complex p = std::polar(
        1.0, std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order));
    const Complex half = p * bw / 2.0;
    const Complex root = std::sqrt(half * half - w0_sq);
    // Pick the larger-magnitude root directly and derive the other from the
    // product w0^2 to avoid cancellation at the low edge.
    const Complex big = std::abs(half + root) >= std::abs(half - root)
                            ? half + root
                            : half - root;
    analog.push_back(big);
    analog.push_back(w0_sq / big);
  }

  // Bilinear transform. Analog zeros: `order` at s = 0 (-> z = 1), and
  // `order` at infinity (-> z = -1).
  Complex gain = std::pow(bw, order);
  std::vector<Complex> digital;
  for (const Complex& p : analog) {
    digital.push_back((fs2 + p) / (fs2 - p));
    gain /= (fs2 - p);
  }
  gain *= std::pow(fs2, order);

  std::vector<Complex> upper;
  std::vector<double> real_poles;
  for (const Complex& p : digital) {
    if (std::abs(p.imag()) <= 1e-12) {
      real_poles.push_back(p.real());
    } else if (p.imag() > 0) {
      upper.push_back(p);
    }
  }
  std::sort(upper.begin(), upper.end(), [](const Complex& a, const Complex& b) {
    return std::abs(a) < std::abs(b);
  });
  std::sort(real_poles.begin(), real_poles.end());

  FilterSOS sos;
  sos.order = order;
  sos.low_hz = low_hz;
  sos.high_hz = high_hz;
  sos.sample_rate_hz = sample_rate_hz;
  // Each section carries one zero at +1 and one at -1: (1 - z^-2).
  for (const Complex& p : upper) {
    sos.sections.push_back(
        {1.0, 0.0, -1.0, 1.0, -2.0 * p.real(), std::norm(p)});
  }
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    const double p = real_poles[i], q = real_poles[i + 1];
    sos.sections.push_back({1.0, 0.0, -1.0, 1.0, -(p + q), p * q});
  }
  if (real_poles.size() % 2 != 0 ||
      static_cast<int>(sos.sections.size()) != order) {
    throw NumericError("unexpected pole layout in bandpass design");
  }

  const double g = gain.real();
  const double per_section =
      std::pow(std::abs(g), 1.0 / static_cast<double>(sos.sections.size()));
  for (std::size_t i = 0; i < sos.sections.size(); ++i) {
    double scale = per_section;
    if (i == 0 && g < 0) scale = -scale;
    for (int j = 0; j < 3; ++j) sos.sections[i][j] *= scale;
  }
  if (sos.MaxPoleRadius() >= 1.0) {
    throw NumericError("bandpass design produced an unstable section");
  }
  return sos;
}

std::vector<double> FilterSignal(const FilterSOS& filter,
                                 const std::vector<double>& x) {
  // Poles near z = 1 amplify roundoff in the state update, so the state is
  // carried in extended precision.
  using Acc = long double;
  std::vector<double> y = x;
  for (const Biquad& s : filter.sections) {
    const Acc b0 = s[0], b1 = s[1], b2 = s[2], a1 = s[4], a2 = s[5];
    Acc z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const Acc in = v;
      const Acc out = b0 * in + z1;
      z1 = b1 * in - a1 * out + z2;
      z2 = b2 * in - a2 * out;
      v = static_cast<double>(out);
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw NumericError("filter output is not finite");
  }
  return y;
}

RawRecording ApplyFilter(const FilterSOS& filter, const RawRecording& rec) {
  if (rec.length() == 0) throw DataError("recording has no samples");
  RawRecording out{Matrix(rec.channel_count(), rec.length()),
                   rec.sample_rate_hz};
  std::vector<double> channel(rec.length());
  for (std::size_t c = 0; c < rec.channel_count(); ++c) {
    auto src = rec.samples.row(c);
    std::copy(src.begin(), src.end(), channel.begin());
    const std::vector<double> y = FilterSignal(filter, channel);
    std::copy(y.begin(), y.end(), out.samples.row(c).begin());
  }
  return out;
}

Matrix CommonAverageReference(const Matrix& x) {
  if (x.rows() < 2) {
    throw ParameterError("common average reference needs >= 2 channels");
  }
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t c = 0; c < x.rows(); ++c) {
    auto row = x.row(c);
    for (std::size_t t = 0; t < x.cols(); ++t) mean[t] += row[t];
  }
  const double inv = 1.0 / static_cast<double>(x.rows());
  for (double& m : mean) m *= inv;
  Matrix out = x;
  for (std::size_t c = 0; c < x.rows(); ++c) {
    auto row = out.row(c);
    for (std::size_t t = 0; t < x.cols(); ++t) row[t] -= mean[t];
  }
  return out;
}

FeatureMatrix BinAverage(const Matrix& x, int bin, double sample_rate_hz) {
  if (bin < 1) throw ParameterError("bin size must be >= 1");
  if (x.cols() < static_cast<std::size_t>(bin)) {
    throw DataError("recording shorter than one bin");
  }
  const std::size_t frames = x.cols() / bin;
  FeatureMatrix out{Matrix(frames, x.rows()), sample_rate_hz / bin};
  for (std::size_t c = 0; c < x.rows(); ++c) {
    auto row = x.row(c);
    for (std::size_t t = 0; t < frames; ++t) {
      double sum = 0.0;
      const std::size_t start = t * bin;
      for (int k = 0; k < bin; ++k) sum += row[start + k];
      out.values(t, c) = sum / bin;
    }
  }
  return out;
}

SessionStats ComputeSessionStats(const std::vector<FeatureMatrix>& frames) {
  if (frames.empty()) throw DataError("session has no trials");
  const std::size_t channels = frames.front().channel_count();
  SessionStats stats{std::vector<double>(channels, 0.0),
                     std::vector<double>(channels, 0.0)};
  std::size_t count = 0;
  for (const auto& f : frames) {
    if (f.channel_count() != channels) {
      throw DataError("inconsistent channel count within session");
    }
    for (std::size_t t = 0; t < f.frames(); ++t) {
      for (std::size_t c = 0; c < channels; ++c) {
        stats.mean[c] += f.values(t, c);
      }
    }
    count += f.frames();
  }
  if (count == 0) throw DataError("session has no frames");
  for (double& m : stats.mean) m /= static_cast<double>(count);
  for (const auto& f : frames) {
    for (std::size_t t = 0; t < f.frames(); ++t) {
      for (std::size_t c = 0; c < channels; ++c) {
        const double d = f.values(t, c) - stats.mean[c];
        stats.std[c] += d * d;
      }
    }
  }
  for (double& s : stats.std) s = std::sqrt(s / static_cast<double>(count));
  return stats;
}

FeatureMatrix ZScore(const FeatureMatrix& frame, const SessionStats& stats,
                     double eps) {
  if (stats.mean.size() != frame.channel_count() ||
      stats.std.size() != frame.channel_count()) {
    throw DataError("session stats do not match channel count");
  }
  FeatureMatrix out = frame;
  for (std::size_t t = 0; t < frame.frames(); ++t) {
    auto row = out.values.row(t);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = (row[c] - stats.mean[c]) / std::max(stats.std[c], eps);
    }
  }
  return out;
}

FeatureMatrix ExtractFeatures(const RawRecording& rec,
                              const PipelineConfig& cfg) {
  const int bin = BinSize(rec.sample_rate_hz, cfg.frame_rate_hz);
  const FilterSOS filter = DesignBandpass(cfg.filter_order, cfg.low_hz,
                                          cfg.high_hz, rec.sample_rate_hz);
  const RawRecording filtered = ApplyFilter(filter, rec);
  const Matrix car = CommonAverageReference(filtered.samples);
  return BinAverage(car, bin, rec.sample_rate_hz);
}

FeatureMatrix Preprocess(const RawRecording& rec,
                         const std::optional<SessionStats>& stats,
                         const PipelineConfig& cfg) {
  FeatureMatrix binned = ExtractFeatures(rec, cfg);
  const SessionStats own =
      stats ? *stats : ComputeSessionStats({binned});
  return ZScore(binned, own, cfg.zscore_eps);
}

}  // namespace phonodec
