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

#include "phonodec/acoustic_model.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "phonodec/errors.h"
#include "phonodec/math_util.h"
#include "phonodec/parallel.h"

namespace phonodec {
namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double Swish(double x) { return x * Sigmoid(x); }
double Gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

template <typename F>
void ApplyInPlace(Matrix* m, F f) {
  for (double& v : m->data()) v = f(v);
}

void CheckFinite(const Matrix& m, const std::string& layer) {
  if (!m.AllFinite()) {
    throw NumericError("non-finite activation in " + layer);
  }
}

// y = x W^T + b with W stored [out, in].
Matrix Linear(const Matrix& x, const Tensor& w, const Tensor* b) {
  const std::size_t out = static_cast<std::size_t>(w.dim(0));
  const std::size_t in = static_cast<std::size_t>(w.dim(1));
  if (x.cols() != in) {
    throw ParameterError("linear input width " + std::to_string(x.cols()) +
                         " does not match weight " + ShapeString(w.shape));
  }
  Matrix y(x.rows(), out);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const double* xr = x.row(t).data();
    for (std::size_t o = 0; o < out; ++o) {
      const double* wr = w.data.data() + o * in;
      double acc = b ? (*b)[o] : 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
      y(t, o) = acc;
    }
  }
  return y;
}

// Conv1d over time. Weight [out, in, k]; output length
// (T + 2 pad - dilation (k - 1) - 1) / stride + 1.
Matrix Conv1d(const Matrix& x, const Tensor& w, const Tensor& b, int stride,
              int dilation, int pad) {
  const int out = w.dim(0), in = w.dim(1), k = w.dim(2);
  if (static_cast<int>(x.cols()) != in) {
    throw ParameterError("conv input width mismatch");
  }
  const int len = static_cast<int>(x.rows());
  const int out_len = (len + 2 * pad - dilation * (k - 1) - 1) / stride + 1;
  // Reorder to [out, k, in] so the inner loop runs over contiguous memory.
  std::vector<double> wt(w.numel());
  for (int o = 0; o < out; ++o) {
    for (int i = 0; i < in; ++i) {
      for (int j = 0; j < k; ++j) {
        wt[(static_cast<std::size_t>(o) * k + j) * in + i] =
            w[(static_cast<std::size_t>(o) * in + i) * k + j];
      }
    }
  }
  Matrix y(static_cast<std::size_t>(std::max(out_len, 0)),
           static_cast<std::size_t>(out));
  for (int t = 0; t < out_len; ++t) {
    for (int o = 0; o < out; ++o) {
      double acc = b[static_cast<std::size_t>(o)];
      for (int j = 0; j < k; ++j) {
        const int src = t * stride + j * dilation - pad;
        if (src < 0 || src >= len) continue;
        const double* xr = x.row(static_cast<std::size_t>(src)).data();
        const double* wr = wt.data() + (static_cast<std::size_t>(o) * k + j) * in;
        for (int i = 0; i < in; ++i) acc += wr[i] * xr[i];
      }
      y(static_cast<std::size_t>(t), static_cast<std::size_t>(o)) = acc;
    }
  }
  return y;
}

Matrix AddScaled(const Matrix& x, const Matrix& delta, double scale) {
  Matrix y = x;
  for (std::size_t i = 0; i < y.data().size(); ++i) {
    y.data()[i] += scale * delta.data()[i];
  }
  return y;
}

std::string BlockName(int layer) {
  return "blocks." + std::to_string(layer) + ".";
}

Matrix FeedForward(const ModelParams& p, const std::string& pre,
                   const Matrix& x) {
  Matrix h = Linear(x, p.at(pre + "w1"), &p.at(pre + "b1"));
  ApplyInPlace(&h, Swish);
  return Linear(h, p.at(pre + "w2"), &p.at(pre + "b2"));
}

Matrix GroupNorm(const Matrix& x, int groups, const Tensor& gamma,
                 const Tensor& beta, double eps = 1e-5) {
  const std::size_t channels = x.cols();
  const std::size_t per = channels / static_cast<std::size_t>(groups);
  Matrix y(x.rows(), channels);
  for (int g = 0; g < groups; ++g) {
    const std::size_t c0 = static_cast<std::size_t>(g) * per;
    double sum = 0.0;
    for (std::size_t t = 0; t < x.rows(); ++t) {
      for (std::size_t c = c0; c < c0 + per; ++c) sum += x(t, c);
    }
    const double n = static_cast<double>(per * x.rows());
    const double mean = sum / n;
    double sq = 0.0;
    for (std::size_t t = 0; t < x.rows(); ++t) {
      for (std::size_t c = c0; c < c0 + per; ++c) {
        sq += (x(t, c) - mean) * (x(t, c) - mean);
      }
    }
    const double inv = 1.0 / std::sqrt(sq / n + eps);
    for (std::size_t t = 0; t < x.rows(); ++t) {
      for (std::size_t c = c0; c < c0 + per; ++c) {
        y(t, c) = (x(t, c) - mean) * inv * gamma[c] + beta[c];
      }
    }
  }
  return y;
}

Matrix ConvModule(const ModelParams& p, const ModelConfig& cfg,
                  const std::string& pre, const Matrix& x) {
  const std::size_t d = static_cast<std::size_t>(cfg.d_model);
  const Matrix expanded =
      Linear(x, p.at(pre + "pw1.weight"), &p.at(pre + "pw1.bias"));
  Matrix gated(x.rows(), d);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      gated(t, c) = expanded(t, c) * Sigmoid(expanded(t, c + d));
    }
  }
  const Tensor& dw = p.at(pre + "dw.weight");
  const Tensor& dwb = p.at(pre + "dw.bias");
  const int k = cfg.conv_kernel;
  const int half = (k - 1) / 2;
  const int len = static_cast<int>(x.rows());
  Matrix depth(x.rows(), d);
  for (int t = 0; t < len; ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      double acc = dwb[c];
      for (int j = 0; j < k; ++j) {
        const int src = t + j - half;
        if (src < 0 || src >= len) continue;
        acc += dw[c * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)] *
               gated(static_cast<std::size_t>(src), c);
      }
      depth(static_cast<std::size_t>(t), c) = acc;
    }
  }
  Matrix normed = GroupNorm(depth, cfg.groupnorm_groups, p.at(pre + "gn.gamma"),
                            p.at(pre + "gn.beta"));
  ApplyInPlace(&normed, Swish);
  return Linear(normed, p.at(pre + "pw2.weight"), &p.at(pre + "pw2.bias"));
}

Matrix Attention(const ModelParams& p, const ModelConfig& cfg,
                 const std::string& pre, const Matrix& x,
                 std::vector<Matrix>* weights_out) {
  const Matrix q = Linear(x, p.at(pre + "w_q"), nullptr);
  const Matrix k = Linear(x, p.at(pre + "w_k"), nullptr);
  const Matrix v = Linear(x, p.at(pre + "w_v"), nullptr);
  const std::size_t len = x.rows();
  const std::size_t hd = static_cast<std::size_t>(cfg.head_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  Matrix context(len, static_cast<std::size_t>(cfg.num_heads) * hd);
  for (int h = 0; h < cfg.num_heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * hd;
    Matrix attn(len, len);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t s = 0; s < len; ++s) {
        double dot = 0.0;
        for (std::size_t i = 0; i < hd; ++i) dot += q(t, off + i) * k(s, off + i);
        attn(t, s) = dot * scale;
      }
      LogSoftmaxInPlace(attn.row(t));
      for (double& a : attn.row(t)) a = std::exp(a);
      for (std::size_t s = 0; s < len; ++s) {
        const double a = attn(t, s);
        for (std::size_t i = 0; i < hd; ++i) context(t, off + i) += a * v(s, off + i);
      }
    }
    if (weights_out) weights_out->push_back(std::move(attn));
  }
  if (weights_out) return {};
  return Linear(context, p.at(pre + "w_o"), nullptr);
}

std::span<const double> Gamma(const ModelParams& p, const std::string& name) {
  return p.at(name).data;
}

}  // namespace

void ModelConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ParameterError("invalid model config: " + what);
  };
  require(input_dim > 0 && d_model > 0 && num_layers >= 0 && num_heads > 0 &&
              head_dim > 0 && ff_expansion > 0 && prenet_gru_hidden > 0 &&
              groupnorm_groups > 0,
          "dimensions must be positive");
  require(d_model == num_heads * head_dim, "d_model != num_heads * head_dim");
  require(conv_kernel > 0 && conv_kernel % 2 == 1, "conv_kernel must be odd");
  require(prenet_kernel > 0 && prenet_kernel % 2 == 1,
          "prenet_kernel must be odd");
  require(d_model % groupnorm_groups == 0,
          "groupnorm_groups must divide d_model");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(vocab_size >= 2, "vocab_size must be >= 2");
}

void ModelParams::Add(const std::string& name, Tensor tensor) {
  if (!tensors_.emplace(name, std::move(tensor)).second) {
    throw DataError("duplicate parameter " + name);
  }
  order_.push_back(name);
}

bool ModelParams::Contains(const std::string& name) const {
  return tensors_.count(name) != 0;
}

const Tensor& ModelParams::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw DataError("missing parameter " + name);
  return it->second;
}

Tensor& ModelParams::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw DataError("missing parameter " + name);
  return it->second;
}

std::size_t ModelParams::TotalSize() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.numel();
  return n;
}

std::vector<ParamSpec> ParamSpecs(const ModelConfig& cfg) {
  cfg.Validate();
  const int in = cfg.input_dim, d = cfg.d_model, h = cfg.prenet_gru_hidden;
  const int f = cfg.ff_expansion * d, k = cfg.conv_kernel;
  const int pk = cfg.prenet_kernel, v = cfg.vocab_size;
  std::vector<ParamSpec> specs;
  auto weight = [&](std::string name, Shape shape, int fan_in) {
    specs.push_back({std::move(name), std::move(shape), ParamKind::kWeight, fan_in});
  };
  auto bias = [&](std::string name, int n) {
    specs.push_back({std::move(name), {n}, ParamKind::kBias, 0});
  };
  auto gain = [&](std::string name, int n) {
    specs.push_back({std::move(name), {n}, ParamKind::kGain, 0});
  };

  for (const char* conv : {"1", "2"}) {
    const std::string pre = std::string("prenet.conv") + conv;
    weight(pre + ".weight", {in, in, pk}, in * pk);
    bias(pre + ".bias", in);
    gain(std::string("prenet.norm") + conv + ".gamma", in);
  }
  for (const char* dir : {"fwd", "bwd"}) {
    const std::string pre = std::string("prenet.gru.") + dir + ".";
    for (const char* gate : {"z", "r", "h"}) {
      weight(pre + "W_" + gate, {h, in}, in);
      weight(pre + "U_" + gate, {h, h}, h);
      bias(pre + "b_" + gate, h);
    }
  }
  weight("prenet.proj.weight", {d, 2 * h}, 2 * h);
  bias("prenet.proj.bias", d);

  for (const char* conv : {"1", "2", "3"}) {
    const std::string pre = std::string("subsample.conv") + conv;
    weight(pre + ".weight", {d, d, 3}, d * 3);
    bias(pre + ".bias", d);
  }

  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    const std::string pre = BlockName(layer);
    auto ffn = [&](const std::string& name) {
      gain(pre + "norm_" + name + ".gamma", d);
      weight(pre + name + ".w1", {f, d}, d);
      bias(pre + name + ".b1", f);
      weight(pre + name + ".w2", {d, f}, f);
      bias(pre + name + ".b2", d);
    };
    ffn("ff1");
    gain(pre + "norm_mhsa.gamma", d);
    for (const char* proj : {"w_q", "w_k", "w_v", "w_o"}) {
      weight(pre + "mhsa." + proj, {d, d}, d);
    }
    gain(pre + "norm_conv.gamma", d);
    weight(pre + "conv.pw1.weight", {2 * d, d}, d);
    bias(pre + "conv.pw1.bias", 2 * d);
    weight(pre + "conv.dw.weight", {d, k}, k);
    bias(pre + "conv.dw.bias", d);
    gain(pre + "conv.gn.gamma", d);
    bias(pre + "conv.gn.beta", d);
    weight(pre + "conv.pw2.weight", {d, d}, d);
    bias(pre + "conv.pw2.bias", d);
    ffn("ff2");
  }
  gain("final_norm.gamma", d);
  weight("out.weight", {v, d}, d);
  bias("out.bias", v);
  return specs;
}

ModelParams InitParams(const ModelConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  ModelParams params;
  for (const ParamSpec& spec : ParamSpecs(cfg)) {
    Tensor t(spec.shape, spec.kind == ParamKind::kGain ? 1.0 : 0.0);
    if (spec.kind == ParamKind::kWeight) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
      for (double& w : t.data) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        w = (2.0 * u - 1.0) * bound;
      }
    }
    params.Add(spec.name, std::move(t));
  }
  return params;
}

ModelParams ZeroParams(const ModelConfig& cfg) {
  ModelParams params;
  for (const ParamSpec& spec : ParamSpecs(cfg)) {
    params.Add(spec.name,
               Tensor(spec.shape, spec.kind == ParamKind::kGain ? 1.0 : 0.0));
  }
  return params;
}

std::int64_t ParamCount(const ModelConfig& cfg) {
  cfg.Validate();
  const std::int64_t in = cfg.input_dim, d = cfg.d_model;
  const std::int64_t h = cfg.prenet_gru_hidden, f = cfg.ff_expansion * d;
  const std::int64_t k = cfg.conv_kernel, pk = cfg.prenet_kernel;
  const std::int64_t v = cfg.vocab_size;
  const std::int64_t prenet = 2 * (in * in * pk + in + in) +
                              2 * 3 * (h * in + h * h + h) + d * 2 * h + d;
  const std::int64_t subsample = 3 * (d * d * 3 + d);
  const std::int64_t ffn = d + f * d + f + d * f + d;
  const std::int64_t mhsa = d + 4 * d * d;
  const std::int64_t conv =
      d + 2 * d * d + 2 * d + d * k + d + 2 * d + d * d + d;
  const std::int64_t block = 2 * ffn + mhsa + conv;
  return prenet + subsample + cfg.num_layers * block + d + v * d + v;
}

void CheckParams(const ModelParams& params, const ModelConfig& cfg) {
  const std::vector<ParamSpec> specs = ParamSpecs(cfg);
  for (const ParamSpec& spec : specs) {
    if (!params.Contains(spec.name)) {
      throw DataError("missing parameter " + spec.name);
    }
    const Tensor& t = params.at(spec.name);
    if (t.shape != spec.shape) {
      throw DataError("parameter " + spec.name + " has shape " +
                      ShapeString(t.shape) + ", expected " +
                      ShapeString(spec.shape));
    }
  }
  if (params.size() != specs.size()) {
    throw DataError("parameter file has " + std::to_string(params.size()) +
                    " tensors, config defines " + std::to_string(specs.size()));
  }
}

Matrix RmsNorm(const Matrix& x, std::span<const double> gamma, double eps) {
  if (gamma.size() != x.cols()) {
    throw ParameterError("rmsnorm gain length does not match input width");
  }
  Matrix y(x.rows(), x.cols());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    double sq = 0.0;
    for (double v : x.row(t)) sq += v * v;
    const double inv =
        1.0 / std::sqrt(sq / static_cast<double>(x.cols()) + eps);
    for (std::size_t c = 0; c < x.cols(); ++c) y(t, c) = x(t, c) * inv * gamma[c];
  }
  return y;
}

int SubsampledLength(int frames) {
  for (int i = 0; i < 3; ++i) frames = (frames + 1) / 2;
  return frames;
}

Matrix GruForward(const ModelParams& params, const std::string& prefix,
                  const Matrix& x, bool reverse) {
  const Tensor& uz = params.at(prefix + "U_z");
  const Tensor& ur = params.at(prefix + "U_r");
  const Tensor& uh = params.at(prefix + "U_h");
  const Matrix xz = Linear(x, params.at(prefix + "W_z"), &params.at(prefix + "b_z"));
  const Matrix xr = Linear(x, params.at(prefix + "W_r"), &params.at(prefix + "b_r"));
  const Matrix xh = Linear(x, params.at(prefix + "W_h"), &params.at(prefix + "b_h"));
  const std::size_t hidden = static_cast<std::size_t>(uz.dim(0));
  const std::size_t len = x.rows();
  Matrix out(len, hidden);
  std::vector<double> h(hidden, 0.0), z(hidden), rh(hidden);
  for (std::size_t step = 0; step < len; ++step) {
    const std::size_t t = reverse ? len - 1 - step : step;
    for (std::size_t j = 0; j < hidden; ++j) {
      double az = xz(t, j), ar = xr(t, j);
      for (std::size_t i = 0; i < hidden; ++i) {
        az += uz[j * hidden + i] * h[i];
        ar += ur[j * hidden + i] * h[i];
      }
      z[j] = Sigmoid(az);
      rh[j] = Sigmoid(ar) * h[j];
    }
    for (std::size_t j = 0; j < hidden; ++j) {
      double ah = xh(t, j);
      for (std::size_t i = 0; i < hidden; ++i) ah += uh[j * hidden + i] * rh[i];
      out(t, j) = (1.0 - z[j]) * h[j] + z[j] * std::tanh(ah);
    }
    for (std::size_t j = 0; j < hidden; ++j) h[j] = out(t, j);
  }
  return out;
}

Matrix PrenetForward(const ModelParams& params, const ModelConfig& cfg,
                     const Matrix& x) {
  if (x.rows() == 0) throw DataError("prenet input has no frames");
  const int pad = (cfg.prenet_kernel - 1) / 2;
  Matrix h = Conv1d(x, params.at("prenet.conv1.weight"),
                    params.at("prenet.conv1.bias"), 1, 1, pad);
  h = RmsNorm(h, Gamma(params, "prenet.norm1.gamma"));
  ApplyInPlace(&h, [](double v) { return std::max(v, 0.0); });
  h = Conv1d(h, params.at("prenet.conv2.weight"),
             params.at("prenet.conv2.bias"), 1, 2, 2 * pad);
  h = RmsNorm(h, Gamma(params, "prenet.norm2.gamma"));
  ApplyInPlace(&h, [](double v) { return std::max(v, 0.0); });

  const Matrix fwd = GruForward(params, "prenet.gru.fwd.", h, false);
  const Matrix bwd = GruForward(params, "prenet.gru.bwd.", h, true);
  Matrix both(h.rows(), fwd.cols() + bwd.cols());
  for (std::size_t t = 0; t < h.rows(); ++t) {
    std::copy(fwd.row(t).begin(), fwd.row(t).end(), both.row(t).begin());
    std::copy(bwd.row(t).begin(), bwd.row(t).end(),
              both.row(t).begin() + static_cast<std::ptrdiff_t>(fwd.cols()));
  }
  return Linear(both, params.at("prenet.proj.weight"),
                &params.at("prenet.proj.bias"));
}

Matrix SubsampleForward(const ModelParams& params, const ModelConfig&,
                        const Matrix& x) {
  if (x.rows() == 0) throw DataError("subsampler input has no frames");
  Matrix h = x;
  for (const char* conv : {"1", "2", "3"}) {
    const std::string pre = std::string("subsample.conv") + conv;
    h = Conv1d(h, params.at(pre + ".weight"), params.at(pre + ".bias"), 2, 1, 1);
    ApplyInPlace(&h, Gelu);
  }
  return h;
}

Matrix SinusoidalPositions(int frames, int d_model) {
  Matrix pe(static_cast<std::size_t>(frames), static_cast<std::size_t>(d_model));
  for (int t = 0; t < frames; ++t) {
    for (int i = 0; i < d_model; i += 2) {
      const double angle =
          t / std::pow(10000.0, static_cast<double>(i) / d_model);
      pe(t, i) = std::sin(angle);
      if (i + 1 < d_model) pe(t, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

std::vector<Matrix> AttentionWeights(const ModelParams& params,
                                     const ModelConfig& cfg, int layer,
                                     const Matrix& x) {
  const std::string pre = BlockName(layer);
  std::vector<Matrix> weights;
  Attention(params, cfg, pre + "mhsa.",
            RmsNorm(x, Gamma(params, pre + "norm_mhsa.gamma")), &weights);
  return weights;
}

Matrix ConformerBlockForward(const ModelParams& params,
                             const ModelConfig& cfg, int layer,
                             const Matrix& x) {
  const std::string pre = BlockName(layer);
  Matrix y = AddScaled(
      x,
      FeedForward(params, pre + "ff1.",
                  RmsNorm(x, Gamma(params, pre + "norm_ff1.gamma"))),
      0.5);
  y = AddScaled(y,
                Attention(params, cfg, pre + "mhsa.",
                          RmsNorm(y, Gamma(params, pre + "norm_mhsa.gamma")),
                          nullptr),
                1.0);
  y = AddScaled(y,
                ConvModule(params, cfg, pre + "conv.",
                           RmsNorm(y, Gamma(params, pre + "norm_conv.gamma"))),
                1.0);
  return AddScaled(
      y,
      FeedForward(params, pre + "ff2.",
                  RmsNorm(y, Gamma(params, pre + "norm_ff2.gamma"))),
      0.5);
}

LogProbMatrix SequenceForward(const ModelParams& params,
                              const ModelConfig& cfg, const Matrix& features) {
  if (features.cols() != static_cast<std::size_t>(cfg.input_dim)) {
    throw DataError("feature width " + std::to_string(features.cols()) +
                    " does not match model input_dim " +
                    std::to_string(cfg.input_dim));
  }
  if (!features.AllFinite()) throw DataError("features contain non-finite values");
  Matrix h = PrenetForward(params, cfg, features);
  CheckFinite(h, "prenet");
  h = SubsampleForward(params, cfg, h);
  CheckFinite(h, "subsample");
  h = AddScaled(h, SinusoidalPositions(static_cast<int>(h.rows()), cfg.d_model),
                1.0);
  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    h = ConformerBlockForward(params, cfg, layer, h);
    CheckFinite(h, "blocks." + std::to_string(layer));
  }
  h = RmsNorm(h, Gamma(params, "final_norm.gamma"));
  LogProbMatrix out{Linear(h, params.at("out.weight"), &params.at("out.bias"))};
  CheckFinite(out.frames, "out");
  for (std::size_t t = 0; t < out.frames.rows(); ++t) {
    LogSoftmaxInPlace(out.frames.row(t));
  }
  CheckFinite(out.frames, "log_softmax");
  return out;
}

namespace {

Matrix BatchItem(const Tensor& x, int b, int frames) {
  const std::size_t len = static_cast<std::size_t>(x.dim(1));
  const std::size_t width = static_cast<std::size_t>(x.dim(2));
  const auto first = x.data.begin() +
                     static_cast<std::ptrdiff_t>(static_cast<std::size_t>(b) * len * width);
  return Matrix(static_cast<std::size_t>(frames), width,
                std::vector<double>(first, first + static_cast<std::ptrdiff_t>(
                                                       static_cast<std::size_t>(frames) * width)));
}

void CheckBatch(const Tensor& x) {
  if (x.rank() != 3) {
    throw DataError("expected a [B,T,C] tensor, got " + ShapeString(x.shape));
  }
}

Tensor Stack(const std::vector<Matrix>& items) {
  const int rows = items.empty() ? 0 : static_cast<int>(items[0].rows());
  const int cols = items.empty() ? 0 : static_cast<int>(items[0].cols());
  Tensor out({static_cast<int>(items.size()), rows, cols});
  auto it = out.data.begin();
  for (const Matrix& m : items) it = std::copy(m.data().begin(), m.data().end(), it);
  return out;
}

}  // namespace

ModelOutput ModelForward(const ModelParams& params, const ModelConfig& cfg,
                         const Tensor& features, std::span<const int> lengths,
                         int jobs) {
  CheckBatch(features);
  const int batch = features.dim(0), frames = features.dim(1);
  if (lengths.size() != static_cast<std::size_t>(batch)) {
    throw DataError("got " + std::to_string(lengths.size()) +
                    " lengths for a batch of " + std::to_string(batch));
  }
  for (int len : lengths) {
    if (len < 1 || len > frames) {
      throw DataError("sequence length " + std::to_string(len) +
                      " outside [1, " + std::to_string(frames) + "]");
    }
  }
  ModelOutput out;
  out.log_probs.resize(static_cast<std::size_t>(batch));
  for (int len : lengths) out.lengths.push_back(SubsampledLength(len));
  ParallelFor(static_cast<std::size_t>(batch), jobs, [&](std::size_t b) {
    out.log_probs[b] = SequenceForward(
        params, cfg, BatchItem(features, static_cast<int>(b), lengths[b]));
  });
  return out;
}

Tensor PrenetForward(const ModelParams& params, const ModelConfig& cfg,
                     const Tensor& x) {
  CheckBatch(x);
  std::vector<Matrix> items;
  for (int b = 0; b < x.dim(0); ++b) {
    items.push_back(PrenetForward(params, cfg, BatchItem(x, b, x.dim(1))));
  }
  return Stack(items);
}

Tensor SubsampleForward(const ModelParams& params, const ModelConfig& cfg,
                        const Tensor& x, std::vector<int>* lengths) {
  CheckBatch(x);
  std::vector<Matrix> items;
  for (int b = 0; b < x.dim(0); ++b) {
    items.push_back(SubsampleForward(params, cfg, BatchItem(x, b, x.dim(1))));
  }
  if (lengths) lengths->assign(static_cast<std::size_t>(x.dim(0)),
                               SubsampledLength(x.dim(1)));
  return Stack(items);
}

}  // namespace phonodec
