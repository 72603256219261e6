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

#include "phonodec/sweep.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "phonodec/errors.h"
#include "phonodec/metrics.h"
#include "phonodec/parallel.h"

namespace phonodec {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <typename T>
std::vector<T> ListField(const nlohmann::json& j, const char* key,
                         std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<std::vector<T>>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string("sweep field ") + key + " must be a number list");
  }
}

}  // namespace

void SweepSpec::Validate() const {
  if (beam_values.empty() || lm_weights.empty() || length_alphas.empty()) {
    throw ParameterError("sweep value lists must be non-empty");
  }
  for (int b : beam_values) {
    if (b < 1) throw ParameterError("sweep beam values must be >= 1");
  }
  for (double w : lm_weights) {
    if (!(w >= 0.0)) throw ParameterError("sweep lm weights must be >= 0");
  }
  for (double a : length_alphas) {
    if (!(a > 0.0 && a <= 2.0)) {
      throw ParameterError("sweep length alphas must lie in (0, 2]");
    }
  }
  if (mode == SweepMode::kRandom) {
    const std::size_t space =
        std::set<int>(beam_values.begin(), beam_values.end()).size() *
        std::set<double>(lm_weights.begin(), lm_weights.end()).size() *
        std::set<double>(length_alphas.begin(), length_alphas.end()).size();
    if (n_random < 1) throw ParameterError("random sweep needs n_random >= 1");
    if (static_cast<std::size_t>(n_random) > space) {
      throw ParameterError("n_random exceeds the number of distinct points");
    }
  }
}

SweepSpec ParseSweepSpec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("sweep spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("sweep spec must be a JSON object");
  SweepSpec spec;
  spec.beam_values = ListField<int>(j, "beam_values", spec.beam_values);
  spec.lm_weights = ListField<double>(j, "lm_weights", spec.lm_weights);
  spec.length_alphas = ListField<double>(j, "length_alphas", spec.length_alphas);
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "grid") {
      spec.mode = SweepMode::kGrid;
    } else if (mode == "random") {
      spec.mode = SweepMode::kRandom;
    } else {
      throw DataError("sweep mode must be grid or random, got " + mode);
    }
  }
  if (j.contains("n_random")) spec.n_random = j.at("n_random").get<int>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  spec.Validate();
  return spec;
}

SweepSpec LoadSweepSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sweep spec " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseSweepSpec(ss.str());
}

std::vector<SweepPoint> EnumerateSweep(const SweepSpec& spec) {
  spec.Validate();
  std::vector<SweepPoint> points;
  if (spec.mode == SweepMode::kGrid) {
    for (int b : spec.beam_values) {
      for (double w : spec.lm_weights) {
        for (double a : spec.length_alphas) points.push_back({b, w, a});
      }
    }
    return points;
  }
  std::mt19937_64 gen(spec.seed);
  auto pick = [&gen](std::size_t n) {
    return static_cast<std::size_t>(gen() % n);
  };
  std::set<std::tuple<int, double, double>> seen;
  while (points.size() < static_cast<std::size_t>(spec.n_random)) {
    const SweepPoint p{spec.beam_values[pick(spec.beam_values.size())],
                       spec.lm_weights[pick(spec.lm_weights.size())],
                       spec.length_alphas[pick(spec.length_alphas.size())]};
    if (seen.emplace(p.beam, p.lm_weight, p.length_alpha).second) {
      points.push_back(p);
    }
  }
  return points;
}

bool SweepRowBefore(const SweepRow& a, const SweepRow& b) {
  if (a.failed != b.failed) return !a.failed;
  if (!a.failed && a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  return std::tie(a.point.beam, a.point.lm_weight, a.point.length_alpha) <
         std::tie(b.point.beam, b.point.lm_weight, b.point.length_alpha);
}

std::vector<SweepRow> RunSweep(const SweepSpec& spec, const EvalSet& eval,
                               const ContextGraph& graph,
                               const SweepOptions& options) {
  if (eval.logits.empty()) throw DataError("sweep needs a non-empty eval set");
  if (eval.logits.size() != eval.references.size()) {
    throw DataError("eval set has " + std::to_string(eval.logits.size()) +
                    " logit matrices but " +
                    std::to_string(eval.references.size()) + " references");
  }
  const std::vector<SweepPoint> points = EnumerateSweep(spec);
  std::vector<SweepRow> rows(points.size());
  ParallelFor(points.size(), options.jobs, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.point = points[i];
    BeamConfig cfg;
    cfg.beam_width = points[i].beam;
    cfg.lm_weight = points[i].lm_weight;
    cfg.length_alpha = points[i].length_alpha;
    cfg.nbest = 1;
    try {
      std::vector<Alignment> alignments;
      double total_ms = 0.0;
      for (std::size_t t = 0; t < eval.logits.size(); ++t) {
        const auto start = std::chrono::steady_clock::now();
        const std::vector<ScoredSequence> hyps =
            BeamSearch(eval.logits[t], graph, cfg);
        total_ms += std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        alignments.push_back(
            Align(eval.references[t], hyps.empty() ? TokenSeq{} : hyps[0].ids));
      }
      const ErrorRates rates = ComputeErrorRates(alignments);
      row.per = rates.per;
      row.accuracy = rates.accuracy;
      row.mean_latency_ms =
          options.deterministic ? 0.0 : total_ms / static_cast<double>(eval.logits.size());
    } catch (const Error& e) {
      row.failed = true;
      row.error = e.what();
    }
  });
  std::stable_sort(rows.begin(), rows.end(), SweepRowBefore);
  return rows;
}

std::vector<SweepRow> TopK(const std::vector<SweepRow>& rows, int k) {
  if (k < 1) throw ParameterError("top-k needs k >= 1");
  std::vector<SweepRow> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(), SweepRowBefore);
  if (sorted.size() > static_cast<std::size_t>(k)) sorted.resize(k);
  return sorted;
}

void WriteSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "beam,lm_weight,length_alpha,per,accuracy,mean_latency_ms\n";
  for (const SweepRow& r : rows) {
    out << r.point.beam << ',' << Num(r.point.lm_weight) << ','
        << Num(r.point.length_alpha) << ',';
    if (r.failed) {
      out << "nan,nan,nan\n";
    } else {
      out << Num(r.per) << ',' << Num(r.accuracy) << ','
          << Num(r.mean_latency_ms) << '\n';
    }
  }
}

}  // namespace phonodec
