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

#include "cli.h"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "phonodec/acoustic_model.h"
#include "phonodec/ctc.h"
#include "phonodec/errors.h"
#include "phonodec/formats.h"
#include "phonodec/metrics.h"
#include "phonodec/model_io.h"
#include "phonodec/ngram_lm.h"
#include "phonodec/parallel.h"
#include "phonodec/signal_pipeline.h"
#include "phonodec/sweep.h"
#include "phonodec/training_utils.h"
#include "phonodec/trigger.h"
#include "phonodec/vocab.h"
#include "phonodec/wfst_decoder.h"

namespace phonodec::cli {
namespace {

using ojson = nlohmann::ordered_json;

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

// Output is collected in memory and written once the command succeeded, so
// a failing command never leaves a partial file behind.
class Output {
 public:
  Output(std::string path, std::ostream& fallback)
      : path_(std::move(path)), fallback_(fallback) {}

  std::ostream& stream() { return buffer_; }
  bool to_stdout() const { return path_.empty() || path_ == "-"; }

  void Commit() {
    if (to_stdout()) {
      fallback_ << buffer_.str();
      return;
    }
    std::ofstream file(path_, std::ios::binary);
    if (!file) throw DataError("cannot open " + path_ + " for writing");
    file << buffer_.str();
    if (!file) throw DataError("failed writing " + path_);
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open " + path + " for writing");
  file << text;
}

double ElapsedMs(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

// ---------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string input, output;
  PipelineConfig pipeline;
  bool no_zscore = false;
  int jobs = 1;
};

int RunPreprocess(const PreprocessArgs& a, std::ostream& out) {
  std::ifstream in = OpenInput(a.input);
  const std::vector<RawTrial> raw = ReadRawTrials(in);
  if (raw.empty()) throw DataError("no trials in " + a.input);
  std::vector<FeatureTrial> trials(raw.size());
  ParallelFor(raw.size(), a.jobs, [&](std::size_t i) {
    trials[i].session = raw[i].session;
    trials[i].trial_id = raw[i].trial_id;
    trials[i].features = ExtractFeatures(raw[i].recording, a.pipeline);
  });
  if (!a.no_zscore) {
    std::map<std::string, std::vector<std::size_t>> sessions;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      sessions[trials[i].session].push_back(i);
    }
    for (const auto& [name, members] : sessions) {
      std::vector<FeatureMatrix> frames;
      for (std::size_t i : members) frames.push_back(trials[i].features);
      const SessionStats stats = ComputeSessionStats(frames);
      for (std::size_t i : members) {
        trials[i].features = ZScore(trials[i].features, stats, a.pipeline.zscore_eps);
      }
    }
  }
  Output output(a.output, out);
  for (const FeatureTrial& t : trials) WriteFeatureTrial(output.stream(), t);
  output.Commit();
  return 0;
}

// ------------------------------------------------------------------ lm-train

struct LmTrainArgs {
  std::string corpus, vocab, output;
  int order = 6;
  std::string discount = "modified";
  double fixed_discount = 0.75;
  bool no_boundaries = false;
};

int RunLmTrain(const LmTrainArgs& a, std::ostream& out) {
  const Vocabulary vocab = LoadVocab(a.vocab);
  const std::vector<TokenSeq> corpus = ReadCorpus(a.corpus, vocab);
  CountOptions count_opts;
  count_opts.order = a.order;
  count_opts.sentence_boundaries = !a.no_boundaries;
  KneserNeyOptions kn;
  kn.mode = a.discount == "fixed" ? DiscountMode::kFixed : DiscountMode::kModified;
  kn.fixed_discount = a.fixed_discount;
  NGramModel model =
      TrainKneserNey(CountNGrams(corpus, vocab.size(), count_opts), kn);
  model.SetSymbols(vocab);
  Output output(a.output, out);
  WriteArpa(model, output.stream());
  output.Commit();
  return 0;
}

// ---------------------------------------------------------------- model-init

struct ModelArgs {
  std::string model_config, vocab, params;
  std::uint64_t seed = 0;
};

ModelConfig ResolveConfig(const ModelArgs& a) {
  ModelConfig cfg = a.model_config.empty() ? ModelConfig{}
                                           : LoadModelConfig(a.model_config);
  if (!a.vocab.empty()) cfg.vocab_size = LoadVocab(a.vocab).size();
  cfg.Validate();
  return cfg;
}

struct ModelInitArgs {
  ModelArgs model;
  std::string output;
};

int RunModelInit(const ModelInitArgs& a, std::ostream& out) {
  const ModelConfig cfg = ResolveConfig(a.model);
  ojson report;
  report["param_count"] = ParamCount(cfg);
  report["tensors"] = ParamSpecs(cfg).size();
  if (!a.output.empty()) {
    const ModelParams params = InitParams(cfg, a.model.seed);
    std::ostringstream bytes;
    WriteParams(params, bytes);
    WriteTextFile(a.output, bytes.str());
    report["seed"] = a.model.seed;
  }
  out << report.dump() << '\n';
  return 0;
}

// ------------------------------------------------------------- model-forward

struct ModelForwardArgs {
  ModelArgs model;
  std::string input, output;
  int jobs = 1;
};

int RunModelForward(const ModelForwardArgs& a, std::ostream& out) {
  const ModelConfig cfg = ResolveConfig(a.model);
  std::ifstream in = OpenInput(a.input);
  const std::vector<FeatureTrial> trials = ReadFeatureTrials(in);
  if (trials.empty()) throw DataError("no trials in " + a.input);
  ModelParams params;
  if (!a.model.params.empty()) {
    params = ReadParams(a.model.params);
    CheckParams(params, cfg);
  } else {
    params = InitParams(cfg, a.model.seed);
  }
  std::vector<LogitTrial> logits(trials.size());
  ParallelFor(trials.size(), a.jobs, [&](std::size_t i) {
    logits[i].trial_id = trials[i].trial_id;
    logits[i].log_probs = SequenceForward(params, cfg, trials[i].features.values);
  });
  Output output(a.output, out);
  for (const LogitTrial& t : logits) WriteLogitTrial(output.stream(), t);
  output.Commit();
  return 0;
}

// ----------------------------------------------------------------- gradcheck

struct GradcheckArgs {
  std::uint64_t seed = 0;
  int instances = 20;
  int frames = 5;
  int vocab_size = 4;
  double step = 1e-6;
  double tolerance = 1e-6;
};

int RunGradcheck(const GradcheckArgs& a, std::ostream& out) {
  const GradCheckResult r =
      RunCtcGradCheck(a.seed, a.instances, a.frames, a.vocab_size, a.step);
  ojson j;
  j["seed"] = a.seed;
  j["instances"] = r.instances;
  j["frames"] = a.frames;
  j["vocab_size"] = a.vocab_size;
  j["max_abs_error"] = r.max_abs_error;
  j["max_rel_error"] = r.max_rel_error;
  j["max_entry_rel_error"] = r.max_entry_rel_error;
  j["pass"] = r.max_rel_error < a.tolerance;
  out << j.dump() << '\n';
  if (r.max_rel_error >= a.tolerance) {
    throw NumericError("gradient check failed: max relative error " +
                       std::to_string(r.max_rel_error));
  }
  return 0;
}

// ----------------------------------------------------------- augment-preview

struct AugmentArgs {
  std::string input, output;
  AugmentPolicy policy;
};

int RunAugmentPreview(const AugmentArgs& a, std::ostream& out) {
  std::ifstream in = OpenInput(a.input);
  const std::vector<FeatureTrial> trials = ReadFeatureTrials(in);
  if (trials.empty()) throw DataError("no trials in " + a.input);
  Output output(a.output, out);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    AugmentPolicy policy = a.policy;
    policy.seed = a.policy.seed + i;
    const AugmentResult r = SpecAugment(trials[i].features, policy);
    auto spans = [](const std::vector<MaskSpan>& masks) {
      ojson list = ojson::array();
      for (const MaskSpan& m : masks) list.push_back({m.start, m.width});
      return list;
    };
    ojson j;
    j["trial_id"] = trials[i].trial_id;
    j["time_masks"] = spans(r.time_masks);
    j["channel_masks"] = spans(r.channel_masks);
    ojson rows = ojson::array();
    for (std::size_t t = 0; t < r.features.values.rows(); ++t) {
      const auto row = r.features.values.row(t);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["features"] = std::move(rows);
    output.stream() << j.dump() << '\n';
  }
  output.Commit();
  return 0;
}

// -------------------------------------------------------------------- decode

struct DecodeArgs {
  std::string input, output, lm, vocab;
  std::string stage = "wfst";
  int beam = 128;
  double lm_weight = 1.0;
  double len_alpha = 0.9;
  double lm_beta = 0.8;
  int nbest = 10;
  int rescore_nbest = 0;
  int jobs = 1;
  bool deterministic = false;
};

NGramModel LoadLm(const std::string& path, const Vocabulary& vocab) {
  NGramModel lm = ReadArpa(path, &vocab);
  if (lm.vocab_size() != vocab.size()) {
    throw DataError("language model vocabulary size " +
                    std::to_string(lm.vocab_size()) + " differs from " +
                    std::to_string(vocab.size()));
  }
  return lm;
}

void CheckLogitWidth(const std::vector<LogitTrial>& trials, int vocab_size) {
  for (const LogitTrial& t : trials) {
    if (t.log_probs.num_frames() == 0) {
      throw DataError("trial " + t.trial_id + " has no frames");
    }
    if (t.log_probs.vocab_size() != vocab_size) {
      throw DataError("trial " + t.trial_id + " has " +
                      std::to_string(t.log_probs.vocab_size()) +
                      " classes, vocabulary has " + std::to_string(vocab_size));
    }
  }
}

int RunDecode(const DecodeArgs& a, std::ostream& out) {
  const Vocabulary vocab = LoadVocab(a.vocab);
  DecodeOptions opts;
  opts.stage = ParseDecodeStage(a.stage);
  opts.beam.beam_width = a.beam;
  opts.beam.lm_weight = a.lm_weight;
  opts.beam.length_alpha = a.len_alpha;
  opts.beam.nbest = a.nbest;
  opts.beam.Validate();
  opts.lm_beta = a.lm_beta;
  opts.rescore_nbest = a.rescore_nbest;
  if (!(a.lm_beta >= 0.0 && a.lm_beta <= 1.0)) {
    throw ParameterError("--lm-beta must lie in [0, 1]");
  }
  std::optional<NGramModel> lm;
  if (opts.stage != DecodeStage::kGreedy) {
    if (a.lm.empty()) throw ParameterError("--lm is required for this stage");
    lm.emplace(LoadLm(a.lm, vocab));
  }
  std::ifstream in = OpenInput(a.input);
  const std::vector<LogitTrial> trials = ReadLogitTrials(in);
  if (trials.empty()) throw DataError("no trials in " + a.input);
  CheckLogitWidth(trials, vocab.size());

  std::optional<ContextGraph> graph;
  if (lm) graph.emplace(*lm);
  std::vector<DecodeRecord> records(trials.size());
  ParallelFor(trials.size(), a.jobs, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const DecodeResult result = DecodeLogProbs(
        trials[i].log_probs, graph ? &*graph : nullptr, opts);
    const double ms = ElapsedMs(start);
    DecodeRecord& r = records[i];
    r.trial_id = trials[i].trial_id;
    r.best = result.best;
    r.best_symbols = Decode(vocab, result.best);
    r.score = result.score;
    r.nbest = result.nbest;
    r.stage = opts.stage;
    r.latency_ms = a.deterministic ? 0.0 : ms;
  });
  Output output(a.output, out);
  for (const DecodeRecord& r : records) WriteDecodeRecord(output.stream(), r);
  output.Commit();
  return 0;
}

// ---------------------------------------------------------------------- eval

struct EvalArgs {
  std::string hyp, ref, vocab, output, per_class, confusion;
};

int RunEval(const EvalArgs& a, std::ostream& out) {
  const Vocabulary vocab = LoadVocab(a.vocab);
  std::ifstream hyp_in = OpenInput(a.hyp);
  std::ifstream ref_in = OpenInput(a.ref);
  const std::vector<DecodeRecord> hyps = ReadDecodeRecords(hyp_in);
  const std::vector<ReferenceRecord> refs = ReadReferences(ref_in, vocab);
  if (refs.empty()) throw DataError("no trials in " + a.ref);
  std::map<std::string, const DecodeRecord*> by_id;
  for (const DecodeRecord& h : hyps) {
    if (!by_id.emplace(h.trial_id, &h).second) {
      throw DataError("duplicate hypothesis for trial " + h.trial_id);
    }
  }
  std::vector<Alignment> alignments;
  std::vector<std::vector<std::string>> ref_words, hyp_words;
  for (const ReferenceRecord& r : refs) {
    auto it = by_id.find(r.trial_id);
    if (it == by_id.end()) throw DataError("no hypothesis for trial " + r.trial_id);
    for (TokenId id : it->second->best) {
      if (id <= 0 || id >= vocab.size()) {
        throw DataError("hypothesis for trial " + r.trial_id +
                        " has out-of-range id " + std::to_string(id));
      }
    }
    alignments.push_back(Align(r.phonemes, it->second->best));
    ref_words.push_back(WordsFromPhonemes(r.phonemes, vocab));
    hyp_words.push_back(WordsFromPhonemes(it->second->best, vocab));
  }
  const ErrorRates rates = ComputeErrorRates(alignments);
  ojson summary;
  summary["per"] = rates.per;
  summary["wer"] = WordErrorRate(ref_words, hyp_words);
  summary["sub"] = rates.sub_rate;
  summary["del"] = rates.del_rate;
  summary["ins"] = rates.ins_rate;
  summary["n_ref"] = rates.n_ref;
  summary["accuracy"] = rates.accuracy;
  summary["n_trials"] = refs.size();

  const ConfusionMatrix confusion = BuildConfusion(alignments, vocab.size());
  if (!a.per_class.empty()) {
    std::ostringstream csv;
    WritePerClassCsv(confusion, vocab.symbols(), csv);
    WriteTextFile(a.per_class, csv.str());
  }
  if (!a.confusion.empty()) {
    std::ostringstream csv;
    WriteConfusionCsv(confusion, vocab.symbols(), csv);
    WriteTextFile(a.confusion, csv.str());
  }
  Output output(a.output, out);
  output.stream() << summary.dump(2) << '\n';
  output.Commit();
  return 0;
}

// -------------------------------------------------------------- trigger-rank

struct TriggerArgs {
  std::string confusion, freq, output;
  double eps = kTriggerEps;
};

int RunTriggerRank(const TriggerArgs& a, std::ostream& out) {
  std::ifstream conf_in = OpenInput(a.confusion);
  std::vector<std::string> symbols;
  const ConfusionMatrix confusion = ReadConfusionCsv(conf_in, &symbols);
  std::ifstream freq_in = OpenInput(a.freq);
  const FrequencyTable freq = ReadFrequencyCsv(freq_in, symbols);
  const auto ranked = RankTriggers(PrecisionRecall(confusion), freq, a.eps);
  Output output(a.output, out);
  WriteRankedCsv(ranked, symbols, output.stream());
  output.Commit();
  return 0;
}

// --------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string spec, logits, ref, lm, vocab, output;
  int top_k = 0;
  int jobs = 1;
  bool deterministic = false;
};

int RunSweepCommand(const SweepArgs& a, std::ostream& out) {
  const SweepSpec spec = LoadSweepSpec(a.spec);
  const Vocabulary vocab = LoadVocab(a.vocab);
  const NGramModel lm = LoadLm(a.lm, vocab);
  std::ifstream logit_in = OpenInput(a.logits);
  std::ifstream ref_in = OpenInput(a.ref);
  const std::vector<LogitTrial> trials = ReadLogitTrials(logit_in);
  if (trials.empty()) throw DataError("no trials in " + a.logits);
  CheckLogitWidth(trials, vocab.size());
  const std::vector<ReferenceRecord> refs = ReadReferences(ref_in, vocab);
  std::map<std::string, const ReferenceRecord*> by_id;
  for (const ReferenceRecord& r : refs) by_id[r.trial_id] = &r;
  EvalSet eval;
  for (const LogitTrial& t : trials) {
    auto it = by_id.find(t.trial_id);
    if (it == by_id.end()) throw DataError("no reference for trial " + t.trial_id);
    eval.logits.push_back(t.log_probs);
    eval.references.push_back(it->second->phonemes);
  }
  const ContextGraph graph(lm);
  SweepOptions options;
  options.jobs = a.jobs;
  options.deterministic = a.deterministic;
  std::vector<SweepRow> rows = RunSweep(spec, eval, graph, options);
  if (a.top_k > 0) rows = TopK(rows, a.top_k);
  Output output(a.output, out);
  WriteSweepCsv(rows, output.stream());
  output.Commit();
  return 0;
}

// ------------------------------------------------------------------- helpers

std::set<std::string> ExplicitKeys(const std::vector<std::string>& args) {
  std::set<std::string> keys;
  for (const std::string& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    keys.insert(a.substr(2, a.find('=') == std::string::npos
                                ? std::string::npos
                                : a.find('=') - 2));
  }
  return keys;
}

}  // namespace

std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ParameterError("--config needs a path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (config_path.empty()) return kept;

  std::ifstream in(config_path);
  if (!in) throw DataError("cannot open config " + config_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("config " + config_path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError("config must be a JSON object");
  const std::set<std::string> given = ExplicitKeys(kept);
  auto scalar = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  for (const auto& item : j.items()) {
    if (given.count(item.key())) continue;
    const nlohmann::json& v = item.value();
    const std::string flag = "--" + item.key();
    if (v.is_boolean()) {
      if (v.get<bool>()) kept.push_back(flag);
    } else if (v.is_array()) {
      for (const auto& e : v) kept.push_back(flag + "=" + scalar(e));
    } else if (v.is_null() || v.is_object()) {
      throw DataError("config key " + item.key() + " must be a scalar or list");
    } else {
      kept.push_back(flag + "=" + scalar(v));
    }
  }
  return kept;
}

int Run(const std::vector<std::string>& raw_args, std::ostream& out,
        std::ostream& err) {
  CLI::App app("Neural phoneme decoding toolkit", "phonodec");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto jobs_opt = [](CLI::App* sub, int* jobs) {
    sub->add_option("--jobs", *jobs, "Worker threads")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
  };
  auto config_note = [](CLI::App* sub) {
    sub->footer("--config PATH reads a JSON object of flag names to values; "
                "explicit flags take precedence.");
  };

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Raw recordings to z-scored features");
  pre_cmd->add_option("--input", pre.input, "Raw NDJSON")->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("--output", pre.output, "Feature NDJSON (default stdout)");
  pre_cmd->add_option("--filter-order", pre.pipeline.filter_order)->capture_default_str();
  pre_cmd->add_option("--low-hz", pre.pipeline.low_hz)->capture_default_str();
  pre_cmd->add_option("--high-hz", pre.pipeline.high_hz)->capture_default_str();
  pre_cmd->add_option("--frame-rate", pre.pipeline.frame_rate_hz)->capture_default_str();
  pre_cmd->add_option("--zscore-eps", pre.pipeline.zscore_eps)->capture_default_str();
  pre_cmd->add_flag("--no-zscore", pre.no_zscore, "Skip per-session normalization");
  jobs_opt(pre_cmd, &pre.jobs);
  config_note(pre_cmd);

  LmTrainArgs lmt;
  auto* lm_cmd = app.add_subcommand("lm-train", "Train a Kneser-Ney phoneme LM and write ARPA");
  lm_cmd->add_option("--corpus", lmt.corpus, "One utterance per line")->required()->check(CLI::ExistingFile);
  lm_cmd->add_option("--vocab", lmt.vocab, "Vocabulary file")->required()->check(CLI::ExistingFile);
  lm_cmd->add_option("--output", lmt.output, "ARPA file (default stdout)");
  lm_cmd->add_option("--order", lmt.order)->check(CLI::Range(1, kMaxNGramOrder))->capture_default_str();
  lm_cmd->add_option("--discount", lmt.discount)->check(CLI::IsMember({"modified", "fixed"}))->capture_default_str();
  lm_cmd->add_option("--fixed-discount", lmt.fixed_discount)->capture_default_str();
  lm_cmd->add_flag("--no-boundaries", lmt.no_boundaries, "Do not pad utterances with <s> and </s>");
  config_note(lm_cmd);

  auto model_opts = [](CLI::App* sub, ModelArgs* m) {
    sub->add_option("--model-config", m->model_config, "Model config JSON")->check(CLI::ExistingFile);
    sub->add_option("--vocab", m->vocab, "Vocabulary file; sets vocab_size")->check(CLI::ExistingFile);
    sub->add_option("--seed", m->seed, "Initialization seed")->capture_default_str();
  };

  ModelInitArgs mi;
  auto* init_cmd = app.add_subcommand("model-init", "Report the parameter count and optionally write initial weights");
  model_opts(init_cmd, &mi.model);
  init_cmd->add_option("--output", mi.output, "Parameter file to write");
  config_note(init_cmd);

  ModelForwardArgs mf;
  auto* fwd_cmd = app.add_subcommand("model-forward", "Features to per-frame log-probabilities");
  model_opts(fwd_cmd, &mf.model);
  fwd_cmd->add_option("--params", mf.model.params, "Parameter file (else seeded init)")->check(CLI::ExistingFile);
  fwd_cmd->add_option("--input", mf.input, "Feature NDJSON")->required()->check(CLI::ExistingFile);
  fwd_cmd->add_option("--output", mf.output, "Logits NDJSON (default stdout)");
  jobs_opt(fwd_cmd, &mf.jobs);
  config_note(fwd_cmd);

  GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Check CTC gradients against finite differences");
  gc_cmd->add_option("--seed", gc.seed)->capture_default_str();
  gc_cmd->add_option("--instances", gc.instances)->check(CLI::PositiveNumber)->capture_default_str();
  gc_cmd->add_option("--frames", gc.frames)->check(CLI::PositiveNumber)->capture_default_str();
  gc_cmd->add_option("--vocab-size", gc.vocab_size)->check(CLI::Range(2, 64))->capture_default_str();
  gc_cmd->add_option("--step", gc.step)->check(CLI::PositiveNumber)->capture_default_str();
  gc_cmd->add_option("--tolerance", gc.tolerance)->check(CLI::PositiveNumber)->capture_default_str();
  config_note(gc_cmd);

  AugmentArgs aug;
  auto* aug_cmd = app.add_subcommand("augment-preview", "Apply time and channel masking to features");
  aug_cmd->add_option("--input", aug.input, "Feature NDJSON")->required()->check(CLI::ExistingFile);
  aug_cmd->add_option("--output", aug.output, "NDJSON (default stdout)");
  aug_cmd->add_option("--seed", aug.policy.seed, "Base seed; trial i uses seed + i")->capture_default_str();
  aug_cmd->add_option("--time-masks", aug.policy.n_time_masks)->check(CLI::NonNegativeNumber)->capture_default_str();
  aug_cmd->add_option("--max-time-width", aug.policy.max_time_width)->check(CLI::NonNegativeNumber)->capture_default_str();
  aug_cmd->add_option("--channel-masks", aug.policy.n_channel_masks)->check(CLI::NonNegativeNumber)->capture_default_str();
  aug_cmd->add_option("--max-channel-width", aug.policy.max_channel_width)->check(CLI::NonNegativeNumber)->capture_default_str();
  config_note(aug_cmd);

  DecodeArgs dec;
  auto* dec_cmd = app.add_subcommand("decode", "Log-probabilities to phoneme hypotheses");
  dec_cmd->add_option("--input", dec.input, "Logits NDJSON")->required()->check(CLI::ExistingFile);
  dec_cmd->add_option("--output", dec.output, "Hypotheses NDJSON (default stdout)");
  dec_cmd->add_option("--vocab", dec.vocab, "Vocabulary file")->required()->check(CLI::ExistingFile);
  dec_cmd->add_option("--lm", dec.lm, "ARPA language model")->check(CLI::ExistingFile);
  dec_cmd->add_option("--stage", dec.stage)->check(CLI::IsMember({"greedy", "lm", "wfst"}))->capture_default_str();
  dec_cmd->add_option("--beam", dec.beam)->capture_default_str();
  dec_cmd->add_option("--lm-weight", dec.lm_weight)->capture_default_str();
  dec_cmd->add_option("--len-alpha", dec.len_alpha)->capture_default_str();
  dec_cmd->add_option("--lm-beta", dec.lm_beta, "Interpolation weight of the lm stage")->capture_default_str();
  dec_cmd->add_option("--nbest", dec.nbest)->capture_default_str();
  dec_cmd->add_option("--rescore-nbest", dec.rescore_nbest,
                      "lm stage: rescore this many acoustic beam hypotheses instead of the greedy path")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  dec_cmd->add_flag("--deterministic", dec.deterministic, "Report latency as 0");
  jobs_opt(dec_cmd, &dec.jobs);
  config_note(dec_cmd);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score hypotheses against references");
  eval_cmd->add_option("--hyp", ev.hyp, "Hypotheses NDJSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--ref", ev.ref, "References NDJSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--vocab", ev.vocab, "Vocabulary file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--output", ev.output, "Summary JSON (default stdout)");
  eval_cmd->add_option("--per-class", ev.per_class, "Per-class precision/recall CSV");
  eval_cmd->add_option("--confusion", ev.confusion, "Confusion matrix CSV");
  config_note(eval_cmd);

  TriggerArgs trig;
  auto* trig_cmd = app.add_subcommand("trigger-rank", "Rank candidate trigger phonemes");
  trig_cmd->add_option("--confusion", trig.confusion, "Confusion CSV")->required()->check(CLI::ExistingFile);
  trig_cmd->add_option("--freq", trig.freq, "Frequency CSV symbol,freq")->required()->check(CLI::ExistingFile);
  trig_cmd->add_option("--output", trig.output, "Ranked CSV (default stdout)");
  trig_cmd->add_option("--eps", trig.eps)->check(CLI::PositiveNumber)->capture_default_str();
  config_note(trig_cmd);

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid or random search over decoder settings");
  sweep_cmd->add_option("--spec", sw.spec, "Sweep spec JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--logits", sw.logits, "Logits NDJSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--ref", sw.ref, "References NDJSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--lm", sw.lm, "ARPA language model")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--vocab", sw.vocab, "Vocabulary file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--output", sw.output, "Result CSV (default stdout)");
  sweep_cmd->add_option("--top-k", sw.top_k, "Keep only the best k rows")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_flag("--deterministic", sw.deterministic, "Report latency as 0");
  jobs_opt(sweep_cmd, &sw.jobs);
  config_note(sweep_cmd);

  try {
    const std::vector<std::string> args = ExpandConfig(raw_args);
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err) == 0 ? 0 : 1;
    }
    if (pre_cmd->parsed()) return RunPreprocess(pre, out);
    if (lm_cmd->parsed()) return RunLmTrain(lmt, out);
    if (init_cmd->parsed()) return RunModelInit(mi, out);
    if (fwd_cmd->parsed()) return RunModelForward(mf, out);
    if (gc_cmd->parsed()) return RunGradcheck(gc, out);
    if (aug_cmd->parsed()) return RunAugmentPreview(aug, out);
    if (dec_cmd->parsed()) return RunDecode(dec, out);
    if (eval_cmd->parsed()) return RunEval(ev, out);
    if (trig_cmd->parsed()) return RunTriggerRank(trig, out);
    if (sweep_cmd->parsed()) return RunSweepCommand(sw, out);
    return 1;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace phonodec::cli
