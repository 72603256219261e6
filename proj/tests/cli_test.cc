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

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"
#include "phonodec/formats.h"
#include "test_util.h"

namespace phonodec {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "phonodec");
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") {
    vocab_ = dir_.File("vocab.txt");
    WriteFile(vocab_, "AA\nB\nCH\nSIL\n");
  }
  std::string File(const std::string& name) const { return dir_.File(name); }

  std::string vocab_;

 private:
  testing::TempDir dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(RunCli({"frobnicate"}).code, 1);
  EXPECT_EQ(RunCli({"decode", "--beam", "8"}).code, 1);
  EXPECT_EQ(RunCli({"decode", "--help"}).code, 0);
  EXPECT_EQ(RunCli({"gradcheck", "--instances", "0"}).code, 1);
}

TEST_F(CliTest, GradcheckIsDeterministic) {
  const Result a = RunCli({"gradcheck", "--seed", "7", "--instances", "3"});
  const Result b = RunCli({"gradcheck", "--seed", "7", "--instances", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_LT(j.at("max_rel_error").get<double>(), 1e-6);
}

TEST_F(CliTest, ModelInitReportsCount) {
  const Result r = RunCli({"model-init"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("param_count").get<long long>(), 46205610);
}

TEST_F(CliTest, EmptyDecodeInputIsDataError) {
  WriteFile(File("empty.ndjson"), "");
  const Result r = RunCli({"decode", "--input", File("empty.ndjson"), "--vocab", vocab_,
                           "--stage", "greedy"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no trials"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedInputIsDataError) {
  WriteFile(File("bad.ndjson"), "{\"trial_id\": 3}\n");
  const Result r = RunCli({"decode", "--input", File("bad.ndjson"), "--vocab", vocab_,
                           "--stage", "greedy"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  WriteFile(File("cfg.json"), "{\"seed\": 3, \"instances\": 2}");
  const Result from_config = RunCli({"gradcheck", "--config", File("cfg.json")});
  const Result explicit_flags = RunCli({"gradcheck", "--seed", "3", "--instances", "2"});
  ASSERT_EQ(from_config.code, 0) << from_config.err;
  EXPECT_EQ(from_config.out, explicit_flags.out);
  const Result overridden =
      RunCli({"gradcheck", "--config", File("cfg.json"), "--seed", "4"});
  EXPECT_EQ(overridden.out, RunCli({"gradcheck", "--seed", "4", "--instances", "2"}).out);
}

TEST_F(CliTest, PipelineEndToEnd) {
  // Raw recordings: 4 channels, 0.2 s at 30 kHz -> 10 frames each.
  std::mt19937_64 gen(1);
  {
    std::ofstream raw(File("raw.ndjson"));
    for (int i = 0; i < 3; ++i) {
      RawTrial t{"s1", "t" + std::to_string(i), {Matrix(4, 6000), 30000.0}};
      for (double& v : t.recording.samples.data()) v = testing::Uniform01(gen) - 0.5;
      WriteRawTrial(raw, t);
    }
  }
  Result r = RunCli({"preprocess", "--input", File("raw.ndjson"), "--output", File("feat.ndjson")});
  ASSERT_EQ(r.code, 0) << r.err;

  WriteFile(File("model.json"),
            "{\"input_dim\":4,\"d_model\":8,\"num_layers\":1,\"num_heads\":2,"
            "\"head_dim\":4,\"prenet_gru_hidden\":4,\"groupnorm_groups\":2}");
  r = RunCli({"model-forward", "--input", File("feat.ndjson"), "--model-config",
              File("model.json"), "--vocab", vocab_, "--output", File("logits.ndjson")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream logits_in(File("logits.ndjson"));
  const auto logits = ReadLogitTrials(logits_in);
  ASSERT_EQ(logits.size(), 3u);
  EXPECT_EQ(logits[0].log_probs.vocab_size(), 5);
  EXPECT_EQ(logits[0].log_probs.num_frames(), 2u);

  WriteFile(File("corpus.txt"), "AA B CH\nB CH SIL AA\nAA AA B\n");
  r = RunCli({"lm-train", "--corpus", File("corpus.txt"), "--vocab", vocab_, "--order", "3",
              "--output", File("lm.arpa")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(ReadFile(File("lm.arpa")).find("\\data\\"), std::string::npos);

  WriteFile(File("ref.ndjson"),
            "{\"trial_id\":\"t0\",\"phonemes\":\"AA B\"}\n"
            "{\"trial_id\":\"t1\",\"phonemes\":[\"CH\"]}\n"
            "{\"trial_id\":\"t2\",\"phonemes\":\"B SIL AA\"}\n");
  for (const std::string stage : {"greedy", "lm", "wfst"}) {
    const std::string hyp = File("hyp_" + stage + ".ndjson");
    r = RunCli({"decode", "--input", File("logits.ndjson"), "--vocab", vocab_, "--lm",
                File("lm.arpa"), "--stage", stage, "--deterministic", "--output", hyp});
    ASSERT_EQ(r.code, 0) << stage << ": " << r.err;
    std::ifstream hin(hyp);
    const auto records = ReadDecodeRecords(hin);
    ASSERT_EQ(records.size(), 3u);
    EXPECT_EQ(records[2].trial_id, "t2");
    EXPECT_EQ(records[0].latency_ms, 0.0);

    r = RunCli({"eval", "--hyp", hyp, "--ref", File("ref.ndjson"), "--vocab", vocab_,
                "--confusion", File("conf.csv"), "--per-class", File("pc.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto summary = nlohmann::json::parse(r.out);
    EXPECT_EQ(summary.at("n_trials").get<int>(), 3);
    EXPECT_EQ(summary.at("n_ref").get<int>(), 6);
    EXPECT_NEAR(summary.at("accuracy").get<double>(),
                1.0 - summary.at("per").get<double>(), 1e-12);
  }

  WriteFile(File("freq.csv"), "symbol,freq\nAA,0.4\nB,0.3\nCH,0.2\nSIL,0.1\n");
  r = RunCli({"trigger-rank", "--confusion", File("conf.csv"), "--freq", File("freq.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("rank,symbol", 0), 0u);

  WriteFile(File("spec.json"),
            "{\"beam_values\":[2,4],\"lm_weights\":[0,1],\"length_alphas\":[0.9]}");
  const std::vector<std::string> sweep{"sweep", "--spec", File("spec.json"), "--logits",
                                       File("logits.ndjson"), "--ref", File("ref.ndjson"),
                                       "--lm", File("lm.arpa"), "--vocab", vocab_,
                                       "--deterministic"};
  const Result s1 = RunCli(sweep);
  const Result s2 = RunCli(sweep);
  ASSERT_EQ(s1.code, 0) << s1.err;
  EXPECT_EQ(s1.out, s2.out);
  EXPECT_EQ(std::count(s1.out.begin(), s1.out.end(), '\n'), 5);

  r = RunCli({"augment-preview", "--input", File("feat.ndjson"), "--max-time-width", "2",
              "--max-channel-width", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, WfstWithoutLmIsUsageError) {
  std::mt19937_64 gen(1);
  {
    std::ofstream out(File("l.ndjson"));
    WriteLogitTrial(out, {"a", testing::RandomLogProbs(4, 5, gen)});
  }
  EXPECT_EQ(RunCli({"decode", "--input", File("l.ndjson"), "--vocab", vocab_}).code, 1);
  const Result ok = RunCli({"decode", "--input", File("l.ndjson"), "--vocab", vocab_,
                            "--stage", "greedy"});
  EXPECT_EQ(ok.code, 0) << ok.err;
}

}  // namespace
}  // namespace phonodec
