/*
 * Copyright 2026 The wsimim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "wsimim/pipeline.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.h"
#include "wsimim/synthbench.h"

namespace wsimim {
namespace {

using ::wsimim::testing::CrispKey;
using ::wsimim::testing::ScratchDir;

// Small network so that MIM runs stay quick.
MimConfig SmallMim() {
  MimConfig m;
  m.hidden_dim = 32;
  m.num_classes = 5;
  m.epochs = 2;
  m.batch_size = 16;
  m.runs = 2;
  m.lr_init = 1e-3;
  return m;
}

BenchmarkSpec SmallBench(int words) {
  BenchmarkSpec bench;
  bench.words = words;
  bench.k_min = 2;
  bench.k_max = 5;
  return bench;
}

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(PipelineConfigTest, JsonRoundTrip) {
  PipelineConfig c;
  c.dumps_dir = "/tmp/d";
  c.gold_path = "/tmp/g.key";
  c.output_dir = "/tmp/o";
  c.mim = SmallMim();
  c.mode = ClusterMode::kDynamic;
  c.fixed_k = 4;
  c.graded = true;
  c.selection = RunSelection::kBestOfRuns;
  c.drop_missing = true;
  c.workers = 3;
  c.seed = 99;
  c.calibration.score_low = 1.5;
  const std::string text = PipelineConfigToJson(c);
  const PipelineConfig back = PipelineConfigFromJson(text);
  EXPECT_EQ(PipelineConfigToJson(back), text);
  EXPECT_EQ(back.mim.hidden_dim, 32);
  EXPECT_EQ(back.mode, ClusterMode::kDynamic);
  EXPECT_EQ(back.selection, RunSelection::kBestOfRuns);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.calibration.score_low, 1.5);
}

TEST(PipelineConfigTest, RejectsUnknownKeysAndBadValues) {
  try {
    PipelineConfigFromJson(R"({"mim": {"hiden_dim": 3}})");
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("hiden_dim"), std::string::npos);
  }
  EXPECT_THROW(PipelineConfigFromJson(R"({"selection": "worst"})"),
               std::invalid_argument);
  EXPECT_THROW(PipelineConfigFromJson(R"({"clustering": {"mode": "auto"}})"),
               std::invalid_argument);
  EXPECT_THROW(PipelineConfigFromJson(R"({"workers": 0})"), std::invalid_argument);
  EXPECT_EQ(PipelineConfigFromJson("{}").fixed_k, 7);
}

TEST(PipelineConfigTest, RelativePathsResolveAgainstConfigFile) {
  const auto dir = ScratchDir();
  std::ofstream(dir / "c.json") << R"({"dumps": "d", "gold": "g.key"})";
  const PipelineConfig c = LoadPipelineConfig(dir / "c.json");
  EXPECT_EQ(c.dumps_dir, dir / "d");
  EXPECT_EQ(c.gold_path, dir / "g.key");
}

TEST(LoadWordsTest, SortedGroupsAndErrors) {
  const auto dir = ScratchDir();
  WriteBenchmark(GenerateBenchmark(SmallBench(3)), dir);
  const std::vector<WordInput> words = LoadWords(dir);
  ASSERT_EQ(words.size(), 3u);
  EXPECT_EQ(words[0].group, "synth00.n");
  EXPECT_EQ(words[2].group, "synth02.n");
  EXPECT_THROW(LoadWords(dir / "nope"), std::runtime_error);
  std::filesystem::remove(dir / "synth01.n.test.dump");
  EXPECT_THROW(LoadWords(dir), std::runtime_error);
}

TEST(PipelineTest, TenWordReportStructure) {
  const auto dir = ScratchDir();
  const auto words_data = GenerateBenchmark(SmallBench(10));
  WriteBenchmark(words_data, dir);
  PipelineConfig c;
  c.baseline = true;
  c.fixed_k = 4;
  const SenseKey gold = ParseKey(dir / "gold.key", false);
  const PipelineReport r = RunPipeline(c, LoadWords(dir), &gold);
  ASSERT_TRUE(r.AllOk());
  EXPECT_EQ(r.words.size(), 10u);
  ASSERT_EQ(r.runs.size(), 1u);
  const std::string text = r.ToText();
  EXPECT_NE(text.find("ALL"), std::string::npos);
  EXPECT_NE(text.find("average number of clusters"), std::string::npos);
  const std::string tsv = r.ToTsv();
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 12);  // header, 10, ALL
  EXPECT_EQ(tsv.rfind("ALL\t", std::string::npos) != std::string::npos, true);
  EXPECT_DOUBLE_EQ(r.runs[0].mean_k, 4.0);
  EXPECT_NEAR(*r.runs[0].avg, GeometricAvg(*r.runs[0].first, *r.runs[0].second), 1e-9);
}

TEST(PipelineTest, DynamicBaselineTracksTrueSenseCount) {
  const auto dir = ScratchDir();
  BenchmarkSpec bench;
  bench.words = 14;
  const auto data = GenerateBenchmark(bench);
  WriteBenchmark(data, dir);
  PipelineConfig c;
  c.baseline = true;
  c.mode = ClusterMode::kDynamic;
  const PipelineReport r = RunPipeline(c, LoadWords(dir), nullptr);
  ASSERT_TRUE(r.AllOk());
  double true_mean = 0.0;
  for (const SynthWord& w : data) true_mean += w.true_senses;
  true_mean /= data.size();
  EXPECT_NEAR(r.runs[0].mean_k, true_mean, 1.0);
  for (const WordReport& w : r.words) EXPECT_TRUE(w.runs[0].polysemy.has_value());
}

TEST(PipelineTest, MimAndBaselineReportsAreComparable) {
  const auto dir = ScratchDir();
  WriteBenchmark(GenerateBenchmark(SmallBench(3)), dir);
  const SenseKey gold = ParseKey(dir / "gold.key", false);
  PipelineConfig c;
  c.mim = SmallMim();
  c.fixed_k = 3;
  const PipelineReport mim = RunPipeline(c, LoadWords(dir), &gold);
  c.baseline = true;
  const PipelineReport raw = RunPipeline(c, LoadWords(dir), &gold);
  ASSERT_TRUE(mim.AllOk());
  ASSERT_TRUE(raw.AllOk());
  EXPECT_EQ(mim.runs.size(), 2u);
  EXPECT_EQ(raw.runs.size(), 1u);
  EXPECT_EQ(mim.metrics.first, raw.metrics.first);
  for (const RunAggregate& a : mim.runs) {
    EXPECT_GE(*a.first, 0.0);
    EXPECT_LE(*a.first, 100.0);
  }
  // Keys cover the same instances.
  ASSERT_EQ(mim.keys[0].records.size(), raw.keys[0].records.size());
  for (size_t i = 0; i < raw.keys[0].records.size(); ++i)
    EXPECT_EQ(mim.keys[0].records[i].id, raw.keys[0].records[i].id);
}

TEST(PipelineTest, WorkerCountDoesNotChangeResults) {
  const auto dir = ScratchDir();
  WriteBenchmark(GenerateBenchmark(SmallBench(4)), dir);
  const SenseKey gold = ParseKey(dir / "gold.key", false);
  PipelineConfig c;
  c.mim = SmallMim();
  c.mim.runs = 1;
  c.fixed_k = 3;
  const PipelineReport one = RunPipeline(c, LoadWords(dir), &gold);
  c.workers = 3;
  const PipelineReport three = RunPipeline(c, LoadWords(dir), &gold);
  EXPECT_EQ(SerializeKey(one.keys[0]), SerializeKey(three.keys[0]));
  EXPECT_EQ(one.ToTsv(), three.ToTsv());
}

TEST(PipelineTest, FailedWordIsReportedWhileOthersFinish) {
  const auto dir = ScratchDir();
  auto data = GenerateBenchmark(SmallBench(3));
  data[1].test.pairs.clear();
  WriteBenchmark(data, dir);
  PipelineConfig c;
  c.baseline = true;
  c.fixed_k = 3;
  const PipelineReport r = RunPipeline(c, LoadWords(dir), nullptr);
  EXPECT_FALSE(r.AllOk());
  EXPECT_TRUE(r.words[0].ok);
  EXPECT_FALSE(r.words[1].ok);
  EXPECT_NE(r.words[1].error.find("synth01.n"), std::string::npos);
  EXPECT_TRUE(r.words[2].ok);
  EXPECT_NE(r.ToText().find("synth01.n"), std::string::npos);
}

TEST(EvaluateTest, GoldAgainstItself) {
  const SenseKey gold = CrispKey("w", {0, 0, 1, 2, 2});
  const EvaluationReport r = Evaluate(gold, {gold}, Task::kCrisp);
  EXPECT_DOUBLE_EQ(r.Find("V-Measure", "ALL").value.mean, 100.0);
  EXPECT_DOUBLE_EQ(r.Find("F-Score", "ALL").value.mean, 100.0);
  EXPECT_DOUBLE_EQ(r.Find("AVG", "w.n").value.mean, 100.0);
  const EvaluationReport g = Evaluate(gold, {gold}, Task::kGraded);
  EXPECT_NEAR(g.Find("F-BC", "ALL").value.mean, 100.0, 1e-9);
  EXPECT_NEAR(g.Find("F-NMI", "ALL").value.mean, 100.0, 1e-9);
  EXPECT_THROW(r.Find("AVG", "nope"), std::out_of_range);
}

TEST(EvaluateTest, SummarizesAcrossKeys) {
  Rng rng(1);
  const SenseKey gold = CrispKey("w", {0, 0, 0, 1, 1, 1, 2, 2});
  std::vector<SenseKey> systems;
  std::vector<double> v;
  for (int k = 0; k < 8; ++k) {
    systems.push_back(CrispKey("w", ::wsimim::testing::RandomLabels(rng, 8, 3)));
    v.push_back(100.0 * VMeasure(gold, systems.back()).value);
  }
  const EvaluationReport r = Evaluate(gold, systems, Task::kCrisp);
  const Summary s = r.Find("V-Measure", "ALL").value;
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= 8.0;
  double var = 0.0;
  for (const double x : v) var += (x - mean) * (x - mean);
  EXPECT_EQ(s.count, 8);
  EXPECT_NEAR(s.mean, mean, 1e-9);
  EXPECT_NEAR(s.std, std::sqrt(var / 8.0), 1e-9);
  EXPECT_NE(r.ToTsv().find("metric\tgroup\tmean\tstd\truns"), std::string::npos);
}

TEST(EvaluateTest, AverageOfReferencePair) {
  EXPECT_NEAR(GeometricAvg(44.83, 67.74), 55.1, 0.05);
}

TEST(SummarizeTest, PopulationStd) {
  const Summary s = Summarize({1.0, 3.0});
  EXPECT_EQ(s.mean, 2.0);
  EXPECT_EQ(s.std, 1.0);
  EXPECT_EQ(s.count, 2);
}

void WriteLayer(const std::filesystem::path& dir, int layer, double spread) {
  BenchmarkSpec bench = SmallBench(4);
  bench.layer = layer;
  bench.cluster_spread = spread;
  WriteBenchmark(GenerateBenchmark(bench), dir, true);
}

TEST(SweepLayersTest, NoisierLayerScoresLower) {
  const auto dir = ScratchDir();
  WriteLayer(dir, 0, 0.25);
  WriteLayer(dir, 1, 0.5);
  WriteLayer(dir, 2, 0.25);
  PipelineConfig c;
  c.dumps_dir = dir;
  c.baseline = true;
  c.fixed_k = 3;
  BenchmarkSpec bench = SmallBench(4);
  SenseKey gold;
  for (const SynthWord& w : GenerateBenchmark(bench))
    gold.records.insert(gold.records.end(), w.gold.records.begin(), w.gold.records.end());
  const SweepReport r = SweepLayers(c, {0, 1, 2}, gold);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_LT(r.rows[1].avg.mean, r.rows[0].avg.mean);
  EXPECT_LT(r.rows[1].avg.mean, r.rows[2].avg.mean);
  EXPECT_EQ(SweepLayers(c, {2}, gold).rows.size(), 1u);
  try {
    SweepLayers(c, {0, 7}, gold);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("layer 7"), std::string::npos);
  }
}

TEST(SweepLayersTest, InconsistentInstanceSets) {
  const auto dir = ScratchDir();
  WriteLayer(dir, 0, 0.25);
  BenchmarkSpec bench = SmallBench(4);
  bench.layer = 1;
  bench.instances_per_sense = 25;
  WriteBenchmark(GenerateBenchmark(bench), dir, true);
  SenseKey gold;
  for (const SynthWord& w : GenerateBenchmark(SmallBench(4)))
    gold.records.insert(gold.records.end(), w.gold.records.begin(), w.gold.records.end());
  PipelineConfig c;
  c.dumps_dir = dir;
  c.baseline = true;
  c.fixed_k = 3;
  try {
    SweepLayers(c, {0, 1}, gold);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("different instance set"), std::string::npos)
        << e.what();
  }
}

TEST(StagesTest, ComposeToPipelineResult) {
  const auto dir = ScratchDir();
  WriteBenchmark(GenerateBenchmark(SmallBench(2)), dir);
  PipelineConfig c;
  c.mim = SmallMim();
  c.mim.runs = 1;
  c.mode = ClusterMode::kDynamic;
  const std::vector<WordInput> words = LoadWords(dir);
  const PipelineReport r = RunPipeline(c, words, nullptr);
  SenseKey manual;
  for (const WordInput& w : words) {
    const Eigen::MatrixXd rep = WordRepresentation(c, w, 0);
    ClusterChoice choice;
    const ClusteringSolution sol = ClusterWord(c, w, rep, &choice);
    const SenseKey key = SolutionToKey(sol, false);
    manual.records.insert(manual.records.end(), key.records.begin(), key.records.end());
  }
  EXPECT_EQ(SerializeKey(manual), SerializeKey(r.keys[0]));
}

TEST(StagesTest, RepeatedRunsWriteIdenticalFiles) {
  const auto dir = ScratchDir();
  WriteBenchmark(GenerateBenchmark(SmallBench(3)), dir / "dumps");
  const SenseKey gold = ParseKey(dir / "dumps" / "gold.key", false);
  PipelineConfig c;
  c.mim = SmallMim();
  c.fixed_k = 3;
  for (const char* out : {"a", "b"}) {
    WritePipelineOutputs(RunPipeline(c, LoadWords(dir / "dumps"), &gold), dir / out);
  }
  for (const char* file : {"report.txt", "report.tsv", "keys/run0.key", "keys/run1.key"}) {
    const std::string a = ReadAll(dir / "a" / file);
    EXPECT_FALSE(a.empty()) << file;
    EXPECT_EQ(a, ReadAll(dir / "b" / file)) << file;
  }
}

}  // namespace
}  // namespace wsimim
