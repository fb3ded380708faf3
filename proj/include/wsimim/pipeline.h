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

// Pipeline orchestration: per target word, train the MIM network on its
// train pairs (validating on the test pairs), embed the test vectors, pick a
// cluster count, cluster, and emit a system key; then score every run
// against gold and aggregate mean ± std over runs.
//
// Dumps are found by name inside one directory:
//   <lemma>.<pos>.train.dump / <lemma>.<pos>.test.dump
//   <lemma>.<pos>.layer<L>.train.dump / ...test.dump   (layer sweeps)

#ifndef WSIMIM_PIPELINE_H_
#define WSIMIM_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wsimim/datamodel.h"
#include "wsimim/metrics.h"
#include "wsimim/mim.h"
#include "wsimim/polysemy.h"

namespace wsimim {

enum class ClusterMode { kFixed, kDynamic };

enum class RunSelection {
  kPerRun,      // every restart is its own scored run (mean ± std reported)
  kBestOfRuns,  // one Train call keeps the best (run, epoch) snapshot
};

struct PipelineConfig {
  std::filesystem::path dumps_dir;
  std::filesystem::path gold_path;  // empty: no scoring
  std::filesystem::path output_dir;
  MimConfig mim;  // input_dim is taken from the dumps
  ClusterMode mode = ClusterMode::kFixed;
  int fixed_k = 7;
  PolysemyCalibration calibration = DefaultCalibration();
  int grid_dims = kDefaultGridDims;
  int grid_levels = kDefaultGridLevels;
  bool graded = false;
  bool baseline = false;  // cluster the raw vectors, skip MIM
  RunSelection selection = RunSelection::kPerRun;
  bool drop_missing = false;
  int workers = 1;
  uint64_t seed = 0;

  void Validate() const;
  // Number of scored runs this configuration produces.
  int ScoredRuns() const;
};

// JSON config file. Unknown keys are rejected. Missing keys keep defaults.
PipelineConfig PipelineConfigFromJson(const std::string& text);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);
std::string PipelineConfigToJson(const PipelineConfig& config);

struct WordInput {
  std::string group;
  VectorPairSet train;
  VectorPairSet test;
};

// All words with both dumps present, sorted by group name. With a layer,
// reads the per-layer file names; a missing layer file is an error naming
// the layer.
std::vector<WordInput> LoadWords(const std::filesystem::path& dumps_dir,
                                 std::optional<int> layer = std::nullopt);

// --- Stages, each usable on its own; RunPipeline composes them. ---

// MIM settings for one word and scored run: seed derived from (global seed,
// word, run) and restarts per the selection mode.
MimConfig WordMimConfig(const PipelineConfig& config, const WordInput& word,
                        int run);
MimModel TrainWord(const PipelineConfig& config, const WordInput& word, int run);

// Test-instance representation that gets clustered: MIM embeddings, or the
// raw vectors in baseline mode.
Eigen::MatrixXd WordRepresentation(const PipelineConfig& config,
                                   const WordInput& word, int run);

struct ClusterChoice {
  int k = 0;
  std::optional<double> polysemy;  // set in dynamic mode
};
ClusterChoice ChooseClusterCount(const PipelineConfig& config,
                                 const Eigen::MatrixXd& vectors);

ClusteringSolution ClusterWord(const PipelineConfig& config,
                               const WordInput& word,
                               const Eigen::MatrixXd& vectors,
                               ClusterChoice* choice = nullptr);

// --- Reports. ---

struct MetricPair {
  std::string first;   // "V-Measure" or "F-BC"
  std::string second;  // "F-Score" or "F-NMI"
};
MetricPair MetricNames(bool graded);

// Scores of one system key: both metrics (per group and macro) in [0, 1].
struct KeyScores {
  MetricResult first;
  MetricResult second;
};
KeyScores ScoreKey(const SenseKey& gold, const SenseKey& sys, bool graded,
                   const MetricOptions& options = {});

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  int count = 0;
};
Summary Summarize(const std::vector<double>& values);

struct WordRun {
  int k = 0;
  std::optional<double> polysemy;
  std::optional<double> first, second, avg;  // percent scale, when scored
};

struct WordReport {
  std::string group;
  bool ok = true;
  std::string error;
  std::vector<WordRun> runs;
};

struct RunAggregate {
  double mean_k = 0.0;
  std::optional<double> first, second, avg;  // percent scale
};

struct PipelineReport {
  MetricPair metrics;
  bool scored = false;
  bool graded = false;
  std::vector<WordReport> words;
  std::vector<RunAggregate> runs;
  std::vector<SenseKey> keys;  // one system key per run, all words

  bool AllOk() const;
  std::string ToText() const;
  // Columns: group status runs k_mean k_std polysemy_mean first_mean
  // first_std second_mean second_std avg_mean avg_std; last row is ALL.
  std::string ToTsv() const;
};

PipelineReport RunPipeline(const PipelineConfig& config,
                           const std::vector<WordInput>& words,
                           const SenseKey* gold);

// report.txt, report.tsv and keys/run<r>.key under `dir`.
void WritePipelineOutputs(const PipelineReport& report,
                          const std::filesystem::path& dir);

enum class Task { kCrisp, kGraded };

struct EvaluationRow {
  std::string metric;
  std::string group;  // lemma.pos or ALL
  Summary value;      // percent scale
};

struct EvaluationReport {
  MetricPair metrics;
  std::vector<EvaluationRow> rows;

  const EvaluationRow& Find(const std::string& metric,
                            const std::string& group) const;
  std::string ToText() const;
  // Columns: metric group mean std runs
  std::string ToTsv() const;
};

// Scores each system key against gold; AVG is the geometric mean of the
// metric pair computed per key, then summarized across keys.
EvaluationReport Evaluate(const SenseKey& gold,
                          const std::vector<SenseKey>& systems, Task task,
                          const MetricOptions& options = {});

struct SweepRow {
  int layer = 0;
  Summary first, second, avg;  // percent scale
};

struct SweepReport {
  MetricPair metrics;
  std::vector<SweepRow> rows;

  std::string ToText() const;
  // Columns: layer first_mean first_std second_mean second_std avg_mean
  // avg_std
  std::string ToTsv() const;
};

// Runs the configured pipeline on every layer's dumps (raw-vector
// clustering unless MIM is enabled) and tabulates score against layer.
SweepReport SweepLayers(const PipelineConfig& config,
                        const std::vector<int>& layers, const SenseKey& gold);

}  // namespace wsimim

#endif  // WSIMIM_PIPELINE_H_
