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

// Synthetic words with known sense structure. Each sense is a unit-norm
// centroid; an instance is the centroid plus isotropic Gaussian noise, and
// its paraphrase vector adds a smaller jitter on top. Instances are split
// 80/20 into train and test; the gold key covers the test instances.

#ifndef WSIMIM_SYNTHBENCH_H_
#define WSIMIM_SYNTHBENCH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wsimim/datamodel.h"

namespace wsimim {

struct SynthSpec {
  std::string lemma = "synth";
  Pos pos = Pos::kNoun;
  int layer = 0;
  int dim = 16;
  int senses = 3;
  int instances_per_sense = 50;
  double cluster_spread = 0.05;     // per-coordinate std of sense noise
  double paraphrase_jitter = 0.01;  // per-coordinate std of paraphrase noise
  double separation = 0.8;          // minimum distance between centroids
  uint64_t seed = 0;

  // Requires jitter < spread < separation (a zero jitter is allowed).
  void Validate() const;
};

struct SynthWord {
  VectorPairSet train;
  VectorPairSet test;
  SenseKey gold;  // test instances, one crisp sense each
  std::vector<int> train_senses;
  std::vector<int> test_senses;
  int true_senses = 0;
};

// Quality gate run by Generate: the mean within-sense pairwise cosine
// distance must be below the mean between-sense one, else runtime_error.
void CheckSenseSeparation(const Eigen::MatrixXd& x, const std::vector<int>& senses);

SynthWord Generate(const SynthSpec& spec);

// A multi-word benchmark. Word w gets k_true = k_min + (w mod (k_max-k_min+1))
// senses and its own seed derived from `seed`.
struct BenchmarkSpec {
  int words = 10;
  int k_min = 2;
  int k_max = 8;
  int dim = 16;
  int instances_per_sense = 20;
  double cluster_spread = 0.25;
  double paraphrase_jitter = 0.05;
  double separation = 0.8;
  int layer = 0;
  uint64_t seed = 2023;
};

SynthSpec WordSpec(const BenchmarkSpec& bench, int word);
std::vector<SynthWord> GenerateBenchmark(const BenchmarkSpec& bench);

// Writes <lemma>.<pos>.train.dump, <lemma>.<pos>.test.dump per word and a
// combined gold.key into `dir`. With `layer_names`, dumps are named
// <lemma>.<pos>.layer<L>.<split>.dump after each word's layer.
void WriteBenchmark(const std::vector<SynthWord>& words,
                    const std::filesystem::path& dir, bool layer_names = false);

}  // namespace wsimim

#endif  // WSIMIM_SYNTHBENCH_H_
