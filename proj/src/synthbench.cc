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

#include "wsimim/synthbench.h"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <Eigen/Core>

#include "wsimim/clustering.h"
#include "wsimim/rng.h"

namespace wsimim {
namespace {

constexpr int kCentroidAttempts = 100000;

std::vector<Eigen::VectorXd> SampleCentroids(const SynthSpec& spec, Rng& rng) {
  std::vector<Eigen::VectorXd> centroids;
  int attempts = 0;
  while (static_cast<int>(centroids.size()) < spec.senses) {
    if (++attempts > kCentroidAttempts) {
      throw std::runtime_error(
          "cannot place " + std::to_string(spec.senses) +
          " unit centroids with separation " + std::to_string(spec.separation) +
          " in dimension " + std::to_string(spec.dim));
    }
    Eigen::VectorXd c(spec.dim);
    for (int i = 0; i < spec.dim; ++i) c(i) = rng.Normal();
    const double norm = c.norm();
    if (norm == 0.0) continue;
    c /= norm;
    bool far_enough = true;
    for (const auto& other : centroids)
      far_enough = far_enough && (c - other).norm() >= spec.separation;
    if (far_enough) centroids.push_back(std::move(c));
  }
  return centroids;
}

}  // namespace

void CheckSenseSeparation(const Eigen::MatrixXd& x, const std::vector<int>& senses) {
  const Eigen::MatrixXd d = CosineDistances(x);
  double within = 0.0, between = 0.0;
  long long n_within = 0, n_between = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      if (senses[i] == senses[j]) {
        within += d(i, j);
        ++n_within;
      } else {
        between += d(i, j);
        ++n_between;
      }
    }
  }
  if (n_within == 0 || n_between == 0) return;
  if (within / n_within >= between / n_between) {
    throw std::runtime_error(
        "synthetic fixture failed the quality gate: senses are not separable");
  }
}

void SynthSpec::Validate() const {
  if (dim < 1 || senses < 1 || instances_per_sense < 1)
    throw std::invalid_argument("dim, senses and instances_per_sense must be >= 1");
  if (!(paraphrase_jitter >= 0.0) || !(cluster_spread > 0.0))
    throw std::invalid_argument("noise levels must be non-negative");
  if (!(paraphrase_jitter < cluster_spread && cluster_spread < separation)) {
    throw std::invalid_argument(
        "synthetic spec needs paraphrase_jitter < cluster_spread < separation");
  }
}

SynthWord Generate(const SynthSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed);
  const std::vector<Eigen::VectorXd> centroids = SampleCentroids(spec, rng);

  const int total = spec.senses * spec.instances_per_sense;
  Eigen::MatrixXd x(total, spec.dim);
  Eigen::MatrixXd x_prime(total, spec.dim);
  std::vector<int> senses(total);
  for (int s = 0, row = 0; s < spec.senses; ++s) {
    for (int i = 0; i < spec.instances_per_sense; ++i, ++row) {
      senses[row] = s;
      for (int a = 0; a < spec.dim; ++a)
        x(row, a) = centroids[s](a) + spec.cluster_spread * rng.Normal();
      if (spec.paraphrase_jitter == 0.0) {
        x_prime.row(row) = x.row(row);
      } else {
        for (int a = 0; a < spec.dim; ++a)
          x_prime(row, a) = x(row, a) + spec.paraphrase_jitter * rng.Normal();
      }
    }
  }
  CheckSenseSeparation(x, senses);

  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(order);
  const int train_count = (total * 4) / 5;
  std::vector<bool> is_train(total, false);
  for (int i = 0; i < train_count; ++i) is_train[order[i]] = true;

  SynthWord word;
  word.true_senses = spec.senses;
  for (VectorPairSet* set : {&word.train, &word.test}) {
    set->lemma = spec.lemma;
    set->pos = spec.pos;
    set->layer = spec.layer;
    set->dim = spec.dim;
  }
  word.train.split = Split::kTrain;
  word.test.split = Split::kTest;
  for (int row = 0; row < total; ++row) {
    VectorPair pair;
    pair.id = InstanceId{spec.lemma, spec.pos, std::to_string(row)};
    pair.x.resize(spec.dim);
    pair.x_prime.emplace(spec.dim);
    for (int a = 0; a < spec.dim; ++a) {
      pair.x[a] = x(row, a);
      (*pair.x_prime)[a] = x_prime(row, a);
    }
    if (is_train[row]) {
      word.train_senses.push_back(senses[row]);
      word.train.pairs.push_back(std::move(pair));
    } else {
      word.test_senses.push_back(senses[row]);
      word.gold.records.push_back(
          {pair.id, {{GroupName(spec.lemma, spec.pos) + ".sense" +
                          std::to_string(senses[row]),
                      1.0}}});
      word.test.pairs.push_back(std::move(pair));
    }
  }
  return word;
}

SynthSpec WordSpec(const BenchmarkSpec& bench, int word) {
  if (bench.k_min < 1 || bench.k_max < bench.k_min)
    throw std::invalid_argument("benchmark needs 1 <= k_min <= k_max");
  SynthSpec spec;
  char name[32];
  std::snprintf(name, sizeof(name), "synth%02d", word);
  spec.lemma = name;
  spec.pos = Pos::kNoun;
  spec.layer = bench.layer;
  spec.dim = bench.dim;
  spec.senses = bench.k_min + word % (bench.k_max - bench.k_min + 1);
  spec.instances_per_sense = bench.instances_per_sense;
  spec.cluster_spread = bench.cluster_spread;
  spec.paraphrase_jitter = bench.paraphrase_jitter;
  spec.separation = bench.separation;
  spec.seed = DeriveSeed(bench.seed, static_cast<uint64_t>(word));
  return spec;
}

std::vector<SynthWord> GenerateBenchmark(const BenchmarkSpec& bench) {
  std::vector<SynthWord> words;
  for (int w = 0; w < bench.words; ++w) words.push_back(Generate(WordSpec(bench, w)));
  return words;
}

void WriteBenchmark(const std::vector<SynthWord>& words,
                    const std::filesystem::path& dir, bool layer_names) {
  std::filesystem::create_directories(dir);
  SenseKey gold;
  for (const SynthWord& w : words) {
    std::string stem = w.train.Group();
    if (layer_names) stem += ".layer" + std::to_string(w.train.layer);
    WriteVectorDump(w.train, dir / (stem + ".train.dump"));
    WriteVectorDump(w.test, dir / (stem + ".test.dump"));
    gold.records.insert(gold.records.end(), w.gold.records.begin(),
                        w.gold.records.end());
  }
  WriteKey(gold, dir / "gold.key");
}

}  // namespace wsimim
