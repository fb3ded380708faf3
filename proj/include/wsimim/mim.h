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

// Mutual-information-maximization (MIM) network: a three-layer projection
//
//   h1 = relu(x W1 + b1),  h2 = relu(h1 W2 + b2),  phi = softmax(h2 W3 + b3)
//
// trained on (original, paraphrase) vector pairs to maximize the mutual
// information between phi(x) and phi(x') while pulling the two outputs
// together. The first-layer activation h1 is the sense embedding.
//
// Batches are passed as two n x C matrices of output distributions (one row
// per pair).

#ifndef WSIMIM_MIM_H_
#define WSIMIM_MIM_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "wsimim/datamodel.h"

namespace wsimim {

struct MimConfig {
  int input_dim = 0;
  int hidden_dim = 2048;
  int num_classes = 7;
  int epochs = 5;
  int batch_size = 32;
  int runs = 8;
  double lr_init = 2e-5;
  double match_coeff = 0.1;
  uint64_t seed = 0;

  void Validate() const;

  friend bool operator==(const MimConfig&, const MimConfig&) = default;
};

// Parameter tensors in declared order. Also used for gradients and Adam
// moments, which share the shapes.
struct MimParameters {
  Eigen::MatrixXd w1;     // input_dim x hidden_dim
  Eigen::RowVectorXd b1;  // hidden_dim
  Eigen::MatrixXd w2;     // hidden_dim x hidden_dim
  Eigen::RowVectorXd b2;  // hidden_dim
  Eigen::MatrixXd w3;     // hidden_dim x num_classes
  Eigen::RowVectorXd b3;  // num_classes

  static MimParameters Zeros(const MimConfig& config);
  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
  static MimParameters Initialize(const MimConfig& config, uint64_t seed);

  size_t size() const;
  bool AllFinite() const;

  // Applies f(param, other) to each tensor pair in declared order.
  template <typename F>
  void ForEach(MimParameters& other, F&& f) {
    f(w1, other.w1);
    f(b1, other.b1);
    f(w2, other.w2);
    f(b2, other.b2);
    f(w3, other.w3);
    f(b3, other.b3);
  }

  friend bool operator==(const MimParameters& a, const MimParameters& b);
};

struct MimModel {
  MimConfig config;
  MimParameters params;
  double best_val_loss = 0.0;
  int run_id = 0;
  int epoch_id = 0;
};

struct ForwardResult {
  Eigen::VectorXd phi;  // num_classes, a probability vector
  Eigen::VectorXd h1;   // hidden_dim, post-ReLU
};

ForwardResult Forward(const MimModel& model, const Eigen::VectorXd& x);
// Row-wise output distributions for a batch of inputs.
Eigen::MatrixXd ForwardBatch(const MimModel& model, const Eigen::MatrixXd& x);

// Negative mutual information of the symmetrized joint distribution
// J = sym((1/n) phi_xᵀ phi_xp). Entries below 1e-12 are clamped inside the
// logarithms only, so exact zeros contribute nothing. Lies in [-ln C, 0].
double IicLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp);

// -coeff * sum_i cos(phi_x_i, phi_xp_i).
double MatchLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp,
                 double coeff);

double TotalLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp,
                 double match_coeff);

// Total loss of the model on input pairs (rows of x and x_prime).
double BatchLoss(const MimModel& model, const Eigen::MatrixXd& x,
                 const Eigen::MatrixXd& x_prime);

// Analytic gradient of BatchLoss with respect to every parameter.
MimParameters Gradient(const MimModel& model, const Eigen::MatrixXd& x,
                       const Eigen::MatrixXd& x_prime);

class AdamOptimizer {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  explicit AdamOptimizer(const MimConfig& config);

  // One bias-corrected Adam update with the given learning rate.
  void Step(MimParameters& params, const MimParameters& grad, double lr);

  int64_t steps() const { return t_; }
  const MimParameters& first_moment() const { return m_; }
  const MimParameters& second_moment() const { return v_; }

 private:
  MimParameters m_;
  MimParameters v_;
  int64_t t_ = 0;
};

// lr_init * (1 - step / total_steps) for step in [0, total_steps).
double LearningRate(double lr_init, int64_t step, int64_t total_steps);

struct EpochRecord {
  int run = 0;
  int epoch = 0;  // 0 is the untrained initialization
  double val_loss = 0.0;
  int64_t steps = 0;  // optimizer steps taken in this run so far
};

struct TrainingTrace {
  std::vector<EpochRecord> epochs;
};

// Runs config.runs independent restarts and returns the (run, epoch)
// snapshot with the lowest validation loss; the untrained initialization of
// each run is a candidate (epoch 0). Ties go to the earliest snapshot.
MimModel Train(const VectorPairSet& train_set, const VectorPairSet& val_set,
               const MimConfig& config, TrainingTrace* trace = nullptr);

// Seed used by restart `run` of a training call with the given config seed.
uint64_t RunSeed(uint64_t config_seed, int run);

struct SenseEmbeddingSet {
  std::vector<InstanceId> ids;
  Eigen::MatrixXd embeddings;  // one row per instance
};

// First-layer activations of the original vectors; paraphrases are ignored.
SenseEmbeddingSet Embed(const MimModel& model, const VectorPairSet& set);

// Checkpoint layout, all little-endian:
//   bytes 0-7   magic "WSIMIMCK"
//   u32         version (1)
//   i32 x 6     input_dim hidden_dim num_classes epochs batch_size runs
//   f64 x 2     lr_init match_coeff
//   u64         seed
//   i32 x 2     run_id epoch_id
//   f64         best_val_loss
//   f64 ...     W1 (row-major), b1, W2 (row-major), b2, W3 (row-major), b3
void SaveCheckpoint(const MimModel& model, const std::filesystem::path& path);
MimModel LoadCheckpoint(const std::filesystem::path& path);

}  // namespace wsimim

#endif  // WSIMIM_MIM_H_
