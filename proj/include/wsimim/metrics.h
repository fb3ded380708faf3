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

// Clustering evaluation against gold sense keys.
//
// Every clustering metric is computed per lemma.pos group and macro-averaged
// over the groups present in the gold key (equal weight per target word).
// Entropies use the natural logarithm. Values are in [0, 1].

#ifndef WSIMIM_METRICS_H_
#define WSIMIM_METRICS_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "wsimim/datamodel.h"

namespace wsimim {

// What to do with gold instances the system key does not mention. System
// instances absent from gold are always an error.
enum class MissingPolicy {
  kPenalize,  // each missing instance becomes its own singleton cluster
  kDrop,      // missing instances are removed from the gold side
};

struct MetricOptions {
  MissingPolicy missing = MissingPolicy::kPenalize;
};

struct GroupScore {
  std::string group;
  double value = 0.0;
};

struct MetricResult {
  double value = 0.0;                 // macro average
  std::vector<GroupScore> per_group;  // sorted by group name
};

// Raised when gold and system keys cannot be aligned.
class InstanceMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Counts of (gold class, system cluster) co-occurrences for one group.
struct ContingencyTable {
  Eigen::MatrixXd counts;  // classes x clusters
  Eigen::VectorXd class_totals;
  Eigen::RowVectorXd cluster_totals;
  double total = 0.0;
};

// Weighted table N[s][c] = sum_i w_gold(i, s) * w_sys(i, c) for every group.
// Crisp keys give plain counts.
struct GroupTable {
  std::string group;
  ContingencyTable table;
};
std::vector<GroupTable> BuildContingency(const SenseKey& gold,
                                         const SenseKey& sys,
                                         const MetricOptions& options = {});

// Crisp metrics (both keys must be crisp).
MetricResult VMeasure(const SenseKey& gold, const SenseKey& sys,
                      const MetricOptions& options = {});
MetricResult PairedFScore(const SenseKey& gold, const SenseKey& sys,
                          const MetricOptions& options = {});

// Graded metrics (crisp keys allowed).
MetricResult FuzzyBCubed(const SenseKey& gold, const SenseKey& sys,
                         const MetricOptions& options = {});
MetricResult FuzzyNmi(const SenseKey& gold, const SenseKey& sys,
                      const MetricOptions& options = {});

double VMeasureFromTable(const ContingencyTable& table);
double FuzzyNmiFromTable(const ContingencyTable& table);

// sqrt(a * b).
double GeometricAvg(double a, double b);

// 100 * (1 - |multiset intersection| / max(|original|, |paraphrase|)).
double PerturbationPercentage(const std::vector<std::string>& original,
                              const std::vector<std::string>& paraphrase);

// Mean of PerturbationPercentage over sentence pairs.
double MeanPerturbationPercentage(
    const std::vector<std::pair<std::vector<std::string>,
                                std::vector<std::string>>>& pairs);

}  // namespace wsimim

#endif  // WSIMIM_METRICS_H_
