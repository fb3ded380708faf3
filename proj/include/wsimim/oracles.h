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

// Brute-force reference implementations. They share no code with the
// production paths they check and are only linked into tests.

#ifndef WSIMIM_ORACLES_H_
#define WSIMIM_ORACLES_H_

#include <vector>

#include <Eigen/Core>

namespace wsimim::oracle {

// Textbook O(n^3) UPGMA: every round recomputes every cluster-pair average
// from the leaf distance matrix. Same tie-breaking and labelling contract as
// Agglomerative.
std::vector<int> Hierarchical(const Eigen::MatrixXd& vectors, int k);

// Negative mutual information by explicit double sums over classes, using
// per-entry joint probabilities built pair by pair.
double IicLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp);

// -coeff * sum of per-pair cosines, computed coordinate by coordinate.
double MatchLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp,
                 double coeff);

// Crisp metrics over one group from label vectors.
double PairedFScore(const std::vector<int>& gold, const std::vector<int>& sys);
double VMeasure(const std::vector<int>& gold, const std::vector<int>& sys);
// Per-instance B-Cubed F1, averaged: precision_i = |cluster(i) ∩ class(i)| /
// |cluster(i)|, recall_i = |cluster(i) ∩ class(i)| / |class(i)|.
double BCubed(const std::vector<int>& gold, const std::vector<int>& sys);
// MI / max(H(gold), H(sys)); 0 when both entropies vanish.
double Nmi(const std::vector<int>& gold, const std::vector<int>& sys);

// Mutual information of a soft table (rows gold senses, columns clusters)
// by explicit double sum, divided by the larger marginal entropy.
double SoftNmi(const Eigen::MatrixXd& table);

}  // namespace wsimim::oracle

#endif  // WSIMIM_ORACLES_H_
