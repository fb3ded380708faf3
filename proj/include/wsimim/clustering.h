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

#ifndef WSIMIM_CLUSTERING_H_
#define WSIMIM_CLUSTERING_H_

#include <vector>

#include <Eigen/Core>

#include "wsimim/datamodel.h"

namespace wsimim {

// Cosine distance 1 - a.b / (|a||b|). A zero vector has similarity 0 (so
// distance 1) with everything, itself included.
double CosineDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
// Pairwise cosine distances between rows.
Eigen::MatrixXd CosineDistances(const Eigen::MatrixXd& vectors);

struct Merge {
  int left = 0;   // node ids: leaves are 0..n-1, merge m creates node n+m
  int right = 0;
  double height = 0.0;
  int size = 0;   // leaves under the new node
};

class Dendrogram {
 public:
  Dendrogram(int leaf_count, std::vector<Merge> merges);

  int leaf_count() const { return leaf_count_; }
  const std::vector<Merge>& merges() const { return merges_; }

  // Partition into k groups by undoing the last k-1 merges. Labels are
  // numbered by first appearance in leaf order.
  std::vector<int> Cut(int k) const;

 private:
  int leaf_count_;
  std::vector<Merge> merges_;
};

// Distances closer than this count as equal when breaking ties, so that
// rounding noise does not decide between mathematically equal pairs.
inline constexpr double kTieTolerance = 1e-12;

// Average-linkage (UPGMA) agglomeration on cosine distances. Among pairs
// within kTieTolerance of the closest, the pair whose smallest member leaves
// are lexicographically smallest merges first.
Dendrogram AverageLinkage(const Eigen::MatrixXd& vectors);

// Labels for k clusters of the rows of `vectors`. Requires 1 <= k <= n.
std::vector<int> Agglomerative(const Eigen::MatrixXd& vectors, int k);

// Arithmetic mean of each cluster's members (k x m).
Eigen::MatrixXd Centroids(const Eigen::MatrixXd& vectors,
                          const std::vector<int>& labels, int k);

// Row i is softmax over clusters of cos(v_i, centroid_c).
Eigen::MatrixXd Grade(const Eigen::MatrixXd& vectors,
                      const Eigen::MatrixXd& centroids);

// Clusters `vectors` (rows aligned with ids) into k groups; when `graded`,
// attaches centroid-softmax grades. k is capped at the instance count.
ClusteringSolution ClusterInstances(const std::vector<InstanceId>& ids,
                                    const Eigen::MatrixXd& vectors, int k,
                                    bool graded);

}  // namespace wsimim

#endif  // WSIMIM_CLUSTERING_H_
