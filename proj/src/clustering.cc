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

#include "wsimim/clustering.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wsimim {
namespace {

// Merge heights may wobble by rounding in the Lance-Williams update.
constexpr double kHeightSlack = 1e-12;

Eigen::MatrixXd NormalizedRows(const Eigen::MatrixXd& vectors) {
  Eigen::MatrixXd unit = vectors;
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double norm = unit.row(i).norm();
    if (norm > 0.0) unit.row(i) /= norm;
  }
  return unit;
}

int FindRoot(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

double CosineDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - a.dot(b) / (na * nb);
}

Eigen::MatrixXd CosineDistances(const Eigen::MatrixXd& vectors) {
  const Eigen::MatrixXd unit = NormalizedRows(vectors);
  Eigen::MatrixXd d = -(unit * unit.transpose());
  d.array() += 1.0;
  return d;
}

Dendrogram::Dendrogram(int leaf_count, std::vector<Merge> merges)
    : leaf_count_(leaf_count), merges_(std::move(merges)) {
  if (leaf_count_ < 1 ||
      merges_.size() != static_cast<size_t>(leaf_count_ - 1)) {
    throw std::invalid_argument("a dendrogram over n leaves has n-1 merges");
  }
}

std::vector<int> Dendrogram::Cut(int k) const {
  if (k < 1 || k > leaf_count_) {
    throw std::invalid_argument("k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(leaf_count_) + "]");
  }
  const int nodes = 2 * leaf_count_ - 1;
  std::vector<int> parent(nodes);
  std::iota(parent.begin(), parent.end(), 0);
  for (int m = 0; m < leaf_count_ - k; ++m) {
    const int node = leaf_count_ + m;
    parent[FindRoot(parent, merges_[m].left)] = node;
    parent[FindRoot(parent, merges_[m].right)] = node;
  }
  std::vector<int> label_of_root(nodes, -1);
  std::vector<int> labels(leaf_count_);
  int next = 0;
  for (int leaf = 0; leaf < leaf_count_; ++leaf) {
    const int root = FindRoot(parent, leaf);
    if (label_of_root[root] < 0) label_of_root[root] = next++;
    labels[leaf] = label_of_root[root];
  }
  return labels;
}

Dendrogram AverageLinkage(const Eigen::MatrixXd& vectors) {
  const int n = static_cast<int>(vectors.rows());
  if (n == 0) throw std::invalid_argument("cannot cluster an empty input");
  if (!vectors.allFinite()) throw std::invalid_argument("non-finite vectors");

  // Slot i holds the cluster whose smallest leaf is i; merging (i, j) with
  // i < j keeps slot i, so slot order is the tie-breaking order. nearest_dist
  // caches each row's minimum over later slots.
  Eigen::MatrixXd dist = CosineDistances(vectors);
  std::vector<bool> active(n, true);
  std::vector<int> size(n, 1);
  std::vector<int> node(n);
  std::iota(node.begin(), node.end(), 0);
  std::vector<int> nearest(n, -1);
  std::vector<double> nearest_dist(n, std::numeric_limits<double>::infinity());

  const auto refresh = [&](int i) {
    nearest[i] = -1;
    nearest_dist[i] = std::numeric_limits<double>::infinity();
    for (int j = i + 1; j < n; ++j) {
      if (active[j] && dist(i, j) < nearest_dist[i]) {
        nearest_dist[i] = dist(i, j);
        nearest[i] = j;
      }
    }
  };
  for (int i = 0; i < n; ++i) refresh(i);

  std::vector<Merge> merges;
  merges.reserve(n - 1);
  double last_height = -std::numeric_limits<double>::infinity();
  for (int step = 0; step < n - 1; ++step) {
    double closest = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n; ++p)
      if (active[p] && nearest[p] >= 0) closest = std::min(closest, nearest_dist[p]);
    const double cutoff = closest + kTieTolerance;
    int i = 0;
    while (!(active[i] && nearest[i] >= 0 && nearest_dist[i] <= cutoff)) ++i;
    int j = i + 1;
    while (!(active[j] && dist(i, j) <= cutoff)) ++j;
    const double height = dist(i, j);
    if (height < last_height - kHeightSlack)
      throw std::logic_error("average linkage produced a decreasing merge height");
    last_height = std::max(last_height, height);

    const double wi = size[i];
    const double wj = size[j];
    for (int p = 0; p < n; ++p) {
      if (!active[p] || p == i || p == j) continue;
      const double d = (wi * dist(i, p) + wj * dist(j, p)) / (wi + wj);
      dist(i, p) = d;
      dist(p, i) = d;
    }
    active[j] = false;
    size[i] += size[j];
    merges.push_back({node[i], node[j], height, size[i]});
    node[i] = n + step;

    refresh(i);
    for (int p = 0; p < n; ++p) {
      if (!active[p] || p == i) continue;
      if (p < i) {
        if (nearest[p] == i || nearest[p] == j) {
          refresh(p);
        } else if (dist(p, i) < nearest_dist[p]) {
          nearest[p] = i;
          nearest_dist[p] = dist(p, i);
        }
      } else if (p < j && nearest[p] == j) {
        refresh(p);
      }
    }
  }
  return Dendrogram(n, std::move(merges));
}

std::vector<int> Agglomerative(const Eigen::MatrixXd& vectors, int k) {
  const int n = static_cast<int>(vectors.rows());
  if (n == 0) throw std::invalid_argument("cannot cluster an empty input");
  if (k < 1 || k > n) {
    throw std::invalid_argument("k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  return AverageLinkage(vectors).Cut(k);
}

Eigen::MatrixXd Centroids(const Eigen::MatrixXd& vectors,
                          const std::vector<int>& labels, int k) {
  if (labels.size() != static_cast<size_t>(vectors.rows()))
    throw std::invalid_argument("one label per vector required");
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, vectors.cols());
  std::vector<int> counts(k, 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k)
      throw std::invalid_argument("label out of range");
    sums.row(labels[i]) += vectors.row(i);
    ++counts[labels[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0)
      throw std::invalid_argument("cluster " + std::to_string(c) + " is empty");
    sums.row(c) /= counts[c];
  }
  return sums;
}

Eigen::MatrixXd Grade(const Eigen::MatrixXd& vectors,
                      const Eigen::MatrixXd& centroids) {
  if (centroids.rows() < 1) throw std::invalid_argument("need >= 1 centroid");
  if (centroids.cols() != vectors.cols())
    throw std::invalid_argument("centroid dimension mismatch");
  Eigen::MatrixXd sim = NormalizedRows(vectors) *
                        NormalizedRows(centroids).transpose();
  sim = sim.colwise() - sim.rowwise().maxCoeff();
  sim = sim.array().exp();
  sim.array().colwise() /= sim.rowwise().sum().array();
  return sim;
}

ClusteringSolution ClusterInstances(const std::vector<InstanceId>& ids,
                                    const Eigen::MatrixXd& vectors, int k,
                                    bool graded) {
  if (ids.empty()) throw std::invalid_argument("cannot cluster an empty input");
  if (ids.size() != static_cast<size_t>(vectors.rows()))
    throw std::invalid_argument("one id per vector required");
  ClusteringSolution solution;
  solution.lemma = ids.front().lemma;
  solution.pos = ids.front().pos;
  solution.k = std::min<int>(k, static_cast<int>(ids.size()));
  solution.ids = ids;
  solution.labels = Agglomerative(vectors, solution.k);
  if (graded) {
    solution.grades =
        Grade(vectors, Centroids(vectors, solution.labels, solution.k));
  }
  return solution;
}

}  // namespace wsimim
