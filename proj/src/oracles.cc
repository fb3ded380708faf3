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

#include "wsimim/oracles.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "wsimim/clustering.h"

namespace wsimim::oracle {
namespace {

double Cosine(const Eigen::MatrixXd& v, Eigen::Index a, Eigen::Index b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    dot += v(a, i) * v(b, i);
    na += v(a, i) * v(a, i);
    nb += v(b, i) * v(b, i);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double EntropyOfCounts(const std::map<int, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

}  // namespace

std::vector<int> Hierarchical(const Eigen::MatrixXd& vectors, int k) {
  const int n = static_cast<int>(vectors.rows());
  if (n == 0 || k < 1 || k > n) throw std::invalid_argument("bad k");
  std::vector<std::vector<double>> leaf(n, std::vector<double>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) leaf[a][b] = 1.0 - Cosine(vectors, a, b);

  // Ordered by smallest member; merging b into a (a < b) keeps the order.
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});
  while (static_cast<int>(clusters.size()) > k) {
    const auto average = [&](size_t a, size_t b) {
      double sum = 0.0;
      for (const int p : clusters[a])
        for (const int q : clusters[b]) sum += leaf[p][q];
      return sum / static_cast<double>(clusters[a].size() * clusters[b].size());
    };
    double best = INFINITY;
    for (size_t a = 0; a < clusters.size(); ++a)
      for (size_t b = a + 1; b < clusters.size(); ++b) best = std::min(best, average(a, b));
    // First pair in (a, b) order that is within tolerance of the best.
    size_t best_a = 0, best_b = 1;
    bool found = false;
    for (size_t a = 0; a < clusters.size() && !found; ++a) {
      for (size_t b = a + 1; b < clusters.size() && !found; ++b) {
        if (average(a, b) <= best + kTieTolerance) {
          best_a = a;
          best_b = b;
          found = true;
        }
      }
    }
    clusters[best_a].insert(clusters[best_a].end(), clusters[best_b].begin(),
                            clusters[best_b].end());
    clusters.erase(clusters.begin() + static_cast<long>(best_b));
  }
  std::vector<int> owner(n);
  for (size_t c = 0; c < clusters.size(); ++c)
    for (const int leaf_id : clusters[c]) owner[leaf_id] = static_cast<int>(c);
  std::map<int, int> relabel;
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const auto it = relabel.emplace(owner[i], static_cast<int>(relabel.size())).first;
    labels[i] = it->second;
  }
  return labels;
}

double IicLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp) {
  const Eigen::Index n = phi_x.rows();
  const Eigen::Index classes = phi_x.cols();
  const double eps = 1e-12;
  std::vector<std::vector<double>> joint(classes, std::vector<double>(classes, 0.0));
  for (Eigen::Index c = 0; c < classes; ++c) {
    for (Eigen::Index d = 0; d < classes; ++d) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        s += 0.5 * (phi_x(i, c) * phi_xp(i, d) + phi_x(i, d) * phi_xp(i, c));
      }
      joint[c][d] = s / static_cast<double>(n);
    }
  }
  std::vector<double> px(classes, 0.0), py(classes, 0.0);
  for (Eigen::Index c = 0; c < classes; ++c) {
    for (Eigen::Index d = 0; d < classes; ++d) {
      px[c] += joint[c][d];
      py[d] += joint[c][d];
    }
  }
  double mi = 0.0;
  for (Eigen::Index c = 0; c < classes; ++c) {
    for (Eigen::Index d = 0; d < classes; ++d) {
      const double p = joint[c][d];
      if (p == 0.0) continue;
      mi += p * std::log(std::max(p, eps) /
                         (std::max(px[c], eps) * std::max(py[d], eps)));
    }
  }
  return -mi;
}

double MatchLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp,
                 double coeff) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < phi_x.rows(); ++i) {
    double dot = 0.0, nx = 0.0, np = 0.0;
    for (Eigen::Index c = 0; c < phi_x.cols(); ++c) {
      dot += phi_x(i, c) * phi_xp(i, c);
      nx += phi_x(i, c) * phi_x(i, c);
      np += phi_xp(i, c) * phi_xp(i, c);
    }
    total += dot / std::sqrt(nx * np);
  }
  return -coeff * total;
}

double PairedFScore(const std::vector<int>& gold, const std::vector<int>& sys) {
  long long both = 0, sys_pairs = 0, gold_pairs = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    for (size_t j = i + 1; j < gold.size(); ++j) {
      const bool same_sys = sys[i] == sys[j];
      const bool same_gold = gold[i] == gold[j];
      sys_pairs += same_sys;
      gold_pairs += same_gold;
      both += same_sys && same_gold;
    }
  }
  const double precision =
      sys_pairs > 0 ? static_cast<double>(both) / static_cast<double>(sys_pairs) : 0.0;
  const double recall =
      gold_pairs > 0 ? static_cast<double>(both) / static_cast<double>(gold_pairs) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double VMeasure(const std::vector<int>& gold, const std::vector<int>& sys) {
  const double n = static_cast<double>(gold.size());
  std::map<int, double> classes, clusters;
  std::map<std::pair<int, int>, double> joint;
  for (size_t i = 0; i < gold.size(); ++i) {
    classes[gold[i]] += 1.0;
    clusters[sys[i]] += 1.0;
    joint[{gold[i], sys[i]}] += 1.0;
  }
  const double h_c = EntropyOfCounts(classes, n);
  const double h_k = EntropyOfCounts(clusters, n);
  double h_c_given_k = 0.0, h_k_given_c = 0.0;
  for (const auto& [key, count] : joint) {
    h_c_given_k -= (count / n) * std::log(count / clusters[key.second]);
    h_k_given_c -= (count / n) * std::log(count / classes[key.first]);
  }
  const double h = h_c == 0.0 ? 1.0 : 1.0 - h_c_given_k / h_c;
  const double c = h_k == 0.0 ? 1.0 : 1.0 - h_k_given_c / h_k;
  return h + c == 0.0 ? 0.0 : 2.0 * h * c / (h + c);
}

double BCubed(const std::vector<int>& gold, const std::vector<int>& sys) {
  double total = 0.0;
  for (size_t i = 0; i < gold.size(); ++i) {
    double same_both = 0.0, same_sys = 0.0, same_gold = 0.0;
    for (size_t j = 0; j < gold.size(); ++j) {
      same_sys += sys[i] == sys[j];
      same_gold += gold[i] == gold[j];
      same_both += (sys[i] == sys[j]) && (gold[i] == gold[j]);
    }
    const double p = same_both / same_sys;
    const double r = same_both / same_gold;
    total += 2.0 * p * r / (p + r);
  }
  return total / static_cast<double>(gold.size());
}

double Nmi(const std::vector<int>& gold, const std::vector<int>& sys) {
  const double n = static_cast<double>(gold.size());
  std::map<int, double> classes, clusters;
  std::map<std::pair<int, int>, double> joint;
  for (size_t i = 0; i < gold.size(); ++i) {
    classes[gold[i]] += 1.0;
    clusters[sys[i]] += 1.0;
    joint[{gold[i], sys[i]}] += 1.0;
  }
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    mi += (count / n) *
          std::log(n * count / (classes[key.first] * clusters[key.second]));
  }
  const double denom =
      std::max(EntropyOfCounts(classes, n), EntropyOfCounts(clusters, n));
  return denom == 0.0 ? 0.0 : mi / denom;
}

double SoftNmi(const Eigen::MatrixXd& table) {
  double total = 0.0;
  for (Eigen::Index s = 0; s < table.rows(); ++s)
    for (Eigen::Index c = 0; c < table.cols(); ++c) total += table(s, c);
  std::vector<double> rows(table.rows(), 0.0), cols(table.cols(), 0.0);
  for (Eigen::Index s = 0; s < table.rows(); ++s) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      rows[s] += table(s, c) / total;
      cols[c] += table(s, c) / total;
    }
  }
  double mi = 0.0;
  for (Eigen::Index s = 0; s < table.rows(); ++s) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      const double p = table(s, c) / total;
      if (p > 0.0) mi += p * std::log(p / (rows[s] * cols[c]));
    }
  }
  double hg = 0.0, hs = 0.0;
  for (const double p : rows)
    if (p > 0.0) hg -= p * std::log(p);
  for (const double p : cols)
    if (p > 0.0) hs -= p * std::log(p);
  const double denom = std::max(hg, hs);
  return denom == 0.0 ? 0.0 : mi / denom;
}

}  // namespace wsimim::oracle
