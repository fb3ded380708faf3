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

#include "wsimim/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <unordered_map>

namespace wsimim {
namespace {

// One lemma.pos group with gold and system weights as dense rows.
struct AlignedGroup {
  std::string group;
  Eigen::MatrixXd gold;  // instances x gold senses
  Eigen::MatrixXd sys;   // instances x system clusters
};

class LabelIndex {
 public:
  int Get(const std::string& label) {
    const auto [it, inserted] = index_.emplace(label, static_cast<int>(index_.size()));
    return it->second;
  }
  int size() const { return static_cast<int>(index_.size()); }

 private:
  std::unordered_map<std::string, int> index_;
};

std::vector<AlignedGroup> Align(const SenseKey& gold, const SenseKey& sys,
                                const MetricOptions& options) {
  std::map<InstanceId, const KeyRecord*> sys_by_id;
  for (const KeyRecord& r : sys.records) {
    if (!sys_by_id.emplace(r.id, &r).second)
      throw InstanceMismatch("system key lists '" + r.id.ToString() + "' twice");
  }
  std::map<std::string, std::vector<const KeyRecord*>> gold_groups;
  std::map<InstanceId, bool> gold_ids;
  for (const KeyRecord& r : gold.records) {
    if (!gold_ids.emplace(r.id, true).second)
      throw InstanceMismatch("gold key lists '" + r.id.ToString() + "' twice");
    gold_groups[r.id.Group()].push_back(&r);
  }
  for (const auto& [id, record] : sys_by_id) {
    if (!gold_ids.contains(id))
      throw InstanceMismatch("system instance '" + id.ToString() +
                             "' is not in the gold key");
  }
  if (gold_groups.empty()) throw InstanceMismatch("gold key is empty");

  std::vector<AlignedGroup> out;
  for (const auto& [group, records] : gold_groups) {
    struct Row {
      std::vector<std::pair<int, double>> gold, sys;
    };
    std::vector<Row> rows;
    LabelIndex gold_labels, sys_labels;
    int missing = 0;
    for (const KeyRecord* g : records) {
      Row row;
      const auto it = sys_by_id.find(g->id);
      if (it == sys_by_id.end()) {
        if (options.missing == MissingPolicy::kDrop) continue;
        // A label no system cluster can share.
        row.sys.emplace_back(sys_labels.Get("\x01missing" + std::to_string(missing++)),
                             1.0);
      } else {
        for (const SenseAssignment& a : it->second->assignments)
          row.sys.emplace_back(sys_labels.Get(a.sense), a.weight);
      }
      for (const SenseAssignment& a : g->assignments)
        row.gold.emplace_back(gold_labels.Get(a.sense), a.weight);
      rows.push_back(std::move(row));
    }
    if (rows.empty()) continue;
    AlignedGroup aligned;
    aligned.group = group;
    aligned.gold = Eigen::MatrixXd::Zero(rows.size(), gold_labels.size());
    aligned.sys = Eigen::MatrixXd::Zero(rows.size(), sys_labels.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      for (const auto& [s, w] : rows[i].gold) aligned.gold(i, s) += w;
      for (const auto& [c, w] : rows[i].sys) aligned.sys(i, c) += w;
    }
    out.push_back(std::move(aligned));
  }
  if (out.empty()) throw InstanceMismatch("no gold instance left to score");
  return out;
}

void RequireCrisp(const SenseKey& key, const char* which) {
  if (!key.Crisp()) {
    throw std::invalid_argument(std::string(which) +
                                " key is graded; this metric needs crisp keys");
  }
}

ContingencyTable TableOf(const AlignedGroup& group) {
  ContingencyTable t;
  t.counts = group.gold.transpose() * group.sys;
  t.class_totals = t.counts.rowwise().sum();
  t.cluster_totals = t.counts.colwise().sum();
  t.total = t.counts.sum();
  return t;
}

MetricResult MacroAverage(const std::vector<AlignedGroup>& groups,
                          const std::function<double(const AlignedGroup&)>& f) {
  MetricResult result;
  for (const AlignedGroup& g : groups) {
    result.per_group.push_back({g.group, f(g)});
    result.value += result.per_group.back().value;
  }
  result.value /= static_cast<double>(groups.size());
  return result;
}

double Entropy(const Eigen::Ref<const Eigen::VectorXd>& counts, double total) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0.0) {
      const double p = counts(i) / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

double Pairs(double count) { return count * (count - 1.0) / 2.0; }

}  // namespace

std::vector<GroupTable> BuildContingency(const SenseKey& gold,
                                         const SenseKey& sys,
                                         const MetricOptions& options) {
  std::vector<GroupTable> out;
  for (const AlignedGroup& g : Align(gold, sys, options))
    out.push_back({g.group, TableOf(g)});
  return out;
}

double VMeasureFromTable(const ContingencyTable& t) {
  const double n = t.total;
  const double h_class = Entropy(t.class_totals, n);
  const double h_cluster = Entropy(t.cluster_totals.transpose(), n);
  double h_class_given_cluster = 0.0;
  double h_cluster_given_class = 0.0;
  for (Eigen::Index s = 0; s < t.counts.rows(); ++s) {
    for (Eigen::Index c = 0; c < t.counts.cols(); ++c) {
      const double nsc = t.counts(s, c);
      if (nsc <= 0.0) continue;
      h_class_given_cluster -= nsc / n * std::log(nsc / t.cluster_totals(c));
      h_cluster_given_class -= nsc / n * std::log(nsc / t.class_totals(s));
    }
  }
  const double h = h_class == 0.0 ? 1.0 : 1.0 - h_class_given_cluster / h_class;
  const double c =
      h_cluster == 0.0 ? 1.0 : 1.0 - h_cluster_given_class / h_cluster;
  if (h + c == 0.0) return 0.0;
  return 2.0 * h * c / (h + c);
}

double FuzzyNmiFromTable(const ContingencyTable& t) {
  const double n = t.total;
  const double h_gold = Entropy(t.class_totals, n);
  const double h_sys = Entropy(t.cluster_totals.transpose(), n);
  double mi = 0.0;
  for (Eigen::Index s = 0; s < t.counts.rows(); ++s) {
    for (Eigen::Index c = 0; c < t.counts.cols(); ++c) {
      const double p = t.counts(s, c) / n;
      if (p <= 0.0) continue;
      mi += p * std::log(p / ((t.class_totals(s) / n) * (t.cluster_totals(c) / n)));
    }
  }
  const double denom = std::max(h_gold, h_sys);
  if (denom == 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

MetricResult VMeasure(const SenseKey& gold, const SenseKey& sys,
                      const MetricOptions& options) {
  RequireCrisp(gold, "gold");
  RequireCrisp(sys, "system");
  return MacroAverage(Align(gold, sys, options), [](const AlignedGroup& g) {
    return VMeasureFromTable(TableOf(g));
  });
}

MetricResult PairedFScore(const SenseKey& gold, const SenseKey& sys,
                          const MetricOptions& options) {
  RequireCrisp(gold, "gold");
  RequireCrisp(sys, "system");
  return MacroAverage(Align(gold, sys, options), [](const AlignedGroup& g) {
    const ContingencyTable t = TableOf(g);
    double both = 0.0, sys_pairs = 0.0, gold_pairs = 0.0;
    for (Eigen::Index s = 0; s < t.counts.rows(); ++s)
      for (Eigen::Index c = 0; c < t.counts.cols(); ++c)
        both += Pairs(t.counts(s, c));
    for (Eigen::Index c = 0; c < t.cluster_totals.size(); ++c)
      sys_pairs += Pairs(t.cluster_totals(c));
    for (Eigen::Index s = 0; s < t.class_totals.size(); ++s)
      gold_pairs += Pairs(t.class_totals(s));
    const double precision = sys_pairs > 0.0 ? both / sys_pairs : 0.0;
    const double recall = gold_pairs > 0.0 ? both / gold_pairs : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
  });
}

MetricResult FuzzyBCubed(const SenseKey& gold, const SenseKey& sys,
                         const MetricOptions& options) {
  return MacroAverage(Align(gold, sys, options), [](const AlignedGroup& g) {
    const Eigen::Index n = g.gold.rows();
    const auto overlap = [](const Eigen::MatrixXd& w, Eigen::Index i,
                            Eigen::Index j) {
      return w.row(i).cwiseMin(w.row(j)).sum();
    };
    double sum_f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double agree = 0.0, sys_mass = 0.0, gold_mass = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double gij = overlap(g.gold, i, j);
        const double kij = overlap(g.sys, i, j);
        agree += std::min(gij, kij);
        sys_mass += kij;
        gold_mass += gij;
      }
      const double precision = sys_mass > 0.0 ? agree / sys_mass : 0.0;
      const double recall = gold_mass > 0.0 ? agree / gold_mass : 0.0;
      if (precision + recall > 0.0)
        sum_f += 2.0 * precision * recall / (precision + recall);
    }
    return sum_f / static_cast<double>(n);
  });
}

MetricResult FuzzyNmi(const SenseKey& gold, const SenseKey& sys,
                      const MetricOptions& options) {
  return MacroAverage(Align(gold, sys, options), [](const AlignedGroup& g) {
    return FuzzyNmiFromTable(TableOf(g));
  });
}

double GeometricAvg(double a, double b) {
  if (a < 0.0 || b < 0.0)
    throw std::invalid_argument("geometric average needs non-negative inputs");
  return std::sqrt(a * b);
}

double PerturbationPercentage(const std::vector<std::string>& original,
                              const std::vector<std::string>& paraphrase) {
  if (original.empty())
    throw std::invalid_argument("original token list is empty");
  std::map<std::string, int> counts;
  for (const auto& token : original) ++counts[token];
  size_t shared = 0;
  for (const auto& token : paraphrase) {
    auto it = counts.find(token);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++shared;
    }
  }
  const double longest =
      static_cast<double>(std::max(original.size(), paraphrase.size()));
  return 100.0 * (1.0 - static_cast<double>(shared) / longest);
}

double MeanPerturbationPercentage(
    const std::vector<std::pair<std::vector<std::string>,
                                std::vector<std::string>>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("no sentence pairs");
  double sum = 0.0;
  for (const auto& [original, paraphrase] : pairs)
    sum += PerturbationPercentage(original, paraphrase);
  return sum / static_cast<double>(pairs.size());
}

}  // namespace wsimim
