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

#include "wsimim/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wsimim/clustering.h"
#include "wsimim/rng.h"

namespace wsimim {
namespace {

using nlohmann::json;

std::string Fixed(double value, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string PlusMinus(const Summary& s) {
  return Fixed(s.mean) + "±" + Fixed(s.std);
}

// Left-aligned first column, right-aligned others.
std::string AlignedTable(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  const auto display_width = [](const std::string& s) {
    // "±" is two bytes in UTF-8 but one column.
    size_t w = 0;
    for (const unsigned char c : s) w += (c & 0xC0) != 0x80;
    return w;
  };
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], display_width(row[c]));
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - display_width(row[c]), ' ');
      if (c) line += "  ";
      line += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

std::string TsvRow(const std::vector<std::string>& fields) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) line += '\t';
    line += fields[i];
  }
  return line + '\n';
}

std::vector<double> Collect(const std::vector<WordRun>& runs,
                            std::optional<double> WordRun::*field) {
  std::vector<double> out;
  for (const WordRun& r : runs)
    if (r.*field) out.push_back(*(r.*field));
  return out;
}

template <typename T>
void Assign(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

void RejectUnknown(const json& obj, const std::set<std::string>& known,
                   const std::string& where) {
  if (!obj.is_object())
    throw std::invalid_argument(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key))
      throw std::invalid_argument("unknown config key '" + where + key + "'");
  }
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

void PipelineConfig::Validate() const {
  if (fixed_k < 1) throw std::invalid_argument("fixed_k must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (grid_dims < 1 || grid_levels < 1)
    throw std::invalid_argument("grid dims and levels must be >= 1");
  calibration.Validate();
  MimConfig probe = mim;
  probe.input_dim = std::max(1, probe.input_dim);
  probe.Validate();
}

int PipelineConfig::ScoredRuns() const {
  if (baseline || selection == RunSelection::kBestOfRuns) return 1;
  return mim.runs;
}

PipelineConfig PipelineConfigFromJson(const std::string& text) {
  const json root = json::parse(text);
  RejectUnknown(root,
                {"dumps", "gold", "output", "mim", "clustering", "polysemy",
                 "baseline", "selection", "drop_missing", "workers", "seed"},
                "");
  PipelineConfig c;
  if (root.contains("dumps")) c.dumps_dir = root.at("dumps").get<std::string>();
  if (root.contains("gold")) c.gold_path = root.at("gold").get<std::string>();
  if (root.contains("output")) c.output_dir = root.at("output").get<std::string>();
  if (root.contains("mim")) {
    const json& m = root.at("mim");
    RejectUnknown(m,
                  {"hidden_dim", "num_classes", "epochs", "batch_size", "runs",
                   "lr_init", "match_coeff"},
                  "mim.");
    Assign(m, "hidden_dim", c.mim.hidden_dim);
    Assign(m, "num_classes", c.mim.num_classes);
    Assign(m, "epochs", c.mim.epochs);
    Assign(m, "batch_size", c.mim.batch_size);
    Assign(m, "runs", c.mim.runs);
    Assign(m, "lr_init", c.mim.lr_init);
    Assign(m, "match_coeff", c.mim.match_coeff);
  }
  if (root.contains("clustering")) {
    const json& m = root.at("clustering");
    RejectUnknown(m, {"mode", "fixed_k", "graded"}, "clustering.");
    if (m.contains("mode")) {
      const std::string mode = m.at("mode").get<std::string>();
      if (mode == "fixed") {
        c.mode = ClusterMode::kFixed;
      } else if (mode == "dynamic") {
        c.mode = ClusterMode::kDynamic;
      } else {
        throw std::invalid_argument("clustering.mode must be fixed or dynamic");
      }
    }
    Assign(m, "fixed_k", c.fixed_k);
    Assign(m, "graded", c.graded);
  }
  if (root.contains("polysemy")) {
    const json& m = root.at("polysemy");
    RejectUnknown(m, {"dims", "levels", "score_low", "score_high", "k_min", "k_max"},
                  "polysemy.");
    Assign(m, "dims", c.grid_dims);
    Assign(m, "levels", c.grid_levels);
    Assign(m, "score_low", c.calibration.score_low);
    Assign(m, "score_high", c.calibration.score_high);
    Assign(m, "k_min", c.calibration.k_min);
    Assign(m, "k_max", c.calibration.k_max);
  }
  Assign(root, "baseline", c.baseline);
  if (root.contains("selection")) {
    const std::string s = root.at("selection").get<std::string>();
    if (s == "per-run") {
      c.selection = RunSelection::kPerRun;
    } else if (s == "best") {
      c.selection = RunSelection::kBestOfRuns;
    } else {
      throw std::invalid_argument("selection must be per-run or best");
    }
  }
  Assign(root, "drop_missing", c.drop_missing);
  Assign(root, "workers", c.workers);
  Assign(root, "seed", c.seed);
  c.Validate();
  return c;
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  PipelineConfig c = PipelineConfigFromJson(buffer.str());
  // Relative paths are relative to the config file.
  const auto resolve = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = path.parent_path() / p;
  };
  resolve(c.dumps_dir);
  resolve(c.gold_path);
  resolve(c.output_dir);
  return c;
}

std::string PipelineConfigToJson(const PipelineConfig& c) {
  json root;
  root["dumps"] = c.dumps_dir.string();
  root["gold"] = c.gold_path.string();
  root["output"] = c.output_dir.string();
  root["mim"] = {{"hidden_dim", c.mim.hidden_dim},
                 {"num_classes", c.mim.num_classes},
                 {"epochs", c.mim.epochs},
                 {"batch_size", c.mim.batch_size},
                 {"runs", c.mim.runs},
                 {"lr_init", c.mim.lr_init},
                 {"match_coeff", c.mim.match_coeff}};
  root["clustering"] = {
      {"mode", c.mode == ClusterMode::kFixed ? "fixed" : "dynamic"},
      {"fixed_k", c.fixed_k},
      {"graded", c.graded}};
  root["polysemy"] = {{"dims", c.grid_dims},
                      {"levels", c.grid_levels},
                      {"score_low", c.calibration.score_low},
                      {"score_high", c.calibration.score_high},
                      {"k_min", c.calibration.k_min},
                      {"k_max", c.calibration.k_max}};
  root["baseline"] = c.baseline;
  root["selection"] =
      c.selection == RunSelection::kPerRun ? "per-run" : "best";
  root["drop_missing"] = c.drop_missing;
  root["workers"] = c.workers;
  root["seed"] = c.seed;
  return root.dump(2) + "\n";
}

std::vector<WordInput> LoadWords(const std::filesystem::path& dumps_dir,
                                 std::optional<int> layer) {
  if (!std::filesystem::is_directory(dumps_dir))
    throw std::runtime_error("dump directory " + dumps_dir.string() +
                             " does not exist");
  const std::string suffix =
      (layer ? ".layer" + std::to_string(*layer) : std::string()) +
      ".train.dump";
  std::set<std::string> groups;
  std::set<std::string> any_layer_groups;
  for (const auto& entry : std::filesystem::directory_iterator(dumps_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      groups.insert(name.substr(0, name.size() - suffix.size()));
    }
    if (layer) {
      const size_t at = name.find(".layer");
      if (at != std::string::npos) any_layer_groups.insert(name.substr(0, at));
    }
  }
  if (layer && groups.empty()) {
    throw std::runtime_error("no dumps for layer " + std::to_string(*layer) +
                             " in " + dumps_dir.string());
  }
  for (const std::string& g : any_layer_groups) {
    if (!groups.contains(g)) {
      throw std::runtime_error("missing layer " + std::to_string(*layer) +
                               " train dump for " + g);
    }
  }
  std::vector<WordInput> words;
  for (const std::string& group : groups) {
    const std::string stem =
        group + (layer ? ".layer" + std::to_string(*layer) : std::string());
    const auto test_path = dumps_dir / (stem + ".test.dump");
    if (!std::filesystem::exists(test_path)) {
      throw std::runtime_error(
          (layer ? "missing layer " + std::to_string(*layer) + " test dump "
                 : std::string("missing test dump ")) +
          test_path.string());
    }
    WordInput word;
    word.group = group;
    word.train = ReadVectorDump(dumps_dir / (stem + ".train.dump"));
    word.test = ReadVectorDump(test_path);
    if (word.train.Group() != group || word.test.Group() != group)
      throw std::runtime_error("dump headers disagree with file name " + stem);
    if (layer && (word.train.layer != *layer || word.test.layer != *layer))
      throw std::runtime_error("dump header layer differs from file name " + stem);
    words.push_back(std::move(word));
  }
  return words;
}

MimConfig WordMimConfig(const PipelineConfig& config, const WordInput& word,
                        int run) {
  MimConfig mim = config.mim;
  mim.input_dim = word.train.dim;
  mim.seed = DeriveSeed(config.seed, word.group, static_cast<uint64_t>(run));
  if (config.selection == RunSelection::kPerRun) mim.runs = 1;
  return mim;
}

MimModel TrainWord(const PipelineConfig& config, const WordInput& word,
                   int run) {
  if (word.train.dim != word.test.dim) {
    throw std::invalid_argument("train dim " + std::to_string(word.train.dim) +
                                " differs from test dim " +
                                std::to_string(word.test.dim));
  }
  // The test pairs double as the validation set.
  return Train(word.train, word.test, WordMimConfig(config, word, run));
}

Eigen::MatrixXd WordRepresentation(const PipelineConfig& config,
                                   const WordInput& word, int run) {
  if (config.baseline) return word.test.OriginalMatrix();
  return Embed(TrainWord(config, word, run), word.test).embeddings;
}

ClusterChoice ChooseClusterCount(const PipelineConfig& config,
                                 const Eigen::MatrixXd& vectors) {
  ClusterChoice choice;
  const int n = static_cast<int>(vectors.rows());
  if (config.mode == ClusterMode::kFixed) {
    choice.k = config.fixed_k;
  } else {
    const int dims = std::min<int>(config.grid_dims, static_cast<int>(vectors.cols()));
    choice.polysemy = PolysemyScore(vectors, dims, config.grid_levels);
    choice.k = ClustersFromScore(*choice.polysemy, config.calibration);
  }
  choice.k = std::clamp(choice.k, 1, std::max(1, n));
  return choice;
}

ClusteringSolution ClusterWord(const PipelineConfig& config,
                               const WordInput& word,
                               const Eigen::MatrixXd& vectors,
                               ClusterChoice* choice_out) {
  if (word.test.pairs.empty())
    throw std::invalid_argument("word " + word.group + " has no test instances");
  const ClusterChoice choice = ChooseClusterCount(config, vectors);
  if (choice_out) *choice_out = choice;
  std::vector<InstanceId> ids;
  for (const VectorPair& p : word.test.pairs) ids.push_back(p.id);
  return ClusterInstances(ids, vectors, choice.k, config.graded);
}

MetricPair MetricNames(bool graded) {
  return graded ? MetricPair{"F-BC", "F-NMI"}
                : MetricPair{"V-Measure", "F-Score"};
}

KeyScores ScoreKey(const SenseKey& gold, const SenseKey& sys, bool graded,
                   const MetricOptions& options) {
  if (graded)
    return {FuzzyBCubed(gold, sys, options), FuzzyNmi(gold, sys, options)};
  return {VMeasure(gold, sys, options), PairedFScore(gold, sys, options)};
}

Summary Summarize(const std::vector<double>& values) {
  Summary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  for (const double v : values) s.mean += v;
  s.mean /= s.count;
  double var = 0.0;
  for (const double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / s.count);
  return s;
}

bool PipelineReport::AllOk() const {
  return std::all_of(words.begin(), words.end(),
                     [](const WordReport& w) { return w.ok; });
}

std::string PipelineReport::ToText() const {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"word", "status", "runs", "k", "polysemy", metrics.first,
                  metrics.second, "AVG"});
  const auto summary_cell = [](const std::vector<double>& v) {
    return v.empty() ? std::string("-") : PlusMinus(Summarize(v));
  };
  for (const WordReport& w : words) {
    std::vector<double> ks;
    for (const WordRun& r : w.runs) ks.push_back(r.k);
    const std::vector<double> poly = Collect(w.runs, &WordRun::polysemy);
    rows.push_back({w.group, w.ok ? "ok" : "error",
                    std::to_string(w.runs.size()), summary_cell(ks),
                    poly.empty() ? "-" : Fixed(Summarize(poly).mean, 4),
                    summary_cell(Collect(w.runs, &WordRun::first)),
                    summary_cell(Collect(w.runs, &WordRun::second)),
                    summary_cell(Collect(w.runs, &WordRun::avg))});
  }
  std::vector<double> ks, first, second, avg;
  for (const RunAggregate& r : runs) {
    ks.push_back(r.mean_k);
    if (r.first) first.push_back(*r.first);
    if (r.second) second.push_back(*r.second);
    if (r.avg) avg.push_back(*r.avg);
  }
  rows.push_back({"ALL", AllOk() ? "ok" : "error", std::to_string(runs.size()),
                  summary_cell(ks), "-", summary_cell(first),
                  summary_cell(second), summary_cell(avg)});
  std::string out = AlignedTable(rows);
  out += "\naverage number of clusters: " +
         (ks.empty() ? std::string("-") : Fixed(Summarize(ks).mean)) + "\n";
  out += "scores: " + std::string(scored ? "percent, macro-averaged over words"
                                         : "not computed (no gold key)") +
         "\n";
  for (const WordReport& w : words)
    if (!w.ok) out += "error " + w.group + ": " + w.error + "\n";
  return out;
}

std::string PipelineReport::ToTsv() const {
  std::string out = TsvRow({"group", "status", "runs", "k_mean", "k_std",
                            "polysemy_mean", "first_mean", "first_std",
                            "second_mean", "second_std", "avg_mean", "avg_std"});
  const auto cells = [](const std::vector<double>& v) {
    if (v.empty()) return std::vector<std::string>{"-", "-"};
    const Summary s = Summarize(v);
    return std::vector<std::string>{Fixed(s.mean, 4), Fixed(s.std, 4)};
  };
  const auto row = [&](const std::string& group, bool ok, size_t n,
                       const std::vector<double>& ks,
                       const std::vector<double>& poly,
                       const std::vector<double>& a,
                       const std::vector<double>& b,
                       const std::vector<double>& g) {
    std::vector<std::string> fields = {group, ok ? "ok" : "error",
                                       std::to_string(n)};
    for (const auto& v : {ks}) {
      const auto c = cells(v);
      fields.insert(fields.end(), c.begin(), c.end());
    }
    fields.push_back(poly.empty() ? "-" : Fixed(Summarize(poly).mean, 6));
    for (const auto& v : {a, b, g}) {
      const auto c = cells(v);
      fields.insert(fields.end(), c.begin(), c.end());
    }
    out += TsvRow(fields);
  };
  for (const WordReport& w : words) {
    std::vector<double> ks;
    for (const WordRun& r : w.runs) ks.push_back(r.k);
    row(w.group, w.ok, w.runs.size(), ks, Collect(w.runs, &WordRun::polysemy),
        Collect(w.runs, &WordRun::first), Collect(w.runs, &WordRun::second),
        Collect(w.runs, &WordRun::avg));
  }
  std::vector<double> ks, first, second, avg;
  for (const RunAggregate& r : runs) {
    ks.push_back(r.mean_k);
    if (r.first) first.push_back(*r.first);
    if (r.second) second.push_back(*r.second);
    if (r.avg) avg.push_back(*r.avg);
  }
  row("ALL", AllOk(), runs.size(), ks, {}, first, second, avg);
  return out;
}

PipelineReport RunPipeline(const PipelineConfig& config,
                           const std::vector<WordInput>& words,
                           const SenseKey* gold) {
  config.Validate();
  const int runs = config.ScoredRuns();
  PipelineReport report;
  report.metrics = MetricNames(config.graded);
  report.scored = gold != nullptr;
  report.graded = config.graded;
  report.words.resize(words.size());

  // keys[w][r]
  std::vector<std::vector<SenseKey>> keys(words.size());
  std::atomic<size_t> next{0};
  const auto worker = [&]() {
    for (size_t w = next++; w < words.size(); w = next++) {
      WordReport& out = report.words[w];
      out.group = words[w].group;
      try {
        std::vector<WordRun> word_runs;
        std::vector<SenseKey> word_keys;
        for (int r = 0; r < runs; ++r) {
          const Eigen::MatrixXd vectors = WordRepresentation(config, words[w], r);
          ClusterChoice choice;
          const ClusteringSolution solution =
              ClusterWord(config, words[w], vectors, &choice);
          word_runs.push_back({solution.k, choice.polysemy, {}, {}, {}});
          word_keys.push_back(SolutionToKey(solution, config.graded));
        }
        out.runs = std::move(word_runs);
        keys[w] = std::move(word_keys);
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
        out.runs.clear();
      }
    }
  };
  const int threads = std::min<int>(config.workers, static_cast<int>(words.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  MetricOptions options;
  options.missing =
      config.drop_missing ? MissingPolicy::kDrop : MissingPolicy::kPenalize;
  for (int r = 0; r < runs; ++r) {
    SenseKey key;
    double k_sum = 0.0;
    int k_count = 0;
    for (size_t w = 0; w < words.size(); ++w) {
      if (!report.words[w].ok) continue;
      const SenseKey& part = keys[w][r];
      key.records.insert(key.records.end(), part.records.begin(),
                         part.records.end());
      k_sum += report.words[w].runs[r].k;
      ++k_count;
    }
    RunAggregate aggregate;
    aggregate.mean_k = k_count ? k_sum / k_count : 0.0;
    if (gold) {
      const KeyScores scores = ScoreKey(*gold, key, config.graded, options);
      aggregate.first = 100.0 * scores.first.value;
      aggregate.second = 100.0 * scores.second.value;
      aggregate.avg = GeometricAvg(*aggregate.first, *aggregate.second);
      std::map<std::string, std::pair<double, double>> by_group;
      for (const auto& g : scores.first.per_group) by_group[g.group].first = g.value;
      for (const auto& g : scores.second.per_group) by_group[g.group].second = g.value;
      for (WordReport& w : report.words) {
        if (!w.ok) continue;
        const auto it = by_group.find(w.group);
        if (it == by_group.end()) continue;
        WordRun& wr = w.runs[r];
        wr.first = 100.0 * it->second.first;
        wr.second = 100.0 * it->second.second;
        wr.avg = GeometricAvg(*wr.first, *wr.second);
      }
    }
    report.runs.push_back(aggregate);
    report.keys.push_back(std::move(key));
  }
  return report;
}

void WritePipelineOutputs(const PipelineReport& report,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "keys");
  WriteFile(dir / "report.txt", report.ToText());
  WriteFile(dir / "report.tsv", report.ToTsv());
  for (size_t r = 0; r < report.keys.size(); ++r)
    WriteKey(report.keys[r], dir / "keys" / ("run" + std::to_string(r) + ".key"));
}

const EvaluationRow& EvaluationReport::Find(const std::string& metric,
                                            const std::string& group) const {
  for (const EvaluationRow& row : rows)
    if (row.metric == metric && row.group == group) return row;
  throw std::out_of_range("no evaluation row " + metric + "/" + group);
}

std::string EvaluationReport::ToText() const {
  std::vector<std::vector<std::string>> table;
  table.push_back({"group", metrics.first, metrics.second, "AVG"});
  std::vector<std::string> groups;
  for (const EvaluationRow& row : rows)
    if (row.metric == metrics.first) groups.push_back(row.group);
  for (const std::string& g : groups) {
    table.push_back({g, PlusMinus(Find(metrics.first, g).value),
                     PlusMinus(Find(metrics.second, g).value),
                     PlusMinus(Find("AVG", g).value)});
  }
  return AlignedTable(table);
}

std::string EvaluationReport::ToTsv() const {
  std::string out = TsvRow({"metric", "group", "mean", "std", "runs"});
  for (const EvaluationRow& row : rows) {
    out += TsvRow({row.metric, row.group, Fixed(row.value.mean, 4),
                   Fixed(row.value.std, 4), std::to_string(row.value.count)});
  }
  return out;
}

EvaluationReport Evaluate(const SenseKey& gold,
                          const std::vector<SenseKey>& systems, Task task,
                          const MetricOptions& options) {
  if (systems.empty()) throw std::invalid_argument("no system keys to evaluate");
  const bool graded = task == Task::kGraded;
  EvaluationReport report;
  report.metrics = MetricNames(graded);
  // values[group][metric] -> one value per key
  std::map<std::string, std::map<std::string, std::vector<double>>> values;
  for (const SenseKey& sys : systems) {
    const KeyScores scores = ScoreKey(gold, sys, graded, options);
    for (size_t g = 0; g < scores.first.per_group.size(); ++g) {
      const std::string& group = scores.first.per_group[g].group;
      const double a = 100.0 * scores.first.per_group[g].value;
      const double b = 100.0 * scores.second.per_group[g].value;
      values[group][report.metrics.first].push_back(a);
      values[group][report.metrics.second].push_back(b);
      values[group]["AVG"].push_back(GeometricAvg(a, b));
    }
    const double a = 100.0 * scores.first.value;
    const double b = 100.0 * scores.second.value;
    values["~ALL"][report.metrics.first].push_back(a);
    values["~ALL"][report.metrics.second].push_back(b);
    values["~ALL"]["AVG"].push_back(GeometricAvg(a, b));
  }
  for (const auto& [group, metrics] : values) {
    const std::string name = group == "~ALL" ? "ALL" : group;
    for (const std::string& metric :
         {report.metrics.first, report.metrics.second, std::string("AVG")}) {
      report.rows.push_back({metric, name, Summarize(metrics.at(metric))});
    }
  }
  return report;
}

std::string SweepReport::ToText() const {
  std::vector<std::vector<std::string>> table;
  table.push_back({"layer", metrics.first, metrics.second, "AVG"});
  for (const SweepRow& row : rows) {
    table.push_back({std::to_string(row.layer), PlusMinus(row.first),
                     PlusMinus(row.second), PlusMinus(row.avg)});
  }
  return AlignedTable(table);
}

std::string SweepReport::ToTsv() const {
  std::string out = TsvRow({"layer", "first_mean", "first_std", "second_mean",
                            "second_std", "avg_mean", "avg_std"});
  for (const SweepRow& row : rows) {
    out += TsvRow({std::to_string(row.layer), Fixed(row.first.mean, 4),
                   Fixed(row.first.std, 4), Fixed(row.second.mean, 4),
                   Fixed(row.second.std, 4), Fixed(row.avg.mean, 4),
                   Fixed(row.avg.std, 4)});
  }
  return out;
}

SweepReport SweepLayers(const PipelineConfig& config,
                        const std::vector<int>& layers, const SenseKey& gold) {
  if (layers.empty()) throw std::invalid_argument("no layers to sweep");
  SweepReport report;
  report.metrics = MetricNames(config.graded);
  std::map<std::string, std::vector<InstanceId>> reference_ids;
  for (const int layer : layers) {
    const std::vector<WordInput> words = LoadWords(config.dumps_dir, layer);
    std::map<std::string, std::vector<InstanceId>> ids;
    for (const WordInput& w : words)
      for (const VectorPair& p : w.test.pairs) ids[w.group].push_back(p.id);
    if (reference_ids.empty()) {
      reference_ids = ids;
    } else if (ids != reference_ids) {
      throw std::runtime_error("layer " + std::to_string(layer) +
                               " has a different instance set than layer " +
                               std::to_string(layers.front()));
    }
    const PipelineReport run = RunPipeline(config, words, &gold);
    if (!run.AllOk()) {
      for (const WordReport& w : run.words) {
        if (!w.ok) {
          throw std::runtime_error("layer " + std::to_string(layer) + ", word " +
                                   w.group + ": " + w.error);
        }
      }
    }
    std::vector<double> a, b, g;
    for (const RunAggregate& r : run.runs) {
      a.push_back(*r.first);
      b.push_back(*r.second);
      g.push_back(*r.avg);
    }
    report.rows.push_back({layer, Summarize(a), Summarize(b), Summarize(g)});
  }
  return report;
}

}  // namespace wsimim
