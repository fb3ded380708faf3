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

// wsimim: word sense induction over contextual vector dumps.
//
// Exit status: 0 when every word completed, 1 when some word failed (the
// others are still reported), 2 on usage, config or input errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wsimim/clustering.h"
#include "wsimim/datamodel.h"
#include "wsimim/metrics.h"
#include "wsimim/mim.h"
#include "wsimim/pipeline.h"
#include "wsimim/polysemy.h"
#include "wsimim/synthbench.h"

namespace {

using namespace wsimim;

constexpr char kReportColumns[] =
    "report.tsv columns: group status runs k_mean k_std polysemy_mean "
    "first_mean first_std second_mean second_std avg_mean avg_std; the last "
    "row is ALL. first/second are V-Measure/F-Score (crisp) or F-BC/F-NMI "
    "(graded), in percent.";
constexpr char kEvaluateColumns[] =
    "TSV columns: metric group mean std runs; metrics are V-Measure, F-Score "
    "(crisp) or F-BC, F-NMI (graded), then AVG, in percent; group ALL is the "
    "macro average over lemma.pos groups.";
constexpr char kSweepColumns[] =
    "TSV columns: layer first_mean first_std second_mean second_std avg_mean "
    "avg_std, in percent.";

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Flags shared by train-mim, pipeline and sweep-layers. Only flags that
// were given override the config.
struct MimFlags {
  int hidden_dim = 0, num_classes = 0, epochs = 0, batch_size = 0, runs = 0;
  double lr_init = 0.0, match_coeff = 0.0;
  CLI::Option *o_hidden, *o_classes, *o_epochs, *o_batch, *o_runs, *o_lr,
      *o_match;

  void Add(CLI::App* app) {
    o_hidden = app->add_option("--hidden-dim", hidden_dim, "hidden layer width");
    o_classes = app->add_option("--num-classes", num_classes, "output classes C");
    o_epochs = app->add_option("--epochs", epochs);
    o_batch = app->add_option("--batch-size", batch_size);
    o_runs = app->add_option("--runs", runs, "training restarts");
    o_lr = app->add_option("--lr", lr_init, "initial learning rate");
    o_match = app->add_option("--match-coeff", match_coeff, "match loss weight");
  }
  void Apply(MimConfig& c) const {
    if (*o_hidden) c.hidden_dim = hidden_dim;
    if (*o_classes) c.num_classes = num_classes;
    if (*o_epochs) c.epochs = epochs;
    if (*o_batch) c.batch_size = batch_size;
    if (*o_runs) c.runs = runs;
    if (*o_lr) c.lr_init = lr_init;
    if (*o_match) c.match_coeff = match_coeff;
  }
};

struct PipelineFlags {
  std::string config, dumps, gold, output, mode, selection;
  int fixed_k = 0, workers = 0;
  uint64_t seed = 0;
  bool graded = false, crisp = false, baseline = false, drop_missing = false;
  CLI::Option *o_fixed_k, *o_workers, *o_seed;
  MimFlags mim;

  void Add(CLI::App* app) {
    app->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--dumps", dumps, "directory of vector dumps");
    app->add_option("--gold", gold, "gold key; omit to skip scoring");
    app->add_option("--output", output, "output directory");
    app->add_option("--mode", mode, "cluster count: fixed or dynamic")
        ->check(CLI::IsMember({"fixed", "dynamic"}));
    o_fixed_k = app->add_option("--k", fixed_k, "cluster count in fixed mode");
    app->add_flag("--graded", graded, "emit graded keys and graded metrics");
    app->add_flag("--crisp", crisp, "emit crisp keys and crisp metrics");
    app->add_flag("--baseline", baseline, "cluster raw vectors, skip MIM");
    app->add_option("--selection", selection,
                    "per-run: score every restart; best: keep the best one")
        ->check(CLI::IsMember({"per-run", "best"}));
    app->add_flag("--drop-missing", drop_missing,
                  "drop gold instances missing from the system key");
    o_workers = app->add_option("--workers", workers, "words processed in parallel");
    o_seed = app->add_option("--seed", seed, "global seed");
    mim.Add(app);
  }

  PipelineConfig Resolve() const {
    PipelineConfig c = config.empty() ? PipelineConfig{} : LoadPipelineConfig(config);
    if (!dumps.empty()) c.dumps_dir = dumps;
    if (!gold.empty()) c.gold_path = gold;
    if (!output.empty()) c.output_dir = output;
    if (mode == "fixed") c.mode = ClusterMode::kFixed;
    if (mode == "dynamic") c.mode = ClusterMode::kDynamic;
    if (*o_fixed_k) c.fixed_k = fixed_k;
    if (graded) c.graded = true;
    if (crisp) c.graded = false;
    if (baseline) c.baseline = true;
    if (selection == "per-run") c.selection = RunSelection::kPerRun;
    if (selection == "best") c.selection = RunSelection::kBestOfRuns;
    if (drop_missing) c.drop_missing = true;
    if (*o_workers) c.workers = workers;
    if (*o_seed) c.seed = seed;
    mim.Apply(c.mim);
    c.Validate();
    if (c.dumps_dir.empty()) throw std::invalid_argument("no dump directory given");
    if (!c.gold_path.empty() && !std::filesystem::exists(c.gold_path))
      throw std::invalid_argument("gold key " + c.gold_path.string() + " not found");
    return c;
  }
};

int RunSynth(const BenchmarkSpec& bench, const std::string& out, bool layer_names) {
  const std::vector<SynthWord> words = GenerateBenchmark(bench);
  WriteBenchmark(words, out, layer_names);
  for (const SynthWord& w : words)
    std::cout << w.train.Group() << "\t" << w.true_senses << "\n";
  return 0;
}

int RunPipelineCommand(const PipelineFlags& flags) {
  const PipelineConfig config = flags.Resolve();
  const std::vector<WordInput> words = LoadWords(config.dumps_dir);
  if (words.empty())
    throw std::runtime_error("no dumps found in " + config.dumps_dir.string());
  std::optional<SenseKey> gold;
  if (!config.gold_path.empty()) gold = ParseKey(config.gold_path, config.graded);
  const PipelineReport report =
      RunPipeline(config, words, gold ? &*gold : nullptr);
  std::cout << report.ToText();
  if (!config.output_dir.empty()) {
    WritePipelineOutputs(report, config.output_dir);
    WriteText((config.output_dir / "config.json").string(),
              PipelineConfigToJson(config));
  }
  return report.AllOk() ? 0 : 1;
}

std::vector<int> CountSensesPerGroup(const SenseKey& gold,
                                     const std::vector<std::string>& groups) {
  std::map<std::string, std::set<std::string>> senses;
  for (const KeyRecord& r : gold.records)
    for (const SenseAssignment& a : r.assignments) senses[r.id.Group()].insert(a.sense);
  std::vector<int> out;
  for (const std::string& g : groups) {
    const auto it = senses.find(g);
    if (it == senses.end()) throw std::runtime_error("gold has no senses for " + g);
    out.push_back(static_cast<int>(it->second.size()));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word sense induction over contextual vector dumps.\n"
               "Exit status: 0 if every word completed, 1 if some word failed, "
               "2 on usage or input errors."};
  app.require_subcommand(1);

  // synth
  BenchmarkSpec bench;
  std::string synth_out;
  bool synth_layer_names = false;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic benchmark");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--words", bench.words);
  synth->add_option("--k-min", bench.k_min, "fewest senses per word");
  synth->add_option("--k-max", bench.k_max, "most senses per word");
  synth->add_option("--dim", bench.dim);
  synth->add_option("--per-sense", bench.instances_per_sense);
  synth->add_option("--spread", bench.cluster_spread, "sense noise std");
  synth->add_option("--jitter", bench.paraphrase_jitter, "paraphrase noise std");
  synth->add_option("--separation", bench.separation, "minimum centroid distance");
  synth->add_option("--seed", bench.seed);
  synth->add_option("--layer", bench.layer)->each([&](const std::string&) {
    synth_layer_names = true;
  });
  synth->footer("Prints one line per word: group and true sense count. "
                "With --layer, dumps are named <group>.layer<L>.<split>.dump.");

  // train-mim
  std::string train_path, val_path, model_out, trace_out;
  uint64_t train_seed = 0;
  MimFlags train_flags;
  CLI::App* train = app.add_subcommand("train-mim", "train the MIM network on one word");
  train->add_option("--train", train_path, "train dump")->required()->check(CLI::ExistingFile);
  train->add_option("--val", val_path, "validation dump")->required()->check(CLI::ExistingFile);
  train->add_option("--out", model_out, "checkpoint path")->required();
  train->add_option("--seed", train_seed);
  train->add_option("--trace", trace_out, "TSV of run epoch val_loss steps");
  train_flags.Add(train);

  // embed
  std::string embed_model, embed_dump, embed_out;
  bool embed_binary = false;
  CLI::App* embed = app.add_subcommand("embed", "embed a dump with a trained model");
  embed->add_option("--model", embed_model, "checkpoint")->required()->check(CLI::ExistingFile);
  embed->add_option("--dump", embed_dump, "input dump")->required()->check(CLI::ExistingFile);
  embed->add_option("--out", embed_out, "output dump of embeddings")->required();
  embed->add_flag("--binary", embed_binary, "write float32 body");

  // cluster
  std::string cluster_dump, cluster_out;
  int cluster_k = 7;
  bool cluster_dynamic = false, cluster_graded = false;
  PolysemyCalibration calibration = DefaultCalibration();
  int grid_dims = kDefaultGridDims, grid_levels = kDefaultGridLevels;
  CLI::App* cluster = app.add_subcommand("cluster", "cluster one dump into a system key");
  cluster->add_option("--dump", cluster_dump)->required()->check(CLI::ExistingFile);
  cluster->add_option("--out", cluster_out, "key path; stdout if omitted");
  cluster->add_option("--k", cluster_k, "cluster count");
  cluster->add_flag("--dynamic", cluster_dynamic, "pick k from the polysemy score");
  cluster->add_flag("--graded", cluster_graded, "attach centroid-softmax grades");
  cluster->add_option("--score-low", calibration.score_low);
  cluster->add_option("--score-high", calibration.score_high);
  cluster->add_option("--k-min", calibration.k_min);
  cluster->add_option("--k-max", calibration.k_max);

  // polysemy
  std::vector<std::string> poly_dumps;
  std::string poly_fit_gold;
  CLI::App* poly = app.add_subcommand("polysemy", "polysemy scores of dumps");
  poly->add_option("dumps", poly_dumps, "dump files")->required()->check(CLI::ExistingFile);
  poly->add_option("--dims", grid_dims, "principal components kept");
  poly->add_option("--levels", grid_levels, "grid pyramid levels");
  poly->add_option("--fit", poly_fit_gold,
                   "gold key: fit the score-to-k calibration on these dumps")
      ->check(CLI::ExistingFile);
  poly->footer("Prints group, score, k under the default calibration. With "
               "--fit, also prints the fitted score_low score_high.");

  // evaluate
  std::string eval_gold, eval_task = "crisp", eval_tsv;
  std::vector<std::string> eval_systems;
  bool eval_drop = false;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score system keys against gold");
  evaluate->add_option("--gold", eval_gold)->required()->check(CLI::ExistingFile);
  evaluate->add_option("systems", eval_systems, "system keys")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--task", eval_task)->check(CLI::IsMember({"crisp", "graded"}));
  evaluate->add_flag("--drop-missing", eval_drop);
  evaluate->add_option("--tsv", eval_tsv, "write the machine-readable report here");
  evaluate->footer(kEvaluateColumns);

  // pipeline
  PipelineFlags pipe_flags;
  CLI::App* pipeline = app.add_subcommand("pipeline", "train, embed, cluster and score every word");
  pipe_flags.Add(pipeline);
  pipeline->footer(std::string(kReportColumns) +
                   " Flags override the config file; relative paths in the "
                   "config resolve against its directory.");

  // sweep-layers
  PipelineFlags sweep_flags;
  std::vector<int> sweep_layers;
  CLI::App* sweep = app.add_subcommand("sweep-layers", "score against layer index");
  sweep_flags.Add(sweep);
  sweep->add_option("--layers", sweep_layers, "layer indices")->required()->delimiter(',');
  sweep->footer(std::string(kSweepColumns) +
                " Dumps are <group>.layer<L>.<split>.dump. The TSV goes to "
                "<output>/sweep.tsv when --output is set.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors share the error exit code
  }

  try {
    if (*synth) return RunSynth(bench, synth_out, synth_layer_names);

    if (*train) {
      const VectorPairSet train_set = ReadVectorDump(train_path);
      const VectorPairSet val_set = ReadVectorDump(val_path);
      MimConfig config;
      config.input_dim = train_set.dim;
      config.seed = train_seed;
      train_flags.Apply(config);
      TrainingTrace trace;
      const MimModel model = Train(train_set, val_set, config, &trace);
      SaveCheckpoint(model, model_out);
      if (!trace_out.empty()) {
        std::string tsv = "run\tepoch\tval_loss\tsteps\n";
        for (const EpochRecord& e : trace.epochs) {
          tsv += std::to_string(e.run) + "\t" + std::to_string(e.epoch) + "\t" +
                 FormatDouble(e.val_loss) + "\t" + std::to_string(e.steps) + "\n";
        }
        WriteText(trace_out, tsv);
      }
      std::cout << "best run " << model.run_id << " epoch " << model.epoch_id
                << " val_loss " << FormatDouble(model.best_val_loss) << "\n";
      return 0;
    }

    if (*embed) {
      const MimModel model = LoadCheckpoint(embed_model);
      const VectorPairSet in = ReadVectorDump(embed_dump);
      const SenseEmbeddingSet emb = Embed(model, in);
      VectorPairSet out;
      out.lemma = in.lemma;
      out.pos = in.pos;
      out.layer = in.layer;
      out.split = Split::kTest;
      out.dim = static_cast<int>(emb.embeddings.cols());
      for (size_t i = 0; i < emb.ids.size(); ++i) {
        VectorPair p;
        p.id = emb.ids[i];
        p.x.assign(emb.embeddings.row(i).begin(), emb.embeddings.row(i).end());
        out.pairs.push_back(std::move(p));
      }
      WriteVectorDump(out, embed_out,
                      embed_binary ? DumpEncoding::kBinaryF32 : DumpEncoding::kText);
      return 0;
    }

    if (*cluster) {
      const VectorPairSet set = ReadVectorDump(cluster_dump);
      PipelineConfig config;
      config.mode = cluster_dynamic ? ClusterMode::kDynamic : ClusterMode::kFixed;
      config.fixed_k = cluster_k;
      config.calibration = calibration;
      config.graded = cluster_graded;
      config.Validate();
      WordInput word{set.Group(), set, set};
      ClusterChoice choice;
      const ClusteringSolution solution =
          ClusterWord(config, word, set.OriginalMatrix(), &choice);
      const SenseKey key = SolutionToKey(solution, cluster_graded);
      if (cluster_out.empty()) {
        std::cout << SerializeKey(key);
      } else {
        WriteKey(key, cluster_out);
      }
      std::cerr << set.Group() << " k=" << solution.k;
      if (choice.polysemy) std::cerr << " polysemy=" << FormatDouble(*choice.polysemy);
      std::cerr << "\n";
      return 0;
    }

    if (*poly) {
      std::vector<std::string> groups;
      std::vector<double> scores;
      for (const std::string& path : poly_dumps) {
        const VectorPairSet set = ReadVectorDump(path);
        const Eigen::MatrixXd m = set.OriginalMatrix();
        const int dims = std::min<int>(grid_dims, static_cast<int>(m.cols()));
        const double score = PolysemyScore(m, dims, grid_levels);
        groups.push_back(set.Group());
        scores.push_back(score);
        std::cout << set.Group() << "\t" << FormatDouble(score) << "\t"
                  << ClustersFromScore(score, DefaultCalibration()) << "\n";
      }
      if (!poly_fit_gold.empty()) {
        const SenseKey gold = ParseKey(std::filesystem::path(poly_fit_gold), false);
        const PolysemyCalibration fit =
            FitCalibration(scores, CountSensesPerGroup(gold, groups),
                           DefaultCalibration().k_min, DefaultCalibration().k_max);
        std::cout << "fit\t" << FormatDouble(fit.score_low) << "\t"
                  << FormatDouble(fit.score_high) << "\n";
      }
      return 0;
    }

    if (*evaluate) {
      const bool graded = eval_task == "graded";
      const SenseKey gold = ParseKey(std::filesystem::path(eval_gold), graded);
      std::vector<SenseKey> systems;
      for (const std::string& s : eval_systems)
        systems.push_back(ParseKey(std::filesystem::path(s), graded));
      MetricOptions options;
      options.missing = eval_drop ? MissingPolicy::kDrop : MissingPolicy::kPenalize;
      const EvaluationReport report =
          Evaluate(gold, systems, graded ? Task::kGraded : Task::kCrisp, options);
      std::cout << report.ToText();
      if (!eval_tsv.empty()) WriteText(eval_tsv, report.ToTsv());
      return 0;
    }

    if (*pipeline) return RunPipelineCommand(pipe_flags);

    if (*sweep) {
      const PipelineConfig config = sweep_flags.Resolve();
      if (config.gold_path.empty()) throw std::invalid_argument("sweep-layers needs --gold");
      const SenseKey gold = ParseKey(config.gold_path, config.graded);
      const SweepReport report = SweepLayers(config, sweep_layers, gold);
      std::cout << report.ToText();
      if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        WriteText((config.output_dir / "sweep.tsv").string(), report.ToTsv());
      }
      return 0;
    }
  } catch (const FormatError& e) {
    std::cerr << "wsimim: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wsimim: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
