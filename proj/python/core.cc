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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wsimim/clustering.h"
#include "wsimim/datamodel.h"
#include "wsimim/metrics.h"
#include "wsimim/mim.h"
#include "wsimim/pipeline.h"
#include "wsimim/polysemy.h"
#include "wsimim/synthbench.h"

namespace py = pybind11;

namespace wsimim {
namespace {

SenseKey KeyArg(const std::string& text, bool graded) {
  return ParseKeyString(text, graded);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Word sense induction core";

  py::register_exception<InstanceMismatch>(m, "InstanceMismatch", PyExc_ValueError);

  py::class_<MimConfig>(m, "MimConfig")
      .def(py::init<>())
      .def_readwrite("input_dim", &MimConfig::input_dim)
      .def_readwrite("hidden_dim", &MimConfig::hidden_dim)
      .def_readwrite("num_classes", &MimConfig::num_classes)
      .def_readwrite("epochs", &MimConfig::epochs)
      .def_readwrite("batch_size", &MimConfig::batch_size)
      .def_readwrite("runs", &MimConfig::runs)
      .def_readwrite("lr_init", &MimConfig::lr_init)
      .def_readwrite("match_coeff", &MimConfig::match_coeff)
      .def_readwrite("seed", &MimConfig::seed);

  py::class_<MimModel>(m, "MimModel")
      .def_readonly("config", &MimModel::config)
      .def_readonly("best_val_loss", &MimModel::best_val_loss)
      .def_readonly("run_id", &MimModel::run_id)
      .def_readonly("epoch_id", &MimModel::epoch_id)
      .def("forward", [](const MimModel& model, const Eigen::MatrixXd& x) {
        return ForwardBatch(model, x);
      })
      .def("save", [](const MimModel& model, const std::filesystem::path& p) {
        SaveCheckpoint(model, p);
      });
  m.def("load_model", &LoadCheckpoint, py::arg("path"));

  py::class_<VectorPairSet>(m, "VectorPairSet")
      .def_readonly("lemma", &VectorPairSet::lemma)
      .def_readonly("layer", &VectorPairSet::layer)
      .def_readonly("dim", &VectorPairSet::dim)
      .def_property_readonly("group", &VectorPairSet::Group)
      .def_property_readonly("uids", [](const VectorPairSet& s) {
        std::vector<std::string> out;
        for (const VectorPair& p : s.pairs) out.push_back(p.id.uid);
        return out;
      })
      .def("__len__", [](const VectorPairSet& s) { return s.pairs.size(); })
      .def("originals", &VectorPairSet::OriginalMatrix)
      .def("paraphrases", &VectorPairSet::ParaphraseMatrix);
  m.def("read_dump", &ReadVectorDump, py::arg("path"));

  m.def("iic_loss", &IicLoss, py::arg("phi_x"), py::arg("phi_xp"));
  m.def("match_loss", &MatchLoss, py::arg("phi_x"), py::arg("phi_xp"),
        py::arg("coeff"));
  m.def("train_mim", [](const VectorPairSet& train, const VectorPairSet& val,
                        MimConfig config) {
    config.input_dim = train.dim;
    py::gil_scoped_release release;
    return Train(train, val, config);
  }, py::arg("train"), py::arg("val"), py::arg("config"));
  m.def("embed", [](const MimModel& model, const VectorPairSet& set) {
    return Embed(model, set).embeddings;
  }, py::arg("model"), py::arg("set"));

  m.def("agglomerative", &Agglomerative, py::arg("vectors"), py::arg("k"));
  m.def("centroids", &Centroids, py::arg("vectors"), py::arg("labels"), py::arg("k"));
  m.def("grade", &Grade, py::arg("vectors"), py::arg("centroids"));

  m.def("polysemy_score", &PolysemyScore, py::arg("vectors"),
        py::arg("dims") = kDefaultGridDims, py::arg("levels") = kDefaultGridLevels);
  m.def("clusters_from_score", [](double score, double low, double high, int k_min,
                                  int k_max) {
    return ClustersFromScore(score, {low, high, k_min, k_max});
  }, py::arg("score"), py::arg("score_low") = DefaultCalibration().score_low,
     py::arg("score_high") = DefaultCalibration().score_high,
     py::arg("k_min") = DefaultCalibration().k_min,
     py::arg("k_max") = DefaultCalibration().k_max);

  m.def("v_measure", [](const std::string& gold, const std::string& sys) {
    return VMeasure(KeyArg(gold, false), KeyArg(sys, false)).value;
  }, py::arg("gold"), py::arg("system"));
  m.def("paired_f_score", [](const std::string& gold, const std::string& sys) {
    return PairedFScore(KeyArg(gold, false), KeyArg(sys, false)).value;
  }, py::arg("gold"), py::arg("system"));
  m.def("fuzzy_bcubed", [](const std::string& gold, const std::string& sys) {
    return FuzzyBCubed(KeyArg(gold, true), KeyArg(sys, true)).value;
  }, py::arg("gold"), py::arg("system"));
  m.def("fuzzy_nmi", [](const std::string& gold, const std::string& sys) {
    return FuzzyNmi(KeyArg(gold, true), KeyArg(sys, true)).value;
  }, py::arg("gold"), py::arg("system"));
  m.def("geometric_avg", &GeometricAvg, py::arg("a"), py::arg("b"));

  m.def("write_benchmark", [](const std::filesystem::path& dir, int words,
                              uint64_t seed) {
    BenchmarkSpec bench;
    bench.words = words;
    bench.seed = seed;
    const std::vector<SynthWord> data = GenerateBenchmark(bench);
    WriteBenchmark(data, dir);
    std::vector<int> k;
    for (const SynthWord& w : data) k.push_back(w.true_senses);
    return k;
  }, py::arg("dir"), py::arg("words") = 10, py::arg("seed") = 2023);

  m.def("run_pipeline", [](const std::filesystem::path& config_path) {
    const PipelineConfig config = LoadPipelineConfig(config_path);
    std::optional<SenseKey> gold;
    if (!config.gold_path.empty()) gold = ParseKey(config.gold_path, config.graded);
    PipelineReport report;
    {
      py::gil_scoped_release release;
      report = RunPipeline(config, LoadWords(config.dumps_dir),
                           gold ? &*gold : nullptr);
    }
    std::vector<std::string> keys;
    for (const SenseKey& k : report.keys) keys.push_back(SerializeKey(k));
    py::dict out;
    out["ok"] = report.AllOk();
    out["text"] = report.ToText();
    out["tsv"] = report.ToTsv();
    out["keys"] = keys;
    return out;
  }, py::arg("config"));
}

}  // namespace wsimim
