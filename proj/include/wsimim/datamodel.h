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

// Core domain types shared by every stage, the vector dump format written by
// the extractor, and SemEval key files.
//
// Vector dump, canonical text form:
//
//   #WSI-DUMP v1 lemma=<l> pos=<p> layer=<int> dim=<int> split=<train|test> count=<int>
//   <uid>\t<x: dim decimals>\t<x_prime: dim decimals or ->
//   ...
//
// Decimals are written in shortest round-trip form, so text dumps are
// bit-exact. The header may carry an extra `body=f32le` field, in which case
// the header is followed by `count` lines `<uid>\t<1|0>` (x_prime present or
// not) and then a packed little-endian float32 blob holding, per record, x
// followed by x_prime when present. The binary body is exact only for values
// representable as float32.
//
// Key file: one record per line,
//
//   <lemma>.<pos> <lemma>.<pos>.<uid> <sense>/<weight> [<sense>/<weight> ...]

#ifndef WSIMIM_DATAMODEL_H_
#define WSIMIM_DATAMODEL_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace wsimim {

// Raised when an input file does not conform to its format. `record` is the
// 1-based record number (0 for the header or file-level problems).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, size_t record)
      : std::runtime_error(what), record_(record) {}
  size_t record() const { return record_; }

 private:
  size_t record_;
};

enum class Pos : char { kNoun = 'n', kVerb = 'v', kAdjective = 'j' };

// Accepts n, v, j and the alias a (adjective). Throws std::invalid_argument
// otherwise.
Pos ParsePos(std::string_view tag);
char PosChar(Pos pos);

// "bank.n"
std::string GroupName(std::string_view lemma, Pos pos);

struct InstanceId {
  std::string lemma;
  Pos pos = Pos::kNoun;
  std::string uid;

  std::string Group() const { return GroupName(lemma, pos); }
  // "bank.n.12"
  std::string ToString() const;

  friend auto operator<=>(const InstanceId&, const InstanceId&) = default;
  friend bool operator==(const InstanceId&, const InstanceId&) = default;
};

struct VectorPair {
  InstanceId id;
  std::vector<double> x;
  std::optional<std::vector<double>> x_prime;

  friend bool operator==(const VectorPair&, const VectorPair&) = default;
};

enum class Split { kTrain, kTest };

std::string_view SplitName(Split split);

struct VectorPairSet {
  std::string lemma;
  Pos pos = Pos::kNoun;
  int layer = 0;
  int dim = 0;
  Split split = Split::kTrain;
  std::vector<VectorPair> pairs;

  std::string Group() const { return GroupName(lemma, pos); }

  // Throws std::invalid_argument naming the first violated invariant.
  void Validate() const;

  // Rows are the x vectors, in pair order.
  Eigen::MatrixXd OriginalMatrix() const;
  // Rows are the x_prime vectors; every pair must carry one.
  Eigen::MatrixXd ParaphraseMatrix() const;
  // True when every pair has x_prime.
  bool Complete() const;

  friend bool operator==(const VectorPairSet&, const VectorPairSet&) = default;
};

enum class DumpEncoding { kText, kBinaryF32 };

VectorPairSet ReadVectorDump(const std::filesystem::path& path);
// Validates before touching the file; a set that violates its invariants
// raises std::invalid_argument and nothing is written.
void WriteVectorDump(const VectorPairSet& set,
                     const std::filesystem::path& path,
                     DumpEncoding encoding = DumpEncoding::kText);

struct SenseAssignment {
  std::string sense;
  double weight = 1.0;

  friend bool operator==(const SenseAssignment&,
                         const SenseAssignment&) = default;
};

struct KeyRecord {
  InstanceId id;
  std::vector<SenseAssignment> assignments;

  friend bool operator==(const KeyRecord&, const KeyRecord&) = default;
};

struct SenseKey {
  std::vector<KeyRecord> records;

  // True when every record has exactly one assignment.
  bool Crisp() const;

  friend bool operator==(const SenseKey&, const SenseKey&) = default;
};

SenseKey ParseKey(std::istream& in, bool graded);
SenseKey ParseKey(const std::filesystem::path& path, bool graded);
SenseKey ParseKeyString(std::string_view text, bool graded);

std::string SerializeKey(const SenseKey& key);
void WriteKey(const SenseKey& key, const std::filesystem::path& path);

struct ClusteringSolution {
  std::string lemma;
  Pos pos = Pos::kNoun;
  int k = 0;
  std::vector<InstanceId> ids;
  std::vector<int> labels;  // parallel to ids, each in [0, k)
  // Optional per-instance applicability over the k clusters (rows).
  std::optional<Eigen::MatrixXd> grades;

  void Validate() const;
};

// Sense labels are "<lemma>.<pos>.cluster<K>". Graded keys list all k senses
// with the solution's grades; requesting graded output from a solution
// without grades is a precondition error.
SenseKey SolutionToKey(const ClusteringSolution& solution, bool graded);

// Shortest decimal that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace wsimim

#endif  // WSIMIM_DATAMODEL_H_
