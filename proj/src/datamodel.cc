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

#include "wsimim/datamodel.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wsimim {
namespace {

constexpr std::string_view kDumpMagic = "#WSI-DUMP";
constexpr std::string_view kDumpVersion = "v1";
// Graded weights within this distance of 1 are accepted and rescaled.
constexpr double kWeightSumTolerance = 1e-3;
// Sums closer to 1 than this are left untouched so round trips stay exact.
constexpr double kWeightSumExact = 1e-9;

bool HasWhitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> SplitOn(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<double> ParseDouble(std::string_view s) {
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

std::optional<long long> ParseInt(std::string_view s) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return value;
}

void ValidateLemma(std::string_view lemma) {
  if (lemma.empty()) throw std::invalid_argument("empty lemma");
  for (const char c : lemma) {
    if (std::isspace(static_cast<unsigned char>(c)) ||
        std::isupper(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("lemma must be lowercase without whitespace: '" +
                                  std::string(lemma) + "'");
    }
  }
}

void ValidateVector(const std::vector<double>& v, int dim,
                    const std::string& what) {
  if (static_cast<int>(v.size()) != dim) {
    throw std::invalid_argument(what + " has " + std::to_string(v.size()) +
                                " coordinates, expected " +
                                std::to_string(dim));
  }
  for (const double value : v) {
    if (!std::isfinite(value))
      throw std::invalid_argument(what + " has a non-finite coordinate");
  }
}

std::vector<double> ParseVectorField(std::string_view field, int dim,
                                     size_t record, const char* name) {
  const auto tokens = SplitOn(field, ' ');
  if (static_cast<int>(tokens.size()) != dim) {
    throw FormatError("record " + std::to_string(record) + ": " + name +
                          " has " + std::to_string(tokens.size()) +
                          " coordinates, header declares dim=" +
                          std::to_string(dim),
                      record);
  }
  std::vector<double> out;
  out.reserve(dim);
  for (const auto token : tokens) {
    const auto value = ParseDouble(token);
    if (!value) {
      throw FormatError("record " + std::to_string(record) + ": " + name +
                            " has unparseable value '" + std::string(token) +
                            "'",
                        record);
    }
    if (!std::isfinite(*value)) {
      throw FormatError("record " + std::to_string(record) + ": " + name +
                            " has a non-finite value",
                        record);
    }
    out.push_back(*value);
  }
  return out;
}

void AppendVector(std::string& out, const std::vector<double>& v) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += FormatDouble(v[i]);
  }
}

struct DumpHeader {
  VectorPairSet shape;
  long long count = 0;
  DumpEncoding encoding = DumpEncoding::kText;
};

DumpHeader ParseHeader(std::string_view line) {
  const auto tokens = SplitWhitespace(line);
  if (tokens.size() < 2 || tokens[0] != kDumpMagic) {
    throw FormatError("malformed header: missing " + std::string(kDumpMagic),
                      0);
  }
  if (tokens[1] != kDumpVersion) {
    throw FormatError("unsupported dump version '" + std::string(tokens[1]) +
                          "'",
                      0);
  }
  std::map<std::string, std::string, std::less<>> fields;
  for (size_t i = 2; i < tokens.size(); ++i) {
    const size_t eq = tokens[i].find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw FormatError("malformed header field '" + std::string(tokens[i]) +
                            "'",
                        0);
    }
    const std::string key(tokens[i].substr(0, eq));
    if (!fields.emplace(key, std::string(tokens[i].substr(eq + 1))).second)
      throw FormatError("duplicate header field '" + key + "'", 0);
  }
  const auto require = [&](const char* key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end())
      throw FormatError(std::string("header is missing '") + key + "'", 0);
    return it->second;
  };
  const auto require_int = [&](const char* key, long long min) {
    const auto value = ParseInt(require(key));
    if (!value || *value < min) {
      throw FormatError(std::string("header field '") + key +
                            "' must be an integer >= " + std::to_string(min),
                        0);
    }
    return *value;
  };

  DumpHeader header;
  header.shape.lemma = require("lemma");
  try {
    ValidateLemma(header.shape.lemma);
    header.shape.pos = ParsePos(require("pos"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed header: ") + e.what(), 0);
  }
  header.shape.layer = static_cast<int>(require_int("layer", 0));
  header.shape.dim = static_cast<int>(require_int("dim", 1));
  const std::string& split = require("split");
  if (split == "train") {
    header.shape.split = Split::kTrain;
  } else if (split == "test") {
    header.shape.split = Split::kTest;
  } else {
    throw FormatError("header split must be train or test, got '" + split +
                          "'",
                      0);
  }
  header.count = require_int("count", 0);
  if (const auto it = fields.find("body"); it != fields.end()) {
    if (it->second != "f32le")
      throw FormatError("unknown dump body encoding '" + it->second + "'", 0);
    header.encoding = DumpEncoding::kBinaryF32;
  }
  for (const auto& [key, value] : fields) {
    static const std::set<std::string, std::less<>> known = {
        "lemma", "pos", "layer", "dim", "split", "count", "body"};
    if (!known.contains(key))
      throw FormatError("unknown header field '" + key + "'", 0);
  }
  return header;
}

InstanceId MakeId(const VectorPairSet& shape, std::string_view uid,
                  size_t record) {
  if (uid.empty() || HasWhitespace(uid)) {
    throw FormatError("record " + std::to_string(record) +
                          ": uid must be non-empty without whitespace",
                      record);
  }
  return InstanceId{shape.lemma, shape.pos, std::string(uid)};
}

void CheckSplitInvariant(const VectorPairSet& shape, const VectorPair& pair,
                         size_t record) {
  if (shape.split == Split::kTrain && !pair.x_prime) {
    throw FormatError("record " + std::to_string(record) +
                          ": train-split record is missing x_prime (every "
                          "train pair must carry a paraphrase vector)",
                      record);
  }
}

void ReadTextBody(std::istream& in, const DumpHeader& header,
                  VectorPairSet& set) {
  std::string line;
  size_t record = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++record;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 3) {
      throw FormatError("record " + std::to_string(record) +
                            ": expected 3 tab-separated fields, got " +
                            std::to_string(fields.size()),
                        record);
    }
    VectorPair pair;
    pair.id = MakeId(set, fields[0], record);
    pair.x = ParseVectorField(fields[1], set.dim, record, "x");
    if (fields[2] != "-")
      pair.x_prime = ParseVectorField(fields[2], set.dim, record, "x_prime");
    CheckSplitInvariant(set, pair, record);
    set.pairs.push_back(std::move(pair));
  }
  if (static_cast<long long>(set.pairs.size()) != header.count) {
    throw FormatError("header declares count=" + std::to_string(header.count) +
                          " but file holds " +
                          std::to_string(set.pairs.size()) + " records",
                      0);
  }
}

float LoadF32(const char* bytes) {
  uint32_t bits = 0;
  for (int b = 3; b >= 0; --b)
    bits = (bits << 8) | static_cast<unsigned char>(bytes[b]);
  return std::bit_cast<float>(bits);
}

void StoreF32(std::string& out, float value) {
  const uint32_t bits = std::bit_cast<uint32_t>(value);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>(bits >> (8 * b)));
}

void ReadBinaryBody(std::istream& in, const DumpHeader& header,
                    VectorPairSet& set) {
  std::string line;
  for (long long record = 1; record <= header.count; ++record) {
    if (!std::getline(in, line)) {
      throw FormatError("binary dump index ends after " +
                            std::to_string(record - 1) + " records",
                        record);
    }
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 2 || (fields[1] != "0" && fields[1] != "1")) {
      throw FormatError("record " + std::to_string(record) +
                            ": malformed binary index line",
                        record);
    }
    VectorPair pair;
    pair.id = MakeId(set, fields[0], record);
    if (fields[1] == "1") pair.x_prime.emplace();
    set.pairs.push_back(std::move(pair));
  }
  const std::string blob((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  size_t offset = 0;
  const auto read_vector = [&](size_t record) {
    const size_t bytes = 4 * static_cast<size_t>(set.dim);
    if (offset + bytes > blob.size()) {
      throw FormatError("record " + std::to_string(record) +
                            ": binary body is truncated",
                        record);
    }
    std::vector<double> v(set.dim);
    for (int i = 0; i < set.dim; ++i) {
      v[i] = LoadF32(blob.data() + offset + 4 * i);
      if (!std::isfinite(v[i])) {
        throw FormatError("record " + std::to_string(record) +
                              ": non-finite value in binary body",
                          record);
      }
    }
    offset += bytes;
    return v;
  };
  for (size_t r = 0; r < set.pairs.size(); ++r) {
    set.pairs[r].x = read_vector(r + 1);
    if (set.pairs[r].x_prime) set.pairs[r].x_prime = read_vector(r + 1);
    CheckSplitInvariant(set, set.pairs[r], r + 1);
  }
  if (offset != blob.size())
    throw FormatError("binary body has trailing bytes", 0);
}

}  // namespace

Pos ParsePos(std::string_view tag) {
  if (tag == "n") return Pos::kNoun;
  if (tag == "v") return Pos::kVerb;
  if (tag == "j" || tag == "a") return Pos::kAdjective;
  throw std::invalid_argument("unknown POS tag '" + std::string(tag) +
                              "' (expected n, v or j)");
}

char PosChar(Pos pos) { return static_cast<char>(pos); }

std::string GroupName(std::string_view lemma, Pos pos) {
  std::string out(lemma);
  out += '.';
  out += PosChar(pos);
  return out;
}

std::string InstanceId::ToString() const { return Group() + "." + uid; }

std::string_view SplitName(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void VectorPairSet::Validate() const {
  ValidateLemma(lemma);
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (layer < 0) throw std::invalid_argument("layer must be >= 0");
  std::set<std::string_view> uids;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const VectorPair& p = pairs[i];
    const std::string where = "pair " + std::to_string(i + 1);
    if (p.id.lemma != lemma || p.id.pos != pos)
      throw std::invalid_argument(where + " belongs to another lemma.pos");
    if (p.id.uid.empty() || HasWhitespace(p.id.uid))
      throw std::invalid_argument(where +
                                  ": uid must be non-empty without whitespace");
    if (!uids.insert(p.id.uid).second)
      throw std::invalid_argument(where + ": duplicate uid '" + p.id.uid + "'");
    ValidateVector(p.x, dim, where + " x");
    if (p.x_prime) {
      ValidateVector(*p.x_prime, dim, where + " x_prime");
    } else if (split == Split::kTrain) {
      throw std::invalid_argument(where +
                                  ": train-split pair is missing x_prime");
    }
  }
}

Eigen::MatrixXd VectorPairSet::OriginalMatrix() const {
  Eigen::MatrixXd m(pairs.size(), dim);
  for (size_t i = 0; i < pairs.size(); ++i) {
    m.row(i) = Eigen::Map<const Eigen::RowVectorXd>(pairs[i].x.data(), dim);
  }
  return m;
}

Eigen::MatrixXd VectorPairSet::ParaphraseMatrix() const {
  Eigen::MatrixXd m(pairs.size(), dim);
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].x_prime) {
      throw std::invalid_argument("pair '" + pairs[i].id.ToString() +
                                  "' has no paraphrase vector");
    }
    m.row(i) =
        Eigen::Map<const Eigen::RowVectorXd>(pairs[i].x_prime->data(), dim);
  }
  return m;
}

bool VectorPairSet::Complete() const {
  return std::all_of(pairs.begin(), pairs.end(),
                     [](const VectorPair& p) { return p.x_prime.has_value(); });
}

VectorPairSet ReadVectorDump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dump " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty dump file", 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const DumpHeader header = ParseHeader(line);
  VectorPairSet set = header.shape;
  if (header.encoding == DumpEncoding::kText) {
    ReadTextBody(in, header, set);
  } else {
    ReadBinaryBody(in, header, set);
  }
  std::set<std::string_view> uids;
  for (size_t i = 0; i < set.pairs.size(); ++i) {
    if (!uids.insert(set.pairs[i].id.uid).second) {
      throw FormatError("record " + std::to_string(i + 1) +
                            ": duplicate uid '" + set.pairs[i].id.uid + "'",
                        i + 1);
    }
  }
  return set;
}

void WriteVectorDump(const VectorPairSet& set,
                     const std::filesystem::path& path,
                     DumpEncoding encoding) {
  set.Validate();
  std::string out;
  out += std::string(kDumpMagic) + " " + std::string(kDumpVersion) +
         " lemma=" + set.lemma + " pos=" + PosChar(set.pos) +
         " layer=" + std::to_string(set.layer) +
         " dim=" + std::to_string(set.dim) +
         " split=" + std::string(SplitName(set.split)) +
         " count=" + std::to_string(set.pairs.size());
  if (encoding == DumpEncoding::kBinaryF32) {
    out += " body=f32le\n";
    for (const VectorPair& p : set.pairs)
      out += p.id.uid + (p.x_prime ? "\t1\n" : "\t0\n");
    for (const VectorPair& p : set.pairs) {
      for (const double v : p.x) StoreF32(out, static_cast<float>(v));
      if (p.x_prime)
        for (const double v : *p.x_prime) StoreF32(out, static_cast<float>(v));
    }
  } else {
    out += '\n';
    for (const VectorPair& p : set.pairs) {
      out += p.id.uid;
      out += '\t';
      AppendVector(out, p.x);
      out += '\t';
      if (p.x_prime) {
        AppendVector(out, *p.x_prime);
      } else {
        out += '-';
      }
      out += '\n';
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write dump " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("I/O error writing " + path.string());
}

bool SenseKey::Crisp() const {
  return std::all_of(records.begin(), records.end(), [](const KeyRecord& r) {
    return r.assignments.size() == 1;
  });
}

SenseKey ParseKey(std::istream& in, bool graded) {
  SenseKey key;
  std::set<InstanceId> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fail = [&](const std::string& why) {
      throw FormatError("key line " + std::to_string(line_no) + ": " + why,
                        line_no);
    };
    const auto tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 3) fail("expected '<lemma>.<pos> <id> <sense>/<weight>'");

    const std::string_view group = tokens[0];
    const size_t dot = group.rfind('.');
    if (dot == std::string_view::npos || dot == 0) fail("malformed lemma.pos");
    KeyRecord record;
    try {
      ValidateLemma(group.substr(0, dot));
      record.id.lemma = std::string(group.substr(0, dot));
      record.id.pos = ParsePos(group.substr(dot + 1));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    const std::string_view instance = tokens[1];
    if (instance.size() <= group.size() + 1 ||
        instance.substr(0, group.size()) != group ||
        instance[group.size()] != '.') {
      fail("instance id '" + std::string(instance) + "' does not extend '" +
           std::string(group) + "'");
    }
    record.id.uid = std::string(instance.substr(group.size() + 1));

    double sum = 0.0;
    for (size_t t = 2; t < tokens.size(); ++t) {
      const size_t slash = tokens[t].rfind('/');
      if (slash == std::string_view::npos || slash == 0)
        fail("assignment '" + std::string(tokens[t]) +
             "' is not <sense>/<weight>");
      const auto weight = ParseDouble(tokens[t].substr(slash + 1));
      if (!weight || !std::isfinite(*weight))
        fail("unparseable weight in '" + std::string(tokens[t]) + "'");
      if (*weight <= 0.0) fail("weights must be > 0");
      std::string sense(tokens[t].substr(0, slash));
      for (const auto& a : record.assignments)
        if (a.sense == sense) fail("sense '" + sense + "' listed twice");
      record.assignments.push_back({std::move(sense), *weight});
      sum += *weight;
    }
    if (!graded && record.assignments.size() > 1)
      fail("multiple senses in crisp key");
    if (std::abs(sum - 1.0) > kWeightSumTolerance)
      fail("weights sum to " + FormatDouble(sum) + ", expected 1");
    if (std::abs(sum - 1.0) > kWeightSumExact)
      for (auto& a : record.assignments) a.weight /= sum;
    if (!seen.insert(record.id).second)
      fail("duplicate instance id '" + record.id.ToString() + "'");
    key.records.push_back(std::move(record));
  }
  return key;
}

SenseKey ParseKey(const std::filesystem::path& path, bool graded) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open key " + path.string());
  return ParseKey(in, graded);
}

SenseKey ParseKeyString(std::string_view text, bool graded) {
  std::istringstream in{std::string(text)};
  return ParseKey(in, graded);
}

std::string SerializeKey(const SenseKey& key) {
  std::string out;
  for (const KeyRecord& r : key.records) {
    out += r.id.Group();
    out += ' ';
    out += r.id.ToString();
    for (const SenseAssignment& a : r.assignments) {
      out += ' ';
      out += a.sense;
      out += '/';
      out += FormatDouble(a.weight);
    }
    out += '\n';
  }
  return out;
}

void WriteKey(const SenseKey& key, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write key " + path.string());
  file << SerializeKey(key);
  if (!file) throw std::runtime_error("I/O error writing " + path.string());
}

void ClusteringSolution::Validate() const {
  if (ids.size() != labels.size())
    throw std::invalid_argument("labels and ids differ in length");
  if (ids.empty()) {
    if (k != 0) throw std::invalid_argument("empty solution must have k=0");
    return;
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<bool> used(k, false);
  for (const int label : labels) {
    if (label < 0 || label >= k)
      throw std::invalid_argument("cluster label out of range");
    used[label] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end())
    throw std::invalid_argument("solution reports an empty cluster");
  if (grades) {
    if (grades->rows() != static_cast<Eigen::Index>(ids.size()) ||
        grades->cols() != k) {
      throw std::invalid_argument("grades must be an n x k matrix");
    }
    for (Eigen::Index i = 0; i < grades->rows(); ++i) {
      if ((grades->row(i).array() < 0.0).any() ||
          std::abs(grades->row(i).sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("grades row " + std::to_string(i) +
                                    " is not a probability vector");
      }
    }
  }
}

SenseKey SolutionToKey(const ClusteringSolution& solution, bool graded) {
  if (graded && !solution.grades)
    throw std::invalid_argument("graded key requested but solution has no grades");
  solution.Validate();
  const std::string prefix = GroupName(solution.lemma, solution.pos) + ".cluster";
  SenseKey key;
  key.records.reserve(solution.ids.size());
  for (size_t i = 0; i < solution.ids.size(); ++i) {
    KeyRecord record;
    record.id = solution.ids[i];
    if (graded) {
      for (int c = 0; c < solution.k; ++c) {
        record.assignments.push_back(
            {prefix + std::to_string(c), (*solution.grades)(i, c)});
      }
    } else {
      record.assignments.push_back(
          {prefix + std::to_string(solution.labels[i]), 1.0});
    }
    key.records.push_back(std::move(record));
  }
  return key;
}

}  // namespace wsimim
