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

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.h"
#include "wsimim/rng.h"

namespace wsimim {
namespace {

using ::wsimim::testing::ScratchDir;

void WriteRaw(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string ReadRaw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

VectorPairSet RandomSet(Rng& rng, int n, int dim, Split split, bool f32_exact) {
  VectorPairSet set;
  set.lemma = "bank";
  set.pos = Pos::kNoun;
  set.layer = 17;
  set.dim = dim;
  set.split = split;
  const auto draw = [&] {
    const double v = rng.Normal() * std::pow(10.0, rng.Uniform(-6.0, 6.0));
    return f32_exact ? static_cast<double>(static_cast<float>(v)) : v;
  };
  for (int i = 0; i < n; ++i) {
    VectorPair p;
    p.id = {"bank", Pos::kNoun, "bank-" + std::to_string(i * 7)};
    for (int a = 0; a < dim; ++a) p.x.push_back(draw());
    if (split == Split::kTrain || rng.Below(2) == 0) {
      p.x_prime.emplace();
      for (int a = 0; a < dim; ++a) p.x_prime->push_back(draw());
    }
    set.pairs.push_back(std::move(p));
  }
  return set;
}

TEST(PosTest, ParsesKnownTagsAndRejectsOthers) {
  EXPECT_EQ(ParsePos("n"), Pos::kNoun);
  EXPECT_EQ(ParsePos("v"), Pos::kVerb);
  EXPECT_EQ(ParsePos("j"), Pos::kAdjective);
  EXPECT_EQ(ParsePos("a"), Pos::kAdjective);
  EXPECT_THROW(ParsePos("x"), std::invalid_argument);
  EXPECT_THROW(ParsePos(""), std::invalid_argument);
  EXPECT_EQ(GroupName("bank", Pos::kNoun), "bank.n");
  EXPECT_EQ((InstanceId{"add", Pos::kVerb, "3"}).ToString(), "add.v.3");
}

TEST(VectorDumpTest, ReadsHandWrittenFile) {
  const auto path = ScratchDir() / "bank.dump";
  WriteRaw(path,
           "#WSI-DUMP v1 lemma=bank pos=n layer=3 dim=4 split=train count=2\n"
           "a1\t1 2 3 4\t1.5 2 3 4\n"
           "a2\t-0.25 0 1e-3 5\t0 0 0 1\n");
  const VectorPairSet set = ReadVectorDump(path);
  EXPECT_EQ(set.lemma, "bank");
  EXPECT_EQ(set.pos, Pos::kNoun);
  EXPECT_EQ(set.layer, 3);
  EXPECT_EQ(set.dim, 4);
  EXPECT_EQ(set.split, Split::kTrain);
  ASSERT_EQ(set.pairs.size(), 2u);
  EXPECT_EQ(set.pairs[0].id.uid, "a1");
  EXPECT_EQ(set.pairs[1].x, (std::vector<double>{-0.25, 0, 1e-3, 5}));
  EXPECT_EQ(*set.pairs[0].x_prime, (std::vector<double>{1.5, 2, 3, 4}));
}

TEST(VectorDumpTest, ShortRecordNamesRecordTwo) {
  const auto path = ScratchDir() / "short.dump";
  WriteRaw(path,
           "#WSI-DUMP v1 lemma=bank pos=n layer=0 dim=4 split=test count=2\n"
           "a1\t1 2 3 4\t-\n"
           "a2\t1 2 3\t-\n");
  try {
    ReadVectorDump(path);
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.record(), 2u);
    EXPECT_NE(std::string(e.what()).find("record 2"), std::string::npos);
  }
}

TEST(VectorDumpTest, TrainRecordWithoutParaphraseIsRejected) {
  const auto path = ScratchDir() / "train.dump";
  WriteRaw(path,
           "#WSI-DUMP v1 lemma=bank pos=n layer=0 dim=2 split=train count=1\n"
           "a1\t1 2\t-\n");
  try {
    ReadVectorDump(path);
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.record(), 1u);
    EXPECT_NE(std::string(e.what()).find("train-split"), std::string::npos);
  }
}

TEST(VectorDumpTest, RejectsMalformedInput) {
  const auto dir = ScratchDir();
  const std::string header =
      "#WSI-DUMP v1 lemma=bank pos=n layer=0 dim=2 split=test count=1\n";
  const std::vector<std::string> bad = {
      "",
      "#WSI-DUMP v2 lemma=bank pos=n layer=0 dim=2 split=test count=0\n",
      "#WSI-DUMP v1 lemma=bank pos=q layer=0 dim=2 split=test count=0\n",
      "#WSI-DUMP v1 lemma=bank pos=n layer=0 dim=2 split=dev count=0\n",
      "#WSI-DUMP v1 lemma=bank pos=n layer=0 dim=2 count=0\n",
      "#WSI-DUMP v1 lemma=bank pos=n layer=0 dim=2 split=test count=0 x=1\n",
      "#WSI-DUMP v1 lemma=Bank pos=n layer=0 dim=2 split=test count=0\n",
      header + "a1\t1 nan\t-\n",
      header + "a1\t1 inf\t-\n",
      header + "a1\t1 2x\t-\n",
      header + "a1\t1 2\n",
      header,  // count says 1, no records
      header + "a1\t1 2\t-\na2\t1 2\t-\n",
      "#WSI-DUMP v1 lemma=bank pos=n layer=0 dim=2 split=test count=2\n"
      "a1\t1 2\t-\na1\t3 4\t-\n",
  };
  for (size_t i = 0; i < bad.size(); ++i) {
    const auto path = dir / ("bad" + std::to_string(i) + ".dump");
    WriteRaw(path, bad[i]);
    EXPECT_THROW(ReadVectorDump(path), FormatError) << "case " << i;
  }
}

TEST(VectorDumpTest, EmptySetRoundTrips) {
  const auto path = ScratchDir() / "empty.dump";
  VectorPairSet set;
  set.lemma = "bank";
  set.dim = 8;
  set.split = Split::kTest;
  WriteVectorDump(set, path);
  EXPECT_NE(ReadRaw(path).find("count=0"), std::string::npos);
  EXPECT_EQ(ReadVectorDump(path), set);
}

TEST(VectorDumpTest, HundredPairTextRoundTripIsBitExact) {
  Rng rng(5);
  const auto dir = ScratchDir();
  for (const Split split : {Split::kTrain, Split::kTest}) {
    const VectorPairSet set = RandomSet(rng, 100, 6, split, false);
    const auto path = dir / "set.dump";
    WriteVectorDump(set, path);
    EXPECT_EQ(ReadVectorDump(path), set);
  }
}

TEST(VectorDumpTest, BinaryBodyRoundTripsFloatValues) {
  Rng rng(6);
  const auto dir = ScratchDir();
  const VectorPairSet set = RandomSet(rng, 40, 5, Split::kTest, true);
  WriteVectorDump(set, dir / "set.bin.dump", DumpEncoding::kBinaryF32);
  EXPECT_EQ(ReadVectorDump(dir / "set.bin.dump"), set);
  EXPECT_NE(ReadRaw(dir / "set.bin.dump").find("body=f32le"), std::string::npos);
}

TEST(VectorDumpTest, RandomRoundTripProperty) {
  Rng rng(8);
  const auto path = ScratchDir() / "p.dump";
  for (int trial = 0; trial < 50; ++trial) {
    const VectorPairSet set =
        RandomSet(rng, static_cast<int>(rng.Below(12)),
                  1 + static_cast<int>(rng.Below(9)),
                  rng.Below(2) ? Split::kTrain : Split::kTest, false);
    WriteVectorDump(set, path);
    ASSERT_EQ(ReadVectorDump(path), set) << "trial " << trial;
  }
}

TEST(VectorDumpTest, InvalidSetWritesNothing) {
  const auto path = ScratchDir() / "never.dump";
  Rng rng(2);
  VectorPairSet set = RandomSet(rng, 3, 2, Split::kTrain, false);
  set.pairs[1].x_prime.reset();
  EXPECT_THROW(WriteVectorDump(set, path), std::invalid_argument);
  EXPECT_FALSE(std::filesystem::exists(path));

  set = RandomSet(rng, 3, 2, Split::kTest, false);
  set.pairs[2].x[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(WriteVectorDump(set, path), std::invalid_argument);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(VectorPairSetTest, Matrices) {
  Rng rng(3);
  const VectorPairSet set = RandomSet(rng, 4, 3, Split::kTrain, false);
  const Eigen::MatrixXd x = set.OriginalMatrix();
  const Eigen::MatrixXd xp = set.ParaphraseMatrix();
  EXPECT_EQ(x.rows(), 4);
  EXPECT_EQ(x(2, 1), set.pairs[2].x[1]);
  EXPECT_EQ(xp(3, 2), (*set.pairs[3].x_prime)[2]);
  EXPECT_TRUE(set.Complete());
}

TEST(KeyTest, CrispGrammarExample) {
  const SenseKey key = ParseKeyString("bank.n bank.n.12 cluster3/1.0\n", false);
  ASSERT_EQ(key.records.size(), 1u);
  EXPECT_EQ(key.records[0].id, (InstanceId{"bank", Pos::kNoun, "12"}));
  ASSERT_EQ(key.records[0].assignments.size(), 1u);
  EXPECT_EQ(key.records[0].assignments[0].sense, "cluster3");
  EXPECT_EQ(key.records[0].assignments[0].weight, 1.0);
  EXPECT_TRUE(key.Crisp());
}

TEST(KeyTest, GradedGrammarExample) {
  const SenseKey key = ParseKeyString("add.v add.v.3 c1/0.8 c2/0.2\n", true);
  ASSERT_EQ(key.records[0].assignments.size(), 2u);
  const double sum = key.records[0].assignments[0].weight +
                     key.records[0].assignments[1].weight;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(key.records[0].assignments[0].weight, 0.8);
  EXPECT_FALSE(key.Crisp());
}

TEST(KeyTest, CrispModeRejectsMultipleSenses) {
  try {
    ParseKeyString("add.v add.v.3 c1/0.8 c2/0.2\n", false);
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("multiple senses in crisp key"),
              std::string::npos);
  }
}

TEST(KeyTest, SmallDeviationIsRenormalized) {
  const SenseKey key = ParseKeyString("add.v add.v.3 c1/0.6 c2/0.4005\n", true);
  const double a = key.records[0].assignments[0].weight;
  const double b = key.records[0].assignments[1].weight;
  EXPECT_NEAR(a + b, 1.0, 1e-15);
  EXPECT_NEAR(a, 0.6 / 1.0005, 1e-15);
}

TEST(KeyTest, RejectsBadRecords) {
  const std::vector<std::string> bad = {
      "bank.n bank.n.1 c1/0\n",
      "bank.n bank.n.1 c1/-1\n",
      "bank.n bank.n.1 c1/0.5\n",
      "bank.n bank.n.1 c1/abc\n",
      "bank.n bank.n.1 c1\n",
      "bank.n bank.n.1\n",
      "bank.n bank.v.1 c1/1\n",
      "bank.x bank.x.1 c1/1\n",
      "bank.n bank.n.1 c1/1\nbank.n bank.n.1 c2/1\n",
      "bank.n bank.n.1 c1/0.5 c1/0.5\n",
      "bank.n bank.n.1 c1/nan\n",
  };
  for (size_t i = 0; i < bad.size(); ++i)
    EXPECT_THROW(ParseKeyString(bad[i], true), FormatError) << bad[i];
}

TEST(KeyTest, FileRoundTrip) {
  const auto path = ScratchDir() / "k.key";
  const SenseKey key = ParseKeyString(
      "bank.n bank.n.1 a/0.25 b/0.75\nbank.n bank.n.2 a/1\nadd.v add.v.x c/1\n",
      true);
  WriteKey(key, path);
  EXPECT_EQ(ParseKey(path, true), key);
}

ClusteringSolution TwoPointSolution() {
  ClusteringSolution s;
  s.lemma = "bank";
  s.pos = Pos::kNoun;
  s.k = 2;
  s.ids = {{"bank", Pos::kNoun, "i1"}, {"bank", Pos::kNoun, "i2"}};
  s.labels = {0, 1};
  return s;
}

TEST(SolutionToKeyTest, CrispExample) {
  const SenseKey key = SolutionToKey(TwoPointSolution(), false);
  EXPECT_EQ(SerializeKey(key),
            "bank.n bank.n.i1 bank.n.cluster0/1\n"
            "bank.n bank.n.i2 bank.n.cluster1/1\n");
}

TEST(SolutionToKeyTest, GradedExample) {
  ClusteringSolution s = TwoPointSolution();
  s.grades = Eigen::MatrixXd(2, 2);
  *s.grades << 0.7, 0.3, 0.4, 0.6;
  const SenseKey key = SolutionToKey(s, true);
  EXPECT_EQ(SerializeKey(key),
            "bank.n bank.n.i1 bank.n.cluster0/0.7 bank.n.cluster1/0.3\n"
            "bank.n bank.n.i2 bank.n.cluster0/0.4 bank.n.cluster1/0.6\n");
}

TEST(SolutionToKeyTest, GradedWithoutGradesIsPreconditionError) {
  EXPECT_THROW(SolutionToKey(TwoPointSolution(), true), std::invalid_argument);
}

TEST(SolutionTest, ValidateRejectsBrokenSolutions) {
  ClusteringSolution s = TwoPointSolution();
  s.labels = {0, 0};  // cluster 1 empty
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = TwoPointSolution();
  s.labels = {0, 2};
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = TwoPointSolution();
  s.grades = Eigen::MatrixXd::Constant(2, 2, 0.6);
  EXPECT_THROW(s.Validate(), std::invalid_argument);
}

ClusteringSolution RandomSolution(Rng& rng, bool graded) {
  ClusteringSolution s;
  s.lemma = "word";
  s.pos = rng.Below(2) ? Pos::kVerb : Pos::kAdjective;
  const int n = 1 + static_cast<int>(rng.Below(15));
  s.k = 1 + static_cast<int>(rng.Below(n));
  for (int i = 0; i < n; ++i) {
    s.ids.push_back({s.lemma, s.pos, "u" + std::to_string(i)});
    s.labels.push_back(i < s.k ? i : static_cast<int>(rng.Below(s.k)));
  }
  if (graded) {
    Eigen::MatrixXd g(n, s.k);
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int c = 0; c < s.k; ++c) sum += g(i, c) = std::exp(rng.Normal());
      g.row(i) /= sum;
    }
    s.grades = g;
  }
  return s;
}

TEST(KeyTest, SerializeParseIsIdentityOnSolutionKeys) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const bool graded = trial % 2 == 1;
    const SenseKey key = SolutionToKey(RandomSolution(rng, graded), graded);
    ASSERT_EQ(ParseKeyString(SerializeKey(key), graded), key) << trial;
  }
}

// Replaces one whitespace-separated field of one line by a corrupted value.
std::string MutateOneField(const std::string& text, Rng& rng) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string t;
    while (fields >> t) tokens.push_back(t);
    lines.push_back(tokens);
  }
  const size_t row = rng.Below(lines.size());
  auto& tokens = lines[row];
  const size_t field = rng.Below(tokens.size());
  std::string& f = tokens[field];
  if (field == 0) {
    const std::vector<std::string> options = {"WORD.v", "word.q", "word", ".v",
                                              "word.v.extra"};
    f = options[rng.Below(options.size())];
  } else if (field == 1) {
    const std::string other_row = lines[(row + 1) % lines.size()][1];
    const std::vector<std::string> options = {"word.n.u0", "word", "other.v.u0",
                                              tokens[0], other_row};
    f = options[rng.Below(lines.size() > 1 ? options.size() : options.size() - 1)];
  } else {
    const size_t slash = f.rfind('/');
    const std::string sense = f.substr(0, slash);
    const std::vector<std::string> options = {
        sense + "/0", sense + "/-0.5", sense + "/abc", sense,   "/0.5",
        sense + "/nan", sense + "/inf", sense + "/" + std::to_string(
            std::stod(f.substr(slash + 1)) + 0.01)};
    f = options[rng.Below(options.size())];
  }
  std::string out;
  for (const auto& l : lines) {
    for (size_t i = 0; i < l.size(); ++i) out += (i ? " " : "") + l[i];
    out += '\n';
  }
  return out;
}

TEST(KeyTest, EverySingleFieldMutationIsRejected) {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const bool graded = trial % 2 == 1;
    ClusteringSolution s = RandomSolution(rng, graded);
    const std::string valid = SerializeKey(SolutionToKey(s, graded));
    ASSERT_NO_THROW(ParseKeyString(valid, graded));
    const std::string mutated = MutateOneField(valid, rng);
    EXPECT_THROW(ParseKeyString(mutated, graded), FormatError)
        << "accepted mutation:\n" << mutated << "of\n" << valid;
  }
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(1.0), "1");
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.Normal() * std::pow(10.0, rng.Uniform(-300, 300));
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

}  // namespace
}  // namespace wsimim
