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

#include "wsimim/polysemy.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gtest/gtest.h"
#include "wsimim/rng.h"
#include "wsimim/synthbench.h"

namespace wsimim {
namespace {

Eigen::MatrixXd RandomPoints(Rng& rng, int n, int m, double scale = 1.0) {
  Eigen::MatrixXd v(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) v(i, j) = scale * rng.Normal();
  return v;
}

// `clumps` Gaussian clumps of `per_clump` points around unit centroids at
// least 0.8 apart in dimension 16.
Eigen::MatrixXd Clumps(Rng& rng, int clumps, int per_clump, double spread) {
  const int dim = 16;
  std::vector<Eigen::VectorXd> centroids;
  while (static_cast<int>(centroids.size()) < clumps) {
    Eigen::VectorXd c(dim);
    for (int a = 0; a < dim; ++a) c(a) = rng.Normal();
    c.normalize();
    bool ok = true;
    for (const auto& o : centroids) ok = ok && (c - o).norm() >= 0.8;
    if (ok) centroids.push_back(c);
  }
  Eigen::MatrixXd v(clumps * per_clump, dim);
  for (int k = 0, row = 0; k < clumps; ++k) {
    for (int i = 0; i < per_clump; ++i, ++row) {
      for (int a = 0; a < dim; ++a) v(row, a) = centroids[k](a) + spread * rng.Normal();
    }
  }
  return v;
}

TEST(ProjectTest, LowRankDataKeepsDistances) {
  Rng rng(1);
  const Eigen::MatrixXd coords = RandomPoints(rng, 20, 3);
  const Eigen::MatrixXd basis = RandomPoints(rng, 3, 9);
  const Eigen::MatrixXd v = coords * basis;
  const Eigen::MatrixXd p = Project(v, 3);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      EXPECT_NEAR((p.row(i) - p.row(j)).norm(), (v.row(i) - v.row(j)).norm(), 1e-9);
    }
  }
}

TEST(ProjectTest, DuplicatedDatasetGivesSameComponents) {
  Rng rng(2);
  const Eigen::MatrixXd v = RandomPoints(rng, 12, 6);
  Eigen::MatrixXd twice(24, 6);
  twice << v, v;
  const Eigen::MatrixXd a = PrincipalComponents(v, 3);
  const Eigen::MatrixXd b = PrincipalComponents(twice, 3);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd pa = Project(v, 3);
  const Eigen::MatrixXd pb = Project(twice, 3);
  EXPECT_LT((pa - pb.topRows(12)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((pa - pb.bottomRows(12)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ProjectTest, ReconstructionErrorIsTrailingEigenvalueSum) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd v = RandomPoints(rng, 10, 8);
    const Eigen::MatrixXd centered = v.rowwise() - v.colwise().mean();
    // Independent oracle: eigen-decomposition of the scatter matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered.transpose() * centered);
    const Eigen::VectorXd values = eig.eigenvalues();  // ascending
    const double trailing = values.head(5).sum();
    const Eigen::MatrixXd pc = PrincipalComponents(v, 3);
    const double error = (centered - centered * pc * pc.transpose()).squaredNorm();
    EXPECT_NEAR(error, trailing, 1e-9);
  }
}

TEST(ProjectTest, SignConventionAndOrthonormality) {
  Rng rng(4);
  const Eigen::MatrixXd pc = PrincipalComponents(RandomPoints(rng, 30, 7), 3);
  EXPECT_LT((pc.transpose() * pc - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  for (int c = 0; c < 3; ++c) {
    Eigen::Index at;
    pc.col(c).cwiseAbs().maxCoeff(&at);
    EXPECT_GT(pc(at, c), 0.0);
  }
}

TEST(ProjectTest, Errors) {
  EXPECT_THROW(Project(Eigen::MatrixXd::Ones(5, 4), 2), std::invalid_argument);
  EXPECT_THROW(Project(Eigen::MatrixXd::Ones(1, 4), 2), std::invalid_argument);
  Rng rng(5);
  EXPECT_THROW(Project(RandomPoints(rng, 5, 2), 3), std::invalid_argument);
}

TEST(PolysemyScoreTest, IdenticalPointsScoreZero) {
  EXPECT_EQ(PolysemyScore(Eigen::MatrixXd::Constant(9, 5, 0.3)), 0.0);
}

TEST(PolysemyScoreTest, TwoSeparatedClumps) {
  Rng rng(6);
  Eigen::MatrixXd v(20, 5);
  for (int i = 0; i < 20; ++i) {
    for (int a = 0; a < 5; ++a) v(i, a) = 1e-7 * rng.Normal() + (i < 10 ? 0.0 : 10.0);
  }
  const GridPyramid pyramid = BuildPyramid(Project(v, 3), 8);
  for (const int64_t n : pyramid.occupied) EXPECT_EQ(n, 2);
  EXPECT_NEAR(PolysemyScore(v), 0.690439574385883, 1e-12);
}

TEST(PolysemyScoreTest, TranslationAndScaleInvariant) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd v = RandomPoints(rng, 40, 6);
    const double base = PolysemyScore(v);
    Eigen::RowVectorXd shift(6);
    for (int a = 0; a < 6; ++a) shift(a) = 5.0 * rng.Normal();
    EXPECT_NEAR(PolysemyScore(v * 8.0), base, 1e-12);
    EXPECT_NEAR(PolysemyScore((v.rowwise() + shift).eval()), base, 1e-12);
  }
}

TEST(GridPyramidTest, OccupancyInvariants) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(80));
    const int dims = 1 + static_cast<int>(rng.Below(3));
    const GridPyramid p = BuildPyramid(RandomPoints(rng, n, dims), 8);
    ASSERT_EQ(p.occupied.size(), 8u);
    for (int l = 0; l < 8; ++l) {
      EXPECT_GE(p.occupied[l], 1);
      EXPECT_LE(p.occupied[l], std::min<int64_t>(n, int64_t{1} << ((l + 1) * dims)));
      if (l > 0) EXPECT_GE(p.occupied[l], p.occupied[l - 1]);
    }
  }
}

TEST(GridPyramidTest, MaximumPointFallsInLastCell) {
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  const GridPyramid p = BuildPyramid(pts, 3);
  EXPECT_EQ(p.occupied, (std::vector<int64_t>{2, 2, 2}));
  EXPECT_GT(p.side, 1.0);
}

TEST(PolysemyScoreTest, SeparatedClumpsOutscoreSingleClump) {
  Rng rng(9);
  int wins = 0;
  const int fixtures = 100;
  for (int f = 0; f < fixtures; ++f) {
    const int clumps = 2 + static_cast<int>(rng.Below(4));
    const int per_clump = 12;
    const double single = PolysemyScore(Clumps(rng, 1, clumps * per_clump, 0.05));
    const double many = PolysemyScore(Clumps(rng, clumps, per_clump, 0.05));
    wins += single < many;
  }
  EXPECT_GE(wins, 95) << wins << " of " << fixtures;
}

TEST(ClustersFromScoreTest, AffineClampRound) {
  PolysemyCalibration c;
  c.score_low = 1.0;
  c.score_high = 3.0;
  c.k_min = 2;
  c.k_max = 10;
  EXPECT_EQ(ClustersFromScore(0.5, c), 2);
  EXPECT_EQ(ClustersFromScore(1.0, c), 2);
  EXPECT_EQ(ClustersFromScore(2.0, c), 6);
  EXPECT_EQ(ClustersFromScore(3.0, c), 10);
  EXPECT_EQ(ClustersFromScore(9.0, c), 10);
  EXPECT_EQ(ClustersFromScore(1.125, c), 3);  // 2.5 rounds up
  c.k_max = 9;
  EXPECT_EQ(ClustersFromScore(2.0, c), 6);  // round(5.5)
  c.score_high = 1.0;
  EXPECT_THROW(ClustersFromScore(2.0, c), std::invalid_argument);
}

TEST(ClustersFromScoreTest, MonotoneInScore) {
  const PolysemyCalibration c = DefaultCalibration();
  int previous = 0;
  for (double s = -1.0; s <= 6.0; s += 1e-3) {
    const int k = ClustersFromScore(s, c);
    EXPECT_GE(k, previous);
    EXPECT_GE(k, c.k_min);
    EXPECT_LE(k, c.k_max);
    previous = k;
  }
}

TEST(FitCalibrationTest, RecoversExactAffineRelation) {
  // k = 2 + 4 * (score - 1) exactly.
  const std::vector<double> scores = {1.0, 1.25, 1.5, 2.0, 2.5};
  const std::vector<int> ks = {2, 3, 4, 6, 8};
  const PolysemyCalibration c = FitCalibration(scores, ks, 2, 10);
  EXPECT_NEAR(c.score_low, 1.0, 1e-12);
  EXPECT_NEAR(c.score_high, 3.0, 1e-12);
  EXPECT_THROW(FitCalibration({1.0, 1.0}, {2, 3}, 2, 10), std::invalid_argument);
  EXPECT_THROW(FitCalibration({2.0, 1.0}, {2, 3}, 2, 10), std::invalid_argument);
}

TEST(DefaultCalibrationTest, RecoversSyntheticSenseCounts) {
  BenchmarkSpec bench;
  bench.words = 50;
  double error = 0.0;
  for (const SynthWord& w : GenerateBenchmark(bench)) {
    const int k = ClustersFromScore(PolysemyScore(w.test.OriginalMatrix()),
                                    DefaultCalibration());
    error += std::abs(k - w.true_senses);
  }
  EXPECT_LE(error / 50.0, 1.0);
}

}  // namespace
}  // namespace wsimim
