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

// Polysemy score from multi-resolution grid occupancy.
//
// A word's vectors are projected onto their top D principal components and
// enclosed in the smallest axis-aligned cube containing them. Level l cuts
// every axis of the cube into 2^l equal intervals; n_l is the number of
// occupied cells. The score is
//
//   sum_{l=1..L} ln(n_l) / 2^l
//
// so a word whose points share one cell at every level scores 0, and each
// coarser level weighs twice as much as the next finer one.

#ifndef WSIMIM_POLYSEMY_H_
#define WSIMIM_POLYSEMY_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace wsimim {

inline constexpr int kDefaultGridDims = 3;
inline constexpr int kDefaultGridLevels = 8;

// Principal components of the centered rows, one per column, ordered by
// decreasing variance. The largest-magnitude coordinate of every component
// is positive. Components beyond the data's rank are zero columns.
Eigen::MatrixXd PrincipalComponents(const Eigen::MatrixXd& vectors, int dims);

// Rows projected onto their top `dims` principal components (n x dims).
// Throws std::invalid_argument for fewer than 2 distinct rows or dims > m.
Eigen::MatrixXd Project(const Eigen::MatrixXd& vectors, int dims);

struct GridPyramid {
  int dims = kDefaultGridDims;
  int levels = kDefaultGridLevels;
  Eigen::VectorXd lower;           // cube corner
  double side = 0.0;               // cube edge length (padded)
  std::vector<int64_t> occupied;   // n_l for l = 1..levels
};

// Occupancy over already-projected points (rows).
GridPyramid BuildPyramid(const Eigen::MatrixXd& points, int levels);

double PyramidScore(const GridPyramid& pyramid);

// 0 when all rows coincide.
double PolysemyScore(const Eigen::MatrixXd& vectors,
                     int dims = kDefaultGridDims,
                     int levels = kDefaultGridLevels);

struct PolysemyCalibration {
  double score_low = 0.0;
  double score_high = 1.0;
  int k_min = 2;
  int k_max = 10;

  void Validate() const;
};

// Calibration shipped with the tool, fitted on the synthetic benchmark.
PolysemyCalibration DefaultCalibration();

// Affine map of [score_low, score_high] onto [k_min, k_max], clamped and
// rounded half up.
int ClustersFromScore(double score, const PolysemyCalibration& calibration);

// Least-squares fit k ~ a + b * score, expressed as the score interval that
// maps onto [k_min, k_max]. Needs a positive slope.
PolysemyCalibration FitCalibration(const std::vector<double>& scores,
                                   const std::vector<int>& true_k, int k_min,
                                   int k_max);

}  // namespace wsimim

#endif  // WSIMIM_POLYSEMY_H_
