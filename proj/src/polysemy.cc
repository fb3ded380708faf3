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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace wsimim {
namespace {

constexpr double kBoxPadding = 1e-9;

bool AllRowsEqual(const Eigen::MatrixXd& vectors) {
  for (Eigen::Index i = 1; i < vectors.rows(); ++i)
    if (vectors.row(i) != vectors.row(0)) return false;
  return true;
}

}  // namespace

Eigen::MatrixXd PrincipalComponents(const Eigen::MatrixXd& vectors, int dims) {
  if (dims < 1 || dims > vectors.cols()) {
    throw std::invalid_argument("projection needs 1 <= dims <= " +
                                std::to_string(vectors.cols()));
  }
  if (vectors.rows() < 2 || AllRowsEqual(vectors))
    throw std::invalid_argument("projection needs at least 2 distinct points");
  const Eigen::MatrixXd centered =
      vectors.rowwise() - vectors.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = sv(0) * 1e-12 * std::max(centered.rows(), centered.cols());
  Eigen::MatrixXd components = Eigen::MatrixXd::Zero(vectors.cols(), dims);
  for (int c = 0; c < dims && c < sv.size(); ++c) {
    if (sv(c) <= tol) break;
    Eigen::VectorXd v = svd.matrixV().col(c);
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 1; r < v.size(); ++r)
      if (std::abs(v(r)) > std::abs(v(pivot))) pivot = r;
    if (v(pivot) < 0.0) v = -v;
    components.col(c) = v;
  }
  return components;
}

Eigen::MatrixXd Project(const Eigen::MatrixXd& vectors, int dims) {
  const Eigen::MatrixXd components = PrincipalComponents(vectors, dims);
  const Eigen::MatrixXd centered =
      vectors.rowwise() - vectors.colwise().mean();
  return centered * components;
}

GridPyramid BuildPyramid(const Eigen::MatrixXd& points, int levels) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (points.rows() < 1) throw std::invalid_argument("no points");
  if (levels * points.cols() > 62)
    throw std::invalid_argument("grid too fine for 62-bit cell codes");
  GridPyramid pyramid;
  pyramid.dims = static_cast<int>(points.cols());
  pyramid.levels = levels;
  const Eigen::RowVectorXd lo = points.colwise().minCoeff();
  const Eigen::RowVectorXd hi = points.colwise().maxCoeff();
  const double extent = (hi - lo).maxCoeff();
  pyramid.lower = (lo.array() - kBoxPadding * extent).transpose();
  pyramid.side = extent * (1.0 + 2.0 * kBoxPadding);

  std::vector<int64_t> codes(points.rows());
  for (int level = 1; level <= levels; ++level) {
    const int64_t cells = int64_t{1} << level;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      int64_t code = 0;
      for (Eigen::Index a = 0; a < points.cols(); ++a) {
        int64_t cell = 0;
        if (pyramid.side > 0.0) {
          const double t = (points(i, a) - pyramid.lower(a)) / pyramid.side;
          cell = std::clamp<int64_t>(
              static_cast<int64_t>(std::floor(t * static_cast<double>(cells))),
              0, cells - 1);
        }
        code = (code << level) | cell;
      }
      codes[i] = code;
    }
    std::sort(codes.begin(), codes.end());
    pyramid.occupied.push_back(
        std::unique(codes.begin(), codes.end()) - codes.begin());
  }
  return pyramid;
}

double PyramidScore(const GridPyramid& pyramid) {
  double score = 0.0;
  for (size_t l = 0; l < pyramid.occupied.size(); ++l) {
    score += std::log(static_cast<double>(pyramid.occupied[l])) /
             std::ldexp(1.0, static_cast<int>(l) + 1);
  }
  return score;
}

double PolysemyScore(const Eigen::MatrixXd& vectors, int dims, int levels) {
  if (vectors.rows() == 0) throw std::invalid_argument("no vectors");
  if (AllRowsEqual(vectors)) return 0.0;
  return PyramidScore(BuildPyramid(Project(vectors, dims), levels));
}

void PolysemyCalibration::Validate() const {
  if (k_min < 1 || k_max < k_min)
    throw std::invalid_argument("calibration needs 1 <= k_min <= k_max");
  if (!(score_low < score_high) || !std::isfinite(score_low) ||
      !std::isfinite(score_high)) {
    throw std::invalid_argument("calibration needs score_low < score_high");
  }
}

// Least-squares fit on 210 synthetic words (BenchmarkSpec defaults, seed 1):
//   wsimim synth --out cal --words 210 --seed 1
//   wsimim polysemy cal/*.test.dump --fit cal/gold.key
PolysemyCalibration DefaultCalibration() {
  PolysemyCalibration c;
  c.score_low = 1.778;
  c.score_high = 3.103;
  c.k_min = 2;
  c.k_max = 10;
  return c;
}

int ClustersFromScore(double score, const PolysemyCalibration& calibration) {
  calibration.Validate();
  const double t = (score - calibration.score_low) /
                   (calibration.score_high - calibration.score_low);
  const double k = calibration.k_min + t * (calibration.k_max - calibration.k_min);
  const double clamped = std::clamp(k, static_cast<double>(calibration.k_min),
                                    static_cast<double>(calibration.k_max));
  return static_cast<int>(std::floor(clamped + 0.5));
}

PolysemyCalibration FitCalibration(const std::vector<double>& scores,
                                   const std::vector<int>& true_k, int k_min,
                                   int k_max) {
  if (scores.size() != true_k.size() || scores.size() < 2)
    throw std::invalid_argument("calibration needs >= 2 (score, k) pairs");
  const double n = static_cast<double>(scores.size());
  double mean_s = 0.0, mean_k = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    mean_s += scores[i] / n;
    mean_k += true_k[i] / n;
  }
  double cov = 0.0, var = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    cov += (scores[i] - mean_s) * (true_k[i] - mean_k);
    var += (scores[i] - mean_s) * (scores[i] - mean_s);
  }
  if (!(var > 0.0) || !(cov > 0.0))
    throw std::invalid_argument("scores do not increase with k; cannot calibrate");
  const double slope = cov / var;
  const double intercept = mean_k - slope * mean_s;
  PolysemyCalibration c;
  c.k_min = k_min;
  c.k_max = k_max;
  c.score_low = (k_min - intercept) / slope;
  c.score_high = (k_max - intercept) / slope;
  c.Validate();
  return c;
}

}  // namespace wsimim
