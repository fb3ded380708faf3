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

#include "wsimim/mim.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wsimim/rng.h"

namespace wsimim {
namespace {

constexpr double kLogClamp = 1e-12;
constexpr double kProbabilityTolerance = 1e-9;
constexpr char kCheckpointMagic[8] = {'W', 'S', 'I', 'M', 'I', 'M', 'C', 'K'};
constexpr uint32_t kCheckpointVersion = 1;

Eigen::MatrixXd Relu(const Eigen::MatrixXd& a) { return a.cwiseMax(0.0); }

Eigen::MatrixXd SoftmaxRows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

void CheckDistributions(const Eigen::MatrixXd& phi_x,
                        const Eigen::MatrixXd& phi_xp) {
  if (phi_x.rows() == 0) throw std::invalid_argument("empty batch");
  if (phi_x.rows() != phi_xp.rows() || phi_x.cols() != phi_xp.cols())
    throw std::invalid_argument("batch halves differ in shape");
  for (const Eigen::MatrixXd* m : {&phi_x, &phi_xp}) {
    if (!m->allFinite() || (m->array() < 0.0).any())
      throw std::invalid_argument("batch contains a non-probability vector");
    const Eigen::VectorXd sums = m->rowwise().sum();
    if (((sums.array() - 1.0).abs() > kProbabilityTolerance).any())
      throw std::invalid_argument("batch contains a non-probability vector");
  }
}

Eigen::MatrixXd SymmetricJoint(const Eigen::MatrixXd& phi_x,
                               const Eigen::MatrixXd& phi_xp) {
  const Eigen::MatrixXd joint =
      (phi_x.transpose() * phi_xp) / static_cast<double>(phi_x.rows());
  return 0.5 * (joint + joint.transpose());
}

double IicFromJoint(const Eigen::MatrixXd& joint) {
  const Eigen::VectorXd row = joint.rowwise().sum();
  const Eigen::RowVectorXd col = joint.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index a = 0; a < joint.rows(); ++a) {
    for (Eigen::Index b = 0; b < joint.cols(); ++b) {
      const double j = joint(a, b);
      mi += j * (std::log(std::max(j, kLogClamp)) -
                 std::log(std::max(row(a), kLogClamp)) -
                 std::log(std::max(col(b), kLogClamp)));
    }
  }
  return -mi;
}

// d IicLoss / d joint, before symmetrization is undone.
Eigen::MatrixXd IicJointGradient(const Eigen::MatrixXd& joint) {
  const Eigen::VectorXd row = joint.rowwise().sum();
  const Eigen::RowVectorXd col = joint.colwise().sum();
  const auto dlog = [](double v) {
    return std::log(std::max(v, kLogClamp)) + (v > kLogClamp ? 1.0 : 0.0);
  };
  Eigen::MatrixXd g(joint.rows(), joint.cols());
  for (Eigen::Index a = 0; a < joint.rows(); ++a) {
    for (Eigen::Index b = 0; b < joint.cols(); ++b) {
      g(a, b) = -dlog(joint(a, b)) + dlog(row(a)) + dlog(col(b));
    }
  }
  return g;
}

struct Activations {
  Eigen::MatrixXd a1, h1, a2, h2, phi;
};

Activations ForwardCached(const MimParameters& p, const Eigen::MatrixXd& x) {
  Activations act;
  act.a1.noalias() = x * p.w1;
  act.a1.rowwise() += p.b1;
  act.h1 = Relu(act.a1);
  act.a2.noalias() = act.h1 * p.w2;
  act.a2.rowwise() += p.b2;
  act.h2 = Relu(act.a2);
  Eigen::MatrixXd logits = act.h2 * p.w3;
  logits.rowwise() += p.b3;
  act.phi = SoftmaxRows(logits);
  return act;
}

void CheckInputs(const MimConfig& config, const Eigen::MatrixXd& x) {
  if (x.cols() != config.input_dim) {
    throw std::invalid_argument("input has dimension " +
                                std::to_string(x.cols()) + ", model expects " +
                                std::to_string(config.input_dim));
  }
  if (!x.allFinite()) throw std::invalid_argument("input is not finite");
}

template <typename T>
void PutLe(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, uint64_t, uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (size_t b = 0; b < sizeof(T); ++b)
    out.push_back(static_cast<char>(bits >> (8 * b)));
}

class LeReader {
 public:
  explicit LeReader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T Get() {
    using U = std::conditional_t<sizeof(T) == 8, uint64_t, uint32_t>;
    if (pos_ + sizeof(T) > data_.size())
      throw FormatError("checkpoint is truncated", 0);
    U bits = 0;
    for (size_t b = sizeof(T); b-- > 0;)
      bits = (bits << 8) | static_cast<unsigned char>(data_[pos_ + b]);
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::string_view Bytes(size_t n) {
    if (pos_ + n > data_.size()) throw FormatError("checkpoint is truncated", 0);
    std::string_view out(data_.data() + pos_, n);
    pos_ += n;
    return out;
  }

  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  size_t pos_ = 0;
};

template <typename Derived>
void PutTensor(std::string& out, const Eigen::DenseBase<Derived>& t) {
  for (Eigen::Index r = 0; r < t.rows(); ++r)
    for (Eigen::Index c = 0; c < t.cols(); ++c) PutLe(out, t(r, c));
}

template <typename Derived>
void GetTensor(LeReader& in, Eigen::DenseBase<Derived>& t) {
  for (Eigen::Index r = 0; r < t.rows(); ++r)
    for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = in.Get<double>();
}

}  // namespace

void MimConfig::Validate() const {
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
  if (hidden_dim < num_classes)
    throw std::invalid_argument("hidden_dim must be >= num_classes");
  if (epochs < 1 || batch_size < 1 || runs < 1)
    throw std::invalid_argument("epochs, batch_size and runs must be >= 1");
  if (!(lr_init > 0.0) || !std::isfinite(lr_init))
    throw std::invalid_argument("lr_init must be > 0");
  if (!(match_coeff >= 0.0) || !std::isfinite(match_coeff))
    throw std::invalid_argument("match_coeff must be >= 0");
}

MimParameters MimParameters::Zeros(const MimConfig& c) {
  MimParameters p;
  p.w1 = Eigen::MatrixXd::Zero(c.input_dim, c.hidden_dim);
  p.b1 = Eigen::RowVectorXd::Zero(c.hidden_dim);
  p.w2 = Eigen::MatrixXd::Zero(c.hidden_dim, c.hidden_dim);
  p.b2 = Eigen::RowVectorXd::Zero(c.hidden_dim);
  p.w3 = Eigen::MatrixXd::Zero(c.hidden_dim, c.num_classes);
  p.b3 = Eigen::RowVectorXd::Zero(c.num_classes);
  return p;
}

MimParameters MimParameters::Initialize(const MimConfig& config,
                                        uint64_t seed) {
  MimParameters p = Zeros(config);
  Rng rng(seed);
  const auto fill = [&rng](auto& t, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c)
        t(r, c) = rng.Uniform(-bound, bound);
  };
  fill(p.w1, config.input_dim);
  fill(p.b1, config.input_dim);
  fill(p.w2, config.hidden_dim);
  fill(p.b2, config.hidden_dim);
  fill(p.w3, config.hidden_dim);
  fill(p.b3, config.hidden_dim);
  return p;
}

size_t MimParameters::size() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

bool MimParameters::AllFinite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() &&
         b2.allFinite() && w3.allFinite() && b3.allFinite();
}

bool operator==(const MimParameters& a, const MimParameters& b) {
  const auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return same(a.w1, b.w1) && same(a.b1, b.b1) && same(a.w2, b.w2) &&
         same(a.b2, b.b2) && same(a.w3, b.w3) && same(a.b3, b.b3);
}

ForwardResult Forward(const MimModel& model, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd row = x.transpose();
  CheckInputs(model.config, row);
  const Activations act = ForwardCached(model.params, row);
  return {act.phi.row(0).transpose(), act.h1.row(0).transpose()};
}

Eigen::MatrixXd ForwardBatch(const MimModel& model, const Eigen::MatrixXd& x) {
  CheckInputs(model.config, x);
  return ForwardCached(model.params, x).phi;
}

double IicLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp) {
  CheckDistributions(phi_x, phi_xp);
  return IicFromJoint(SymmetricJoint(phi_x, phi_xp));
}

double MatchLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp,
                 double coeff) {
  if (phi_x.rows() == 0) throw std::invalid_argument("empty batch");
  if (phi_x.rows() != phi_xp.rows() || phi_x.cols() != phi_xp.cols())
    throw std::invalid_argument("batch halves differ in shape");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < phi_x.rows(); ++i) {
    const double nx = phi_x.row(i).norm();
    const double np = phi_xp.row(i).norm();
    if (nx == 0.0 || np == 0.0)
      throw std::invalid_argument("match loss needs non-zero vectors");
    sum += phi_x.row(i).dot(phi_xp.row(i)) / (nx * np);
  }
  return -coeff * sum;
}

double TotalLoss(const Eigen::MatrixXd& phi_x, const Eigen::MatrixXd& phi_xp,
                 double match_coeff) {
  return IicLoss(phi_x, phi_xp) + MatchLoss(phi_x, phi_xp, match_coeff);
}

double BatchLoss(const MimModel& model, const Eigen::MatrixXd& x,
                 const Eigen::MatrixXd& x_prime) {
  return TotalLoss(ForwardBatch(model, x), ForwardBatch(model, x_prime),
                   model.config.match_coeff);
}

MimParameters Gradient(const MimModel& model, const Eigen::MatrixXd& x,
                       const Eigen::MatrixXd& x_prime) {
  CheckInputs(model.config, x);
  CheckInputs(model.config, x_prime);
  if (x.rows() == 0 || x.rows() != x_prime.rows())
    throw std::invalid_argument("batch halves must be non-empty and equal");
  const Eigen::Index n = x.rows();
  const MimParameters& p = model.params;

  // Both views share the parameters; run them as one stacked batch.
  Eigen::MatrixXd stacked(2 * n, x.cols());
  stacked.topRows(n) = x;
  stacked.bottomRows(n) = x_prime;
  const Activations act = ForwardCached(p, stacked);
  const auto phi_x = act.phi.topRows(n);
  const auto phi_xp = act.phi.bottomRows(n);

  Eigen::MatrixXd d_phi(2 * n, act.phi.cols());
  {
    const Eigen::MatrixXd g = IicJointGradient(SymmetricJoint(phi_x, phi_xp));
    const Eigen::MatrixXd g0 = 0.5 * (g + g.transpose());
    const double inv_n = 1.0 / static_cast<double>(n);
    d_phi.topRows(n).noalias() = inv_n * phi_xp * g0.transpose();
    d_phi.bottomRows(n).noalias() = inv_n * phi_x * g0;
  }
  const double coeff = model.config.match_coeff;
  if (coeff != 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto u = phi_x.row(i);
      const auto v = phi_xp.row(i);
      const double nu = u.norm();
      const double nv = v.norm();
      const double cos = u.dot(v) / (nu * nv);
      d_phi.row(i) -= coeff * (v / (nu * nv) - cos * u / (nu * nu));
      d_phi.row(n + i) -= coeff * (u / (nu * nv) - cos * v / (nv * nv));
    }
  }

  // Softmax backward.
  const Eigen::VectorXd inner = (d_phi.array() * act.phi.array()).rowwise().sum();
  Eigen::MatrixXd d_logits =
      act.phi.array() * (d_phi.array().colwise() - inner.array());

  MimParameters grad;
  grad.w3.noalias() = act.h2.transpose() * d_logits;
  grad.b3 = d_logits.colwise().sum();
  Eigen::MatrixXd d_a2 = d_logits * p.w3.transpose();
  d_a2.array() *= (act.a2.array() > 0.0).cast<double>();
  grad.w2.noalias() = act.h1.transpose() * d_a2;
  grad.b2 = d_a2.colwise().sum();
  Eigen::MatrixXd d_a1 = d_a2 * p.w2.transpose();
  d_a1.array() *= (act.a1.array() > 0.0).cast<double>();
  grad.w1.noalias() = stacked.transpose() * d_a1;
  grad.b1 = d_a1.colwise().sum();
  return grad;
}

AdamOptimizer::AdamOptimizer(const MimConfig& config)
    : m_(MimParameters::Zeros(config)), v_(MimParameters::Zeros(config)) {}

void AdamOptimizer::Step(MimParameters& params, const MimParameters& grad,
                         double lr) {
  ++t_;
  const double correction1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  const double step_size = lr / correction1;
  const double inv_sqrt_c2 = 1.0 / std::sqrt(correction2);
  const auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m.array() = kBeta1 * m.array() + (1.0 - kBeta1) * g.array();
    v.array() = kBeta2 * v.array() + (1.0 - kBeta2) * g.array().square();
    param.array() -=
        step_size * m.array() / (v.array().sqrt() * inv_sqrt_c2 + kEpsilon);
  };
  update(params.w1, m_.w1, v_.w1, grad.w1);
  update(params.b1, m_.b1, v_.b1, grad.b1);
  update(params.w2, m_.w2, v_.w2, grad.w2);
  update(params.b2, m_.b2, v_.b2, grad.b2);
  update(params.w3, m_.w3, v_.w3, grad.w3);
  update(params.b3, m_.b3, v_.b3, grad.b3);
}

double LearningRate(double lr_init, int64_t step, int64_t total_steps) {
  if (total_steps <= 0) return 0.0;
  return lr_init * (1.0 - static_cast<double>(step) /
                              static_cast<double>(total_steps));
}

uint64_t RunSeed(uint64_t config_seed, int run) {
  return DeriveSeed(config_seed, static_cast<uint64_t>(run));
}

MimModel Train(const VectorPairSet& train_set, const VectorPairSet& val_set,
               const MimConfig& config, TrainingTrace* trace) {
  config.Validate();
  if (train_set.pairs.empty()) throw std::invalid_argument("empty train set");
  if (val_set.pairs.empty()) throw std::invalid_argument("empty validation set");
  if (train_set.dim != config.input_dim || val_set.dim != config.input_dim) {
    throw std::invalid_argument(
        "dimension mismatch: train dim " + std::to_string(train_set.dim) +
        ", validation dim " + std::to_string(val_set.dim) + ", config " +
        std::to_string(config.input_dim));
  }
  if (!train_set.Complete())
    throw std::invalid_argument("every training pair needs a paraphrase vector");
  if (!val_set.Complete())
    throw std::invalid_argument(
        "every validation pair needs a paraphrase vector");

  const Eigen::MatrixXd x = train_set.OriginalMatrix();
  const Eigen::MatrixXd x_prime = train_set.ParaphraseMatrix();
  const Eigen::MatrixXd val_x = val_set.OriginalMatrix();
  const Eigen::MatrixXd val_x_prime = val_set.ParaphraseMatrix();
  const int n = static_cast<int>(x.rows());
  const int64_t batches_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const int64_t total_steps = batches_per_epoch * config.epochs;

  MimModel best;
  bool have_best = false;
  const auto consider = [&](const MimModel& candidate) {
    if (!have_best || candidate.best_val_loss < best.best_val_loss) {
      best = candidate;
      have_best = true;
    }
  };

  for (int run = 0; run < config.runs; ++run) {
    const uint64_t seed = RunSeed(config.seed, run);
    MimModel model;
    model.config = config;
    model.params = MimParameters::Initialize(config, DeriveSeed(seed, 0));
    model.run_id = run;
    model.epoch_id = 0;
    model.best_val_loss = BatchLoss(model, val_x, val_x_prime);
    if (trace) trace->epochs.push_back({run, 0, model.best_val_loss, 0});
    consider(model);

    Rng shuffle_rng(DeriveSeed(seed, 1));
    AdamOptimizer adam(config);
    std::vector<int> order(n);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), 0);
      shuffle_rng.Shuffle(order);
      for (int start = 0; start < n; start += config.batch_size) {
        const int stop = std::min(n, start + config.batch_size);
        const std::vector<int> rows(order.begin() + start, order.begin() + stop);
        const Eigen::MatrixXd bx = x(rows, Eigen::all);
        const Eigen::MatrixXd bxp = x_prime(rows, Eigen::all);
        const MimParameters grad = Gradient(model, bx, bxp);
        adam.Step(model.params, grad,
                  LearningRate(config.lr_init, adam.steps(), total_steps));
      }
      if (!model.params.AllFinite())
        throw std::runtime_error("training diverged: non-finite parameters");
      model.epoch_id = epoch;
      model.best_val_loss = BatchLoss(model, val_x, val_x_prime);
      if (trace)
        trace->epochs.push_back({run, epoch, model.best_val_loss, adam.steps()});
      consider(model);
    }
  }
  return best;
}

SenseEmbeddingSet Embed(const MimModel& model, const VectorPairSet& set) {
  if (set.dim != model.config.input_dim) {
    throw std::invalid_argument("dimension mismatch: dump dim " +
                                std::to_string(set.dim) + ", model expects " +
                                std::to_string(model.config.input_dim));
  }
  SenseEmbeddingSet out;
  out.ids.reserve(set.pairs.size());
  for (const VectorPair& p : set.pairs) out.ids.push_back(p.id);
  const Eigen::MatrixXd x = set.OriginalMatrix();
  CheckInputs(model.config, x);
  Eigen::MatrixXd a1 = x * model.params.w1;
  a1.rowwise() += model.params.b1;
  out.embeddings = Relu(a1);
  return out;
}

void SaveCheckpoint(const MimModel& model, const std::filesystem::path& path) {
  const MimConfig& c = model.config;
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  PutLe(out, kCheckpointVersion);
  for (const int32_t v : {c.input_dim, c.hidden_dim, c.num_classes, c.epochs,
                          c.batch_size, c.runs})
    PutLe(out, v);
  PutLe(out, c.lr_init);
  PutLe(out, c.match_coeff);
  PutLe(out, c.seed);
  PutLe(out, static_cast<int32_t>(model.run_id));
  PutLe(out, static_cast<int32_t>(model.epoch_id));
  PutLe(out, model.best_val_loss);
  const MimParameters& p = model.params;
  PutTensor(out, p.w1);
  PutTensor(out, p.b1);
  PutTensor(out, p.w2);
  PutTensor(out, p.b2);
  PutTensor(out, p.w3);
  PutTensor(out, p.b3);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write checkpoint " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("I/O error writing " + path.string());
}

MimModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open checkpoint " + path.string());
  LeReader in(std::string((std::istreambuf_iterator<char>(file)),
                          std::istreambuf_iterator<char>()));
  if (in.Bytes(sizeof(kCheckpointMagic)) !=
      std::string_view(kCheckpointMagic, sizeof(kCheckpointMagic)))
    throw FormatError("not a wsimim checkpoint", 0);
  if (in.Get<uint32_t>() != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version", 0);
  MimModel model;
  MimConfig& c = model.config;
  c.input_dim = in.Get<int32_t>();
  c.hidden_dim = in.Get<int32_t>();
  c.num_classes = in.Get<int32_t>();
  c.epochs = in.Get<int32_t>();
  c.batch_size = in.Get<int32_t>();
  c.runs = in.Get<int32_t>();
  c.lr_init = in.Get<double>();
  c.match_coeff = in.Get<double>();
  c.seed = in.Get<uint64_t>();
  try {
    c.Validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint config is invalid: ") + e.what(),
                      0);
  }
  model.run_id = in.Get<int32_t>();
  model.epoch_id = in.Get<int32_t>();
  model.best_val_loss = in.Get<double>();
  model.params = MimParameters::Zeros(c);
  MimParameters& p = model.params;
  GetTensor(in, p.w1);
  GetTensor(in, p.b1);
  GetTensor(in, p.w2);
  GetTensor(in, p.b2);
  GetTensor(in, p.w3);
  GetTensor(in, p.b3);
  if (!in.AtEnd()) throw FormatError("checkpoint has trailing bytes", 0);
  if (!p.AllFinite()) throw FormatError("checkpoint has non-finite parameters", 0);
  return model;
}

}  // namespace wsimim
