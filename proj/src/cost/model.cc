// Copyright 2026 The MergeDSE Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mergedse/cost/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fmt/core.h"
#include "spdlog/spdlog.h"

namespace mergedse::cost {
namespace {

constexpr int kMinSamples = 20;
constexpr char kMagic[] = "mergedse-area-model";
constexpr int kFormatVersion = 1;

double FeatureValue(double count, bool log) {
  return log ? std::log1p(std::max(0.0, count)) : count;
}

Eigen::MatrixXd FeatureMatrix(const std::vector<Sample>& data, bool log) {
  Eigen::MatrixXd x(ir::kNumOpcodes, data.size());
  for (std::size_t j = 0; j < data.size(); ++j) {
    for (std::size_t k = 0; k < ir::kNumOpcodes; ++k) {
      x(k, j) = FeatureValue(data[j].features[k], log);
    }
  }
  return x;
}

// Fills the standardization fields shared by both model kinds and returns
// the standardized design matrix and targets.
void Prepare(const std::vector<Sample>& data, bool log, Eigen::VectorXd* x_mean, Eigen::VectorXd* x_scale,
             double* y_mean, double* y_scale, Eigen::MatrixXd* x, Eigen::RowVectorXd* y) {
  if (data.size() < static_cast<std::size_t>(kMinSamples)) {
    throw ModelError(fmt::format("need at least {} samples, got {}", kMinSamples, data.size()));
  }
  const double n = static_cast<double>(data.size());
  *x = FeatureMatrix(data, log);
  *x_mean = x->rowwise().mean();
  *x_scale = ((x->colwise() - *x_mean).array().square().rowwise().sum() / n).sqrt();
  // A constant column would otherwise get a rounding-noise scale and blow
  // up any input that differs from it.
  for (Eigen::Index k = 0; k < x_scale->size(); ++k) {
    if (x->row(k).minCoeff() == x->row(k).maxCoeff()) (*x_scale)(k) = 1;
  }
  *x = (x->colwise() - *x_mean).array().colwise() / x_scale->array();
  y->resize(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (log && !(data[j].luts > 0)) {
      throw ModelError(fmt::format("sample '{}' has non-positive target {}", data[j].name,
                                   data[j].luts));
    }
    (*y)(j) = log ? std::log(data[j].luts) : data[j].luts;
  }
  if (y->minCoeff() == y->maxCoeff()) throw ModelError("all training targets are equal");
  *y_mean = y->mean();
  *y_scale = std::sqrt((y->array() - *y_mean).square().sum() / n);
  *y = (y->array() - *y_mean) / *y_scale;
}

double LassoLoss(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& y, const Eigen::VectorXd& w,
                 double alpha) {
  Eigen::RowVectorXd r = y - w.transpose() * x;
  return 0.5 * r.squaredNorm() / y.size() + alpha * w.lpNorm<1>();
}

}  // namespace

Mlp::Mlp(const std::vector<int>& widths, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t l = 1; l < widths.size(); ++l) {
    std::normal_distribution<double> dist(0, std::sqrt(2.0 / widths[l - 1]));
    Layer layer{Eigen::MatrixXd(widths[l], widths[l - 1]), Eigen::VectorXd::Zero(widths[l])};
    for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.w.rows(); ++r) layer.w(r, c) = dist(rng);
    }
    layers_.push_back(std::move(layer));
  }
}

Eigen::RowVectorXd Mlp::Forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (layers_[l].w * a).colwise() + layers_[l].b;
    a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return a.row(0);
}

double Mlp::Loss(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& y, double alpha) const {
  const double n = static_cast<double>(y.size());
  double loss = 0.5 * (Forward(x) - y).squaredNorm() / n;
  if (alpha != 0) {
    for (const auto& l : layers_) loss += 0.5 * alpha * l.w.squaredNorm() / n;
  }
  return loss;
}

Eigen::VectorXd Mlp::Gradient(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& y,
                              double alpha) const {
  const double n = static_cast<double>(y.size());
  std::vector<Eigen::MatrixXd> acts{x};
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (layers_[l].w * acts.back()).colwise() + layers_[l].b;
    acts.push_back(l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z);
  }
  std::vector<Eigen::MatrixXd> dw(layers_.size());
  std::vector<Eigen::VectorXd> db(layers_.size());
  Eigen::MatrixXd delta = (acts.back() - y) / n;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    dw[l] = delta * acts[l].transpose() + (alpha / n) * layers_[l].w;
    db[l] = delta.rowwise().sum();
    if (l > 0) {
      // ReLU'(z) is 1 exactly where the activation is positive.
      delta = (layers_[l].w.transpose() * delta).cwiseProduct(
          (acts[l].array() > 0).cast<double>().matrix());
    }
  }
  Eigen::VectorXd g(ParameterCount());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    g.segment(at, dw[l].size()) = Eigen::Map<const Eigen::VectorXd>(dw[l].data(), dw[l].size());
    at += dw[l].size();
    g.segment(at, db[l].size()) = db[l];
    at += db[l].size();
  }
  return g;
}

Eigen::VectorXd Mlp::Parameters() const {
  Eigen::VectorXd p(ParameterCount());
  Eigen::Index at = 0;
  for (const auto& l : layers_) {
    p.segment(at, l.w.size()) = Eigen::Map<const Eigen::VectorXd>(l.w.data(), l.w.size());
    at += l.w.size();
    p.segment(at, l.b.size()) = l.b;
    at += l.b.size();
  }
  return p;
}

void Mlp::SetParameters(const Eigen::VectorXd& p) {
  Eigen::Index at = 0;
  for (auto& l : layers_) {
    Eigen::Map<Eigen::VectorXd>(l.w.data(), l.w.size()) = p.segment(at, l.w.size());
    at += l.w.size();
    l.b = p.segment(at, l.b.size());
    at += l.b.size();
  }
}

int Mlp::ParameterCount() const {
  Eigen::Index n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return static_cast<int>(n);
}

double AreaModel::Predict(const FeatureVector& fv) const {
  Eigen::VectorXd x(fv.size());
  for (std::size_t k = 0; k < fv.size(); ++k) {
    x(k) = (FeatureValue(fv[k], log_) - x_mean_(k)) / x_scale_(k);
  }
  double out = kind_ == ModelKind::kLasso ? lasso_w_.dot(x) + lasso_b_ : mlp_.Forward(x)(0);
  double y = y_mean_ + y_scale_ * out;
  return log_ ? std::exp(y) : y;
}

std::vector<double> AreaModel::PredictAll(const std::vector<Sample>& data) const {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(Predict(s.features));
  return out;
}

AreaModel TrainLasso(const std::vector<Sample>& train, const LassoOptions& opts) {
  AreaModel model;
  model.kind_ = ModelKind::kLasso;
  model.alpha_ = opts.alpha;
  model.log_ = opts.log_transform;
  Eigen::MatrixXd x;
  Eigen::RowVectorXd y;
  Prepare(train, opts.log_transform, &model.x_mean_, &model.x_scale_, &model.y_mean_,
          &model.y_scale_, &x, &y);
  const Eigen::Index d = x.rows();
  const double n = static_cast<double>(x.cols());
  // Standardized columns have unit mean square unless constant.
  Eigen::VectorXd col_sq = x.array().square().rowwise().sum() / n;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  Eigen::RowVectorXd resid = y;
  double loss = LassoLoss(x, y, w, opts.alpha);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (col_sq(k) == 0) continue;
      double rho = x.row(k).dot(resid) / n + col_sq(k) * w(k);
      double next = std::copysign(std::max(std::abs(rho) - opts.alpha, 0.0), rho) / col_sq(k);
      if (next != w(k)) {
        resid -= (next - w(k)) * x.row(k);
        w(k) = next;
      }
    }
    double after = LassoLoss(x, y, w, opts.alpha);
    bool done = loss - after < opts.tolerance;
    loss = after;
    if (done) break;
  }
  model.lasso_w_ = w;
  model.lasso_b_ = 0;  // targets are centered
  return model;
}

AreaModel TrainMlp(const std::vector<Sample>& train, const MlpOptions& opts) {
  AreaModel model;
  model.kind_ = ModelKind::kMlp;
  model.alpha_ = opts.alpha;
  model.log_ = opts.log_transform;
  Eigen::MatrixXd x;
  Eigen::RowVectorXd y;
  Prepare(train, opts.log_transform, &model.x_mean_, &model.x_scale_, &model.y_mean_,
          &model.y_scale_, &x, &y);
  std::vector<int> widths{static_cast<int>(x.rows())};
  for (int l = 0; l < opts.hidden_layers; ++l) widths.push_back(opts.hidden_width);
  widths.push_back(1);
  Mlp net(widths, opts.seed);

  // Adam.
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  Eigen::VectorXd params = net.Parameters();
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(params.size());
  std::vector<Eigen::Index> order(x.cols());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(opts.seed ^ 0x5eed);
  double lr = opts.learning_rate;
  long step = 0;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    if (std::find(opts.decay_epochs.begin(), opts.decay_epochs.end(), epoch) !=
        opts.decay_epochs.end()) {
      lr *= opts.decay_factor;
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
      std::size_t end = std::min(order.size(), start + opts.batch_size);
      Eigen::MatrixXd bx(x.rows(), end - start);
      Eigen::RowVectorXd by(end - start);
      for (std::size_t j = start; j < end; ++j) {
        bx.col(j - start) = x.col(order[j]);
        by(j - start) = y(order[j]);
      }
      Eigen::VectorXd g = net.Gradient(bx, by, opts.alpha);
      ++step;
      m1 = beta1 * m1 + (1 - beta1) * g;
      m2 = beta2 * m2 + (1 - beta2) * g.cwiseAbs2();
      double c1 = 1 - std::pow(beta1, step), c2 = 1 - std::pow(beta2, step);
      params.array() -= lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + eps);
      net.SetParameters(params);
    }
  }
  model.mlp_ = std::move(net);
  return model;
}

double SelectLassoAlpha(const std::vector<Sample>& train, const std::vector<double>& grid,
                        int folds) {
  if (grid.empty()) throw ModelError("empty alpha grid");
  double best_alpha = grid.front(), best_mre = INFINITY;
  for (double alpha : grid) {
    double total = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<Sample> fit, held;
      for (std::size_t j = 0; j < train.size(); ++j) {
        (static_cast<int>(j % folds) == f ? held : fit).push_back(train[j]);
      }
      auto model = TrainLasso(fit, {.alpha = alpha});
      std::vector<double> y;
      for (const auto& s : held) y.push_back(s.luts);
      total += MeanRelativeError(y, model.PredictAll(held));
    }
    if (total < best_mre) {
      best_mre = total;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

double RSquared(const std::vector<double>& y, const std::vector<double>& f) {
  if (y.empty() || y.size() != f.size()) throw ModelError("r^2 needs equal, non-empty inputs");
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - f[i]) * (y[i] - f[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0) throw ModelError("r^2 is undefined for constant targets");
  return 1 - ss_res / ss_tot;
}

double MeanRelativeError(const std::vector<double>& y, const std::vector<double>& f) {
  if (y.size() != f.size()) throw ModelError("MRE needs equal-length inputs");
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0) continue;
    sum += std::abs(y[i] - f[i]) / std::abs(y[i]);
    ++n;
  }
  if (n < y.size()) spdlog::warn("MRE: skipped {} zero targets", y.size() - n);
  if (n == 0) throw ModelError("MRE: no non-zero targets");
  return sum / n;
}

EvalReport Evaluate(const AreaModel& model, const std::vector<Sample>& train,
                    const std::vector<Sample>& test) {
  auto targets = [](const std::vector<Sample>& d) {
    std::vector<double> y;
    for (const auto& s : d) y.push_back(s.luts);
    return y;
  };
  EvalReport r;
  if (!train.empty()) {
    auto y = targets(train);
    auto f = model.PredictAll(train);
    r.r2_train = RSquared(y, f);
    r.mre_train = MeanRelativeError(y, f);
  }
  auto y = targets(test);
  auto f = model.PredictAll(test);
  r.r2_test = RSquared(y, f);
  r.mre_test = MeanRelativeError(y, f);
  return r;
}

std::string AreaModel::Serialize() const {
  auto vec = [](const Eigen::VectorXd& v) {
    std::string s;
    for (Eigen::Index k = 0; k < v.size(); ++k) s += fmt::format("{}{}", k ? " " : "", v(k));
    return s + "\n";
  };
  std::string s = fmt::format("{} {}\n", kMagic, kFormatVersion);
  s += fmt::format("kind {}\n", kind_ == ModelKind::kLasso ? "lasso" : "mlp");
  s += fmt::format("alpha {}\n", alpha_);
  s += fmt::format("transform {}\n", log_ ? "log" : "none");
  s += fmt::format("features {}\n", x_mean_.size());
  s += "x_mean " + vec(x_mean_);
  s += "x_scale " + vec(x_scale_);
  s += fmt::format("y_mean {}\ny_scale {}\n", y_mean_, y_scale_);
  if (kind_ == ModelKind::kLasso) {
    s += "weights " + vec(lasso_w_);
    s += fmt::format("intercept {}\n", lasso_b_);
  } else {
    s += fmt::format("layers {}\n", mlp_.layers().size());
    for (const auto& l : mlp_.layers()) {
      s += fmt::format("layer {} {}\n", l.w.rows(), l.w.cols());
      for (Eigen::Index r = 0; r < l.w.rows(); ++r) s += vec(l.w.row(r).transpose());
      s += vec(l.b);
    }
  }
  return s;
}

AreaModel AreaModel::Parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto expect = [&](const std::string& word) {
    std::string w;
    if (!(in >> w) || w != word) {
      throw ModelError(fmt::format("model file: expected '{}', found '{}'", word, w));
    }
  };
  auto number = [&]() {
    std::string w;
    if (!(in >> w)) throw ModelError("model file: unexpected end");
    try {
      std::size_t used = 0;
      double v = std::stod(w, &used);
      if (used == w.size()) return v;
    } catch (const std::exception&) {
    }
    throw ModelError(fmt::format("model file: bad number '{}'", w));
  };
  auto count = [&]() {
    double v = number();
    if (v < 0 || v != std::floor(v) || v > 1e6) throw ModelError("model file: bad dimension");
    return static_cast<Eigen::Index>(v);
  };
  auto vec = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = number();
    return v;
  };
  AreaModel m;
  expect(kMagic);
  if (number() != kFormatVersion) throw ModelError("model file: unsupported version");
  expect("kind");
  std::string kind;
  in >> kind;
  if (kind != "lasso" && kind != "mlp") throw ModelError("model file: unknown kind " + kind);
  m.kind_ = kind == "lasso" ? ModelKind::kLasso : ModelKind::kMlp;
  expect("alpha");
  m.alpha_ = number();
  expect("transform");
  std::string transform;
  in >> transform;
  if (transform != "log" && transform != "none") {
    throw ModelError("model file: unknown transform " + transform);
  }
  m.log_ = transform == "log";
  expect("features");
  Eigen::Index d = count();
  if (d != static_cast<Eigen::Index>(ir::kNumOpcodes)) {
    throw ModelError(fmt::format("model file: {} features, expected {}", d, ir::kNumOpcodes));
  }
  expect("x_mean");
  m.x_mean_ = vec(d);
  expect("x_scale");
  m.x_scale_ = vec(d);
  expect("y_mean");
  m.y_mean_ = number();
  expect("y_scale");
  m.y_scale_ = number();
  if (m.kind_ == ModelKind::kLasso) {
    expect("weights");
    m.lasso_w_ = vec(d);
    expect("intercept");
    m.lasso_b_ = number();
    return m;
  }
  expect("layers");
  Eigen::Index n_layers = count();
  Eigen::Index prev = d;
  for (Eigen::Index l = 0; l < n_layers; ++l) {
    expect("layer");
    Eigen::Index rows = count(), cols = count();
    if (cols != prev) throw ModelError("model file: layer shapes do not chain");
    Mlp::Layer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd()};
    for (Eigen::Index r = 0; r < rows; ++r) layer.w.row(r) = vec(cols).transpose();
    layer.b = vec(rows);
    m.mlp_.mutable_layers().push_back(std::move(layer));
    prev = rows;
  }
  if (prev != 1) throw ModelError("model file: output layer must have one unit");
  return m;
}

}  // namespace mergedse::cost
