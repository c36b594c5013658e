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

// Area models: LASSO regression and a ReLU multilayer perceptron. By default
// both see standardized log(1 + count) features and fit log(LUTs); area
// spans orders of magnitude and relative error is what matters.

#ifndef MERGEDSE_COST_MODEL_H_
#define MERGEDSE_COST_MODEL_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Dense"
#include "mergedse/cost/features.h"
#include "mergedse/cost/oracle.h"

namespace mergedse::cost {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LassoOptions {
  double alpha = 1e-3;
  bool log_transform = true;  // false: raw counts and raw LUTs
  double tolerance = 1e-8;  // stop when a full sweep lowers the loss less than this
  int max_sweeps = 100000;
};

struct MlpOptions {
  int hidden_layers = 6;
  int hidden_width = 40;
  double alpha = 0;  // L2 penalty
  int epochs = 2000;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::vector<int> decay_epochs = {1000, 1500};
  double decay_factor = 0.5;
  uint64_t seed = 1;
  bool log_transform = true;
};

// A fully connected network with ReLU hidden layers and one linear output.
// Columns of the input matrices are samples.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;
  };

  Mlp() = default;
  // widths = {inputs, hidden..., 1}; He-initialized weights, zero biases.
  Mlp(const std::vector<int>& widths, uint64_t seed);

  Eigen::RowVectorXd Forward(const Eigen::MatrixXd& x) const;
  // 0.5 * mean squared error + alpha / (2 * batch) * sum of squared weights.
  double Loss(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& y, double alpha) const;
  // Gradient of Loss, flattened in Parameters() order.
  Eigen::VectorXd Gradient(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& y,
                           double alpha) const;

  // Per layer: w in column-major order, then b.
  Eigen::VectorXd Parameters() const;
  void SetParameters(const Eigen::VectorXd& p);
  int ParameterCount() const;

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

 private:
  std::vector<Layer> layers_;
};

enum class ModelKind { kLasso, kMlp };

class AreaModel {
 public:
  ModelKind kind() const { return kind_; }
  // Predicted LUTs; positive under the log transform.
  double Predict(const FeatureVector& fv) const;
  std::vector<double> PredictAll(const std::vector<Sample>& data) const;

  // Versioned plain-text form; Parse(Serialize()) predicts identically.
  std::string Serialize() const;
  static AreaModel Parse(std::string_view text);

  const Eigen::VectorXd& lasso_weights() const { return lasso_w_; }
  const Mlp& mlp() const { return mlp_; }

 private:
  friend AreaModel TrainLasso(const std::vector<Sample>&, const LassoOptions&);
  friend AreaModel TrainMlp(const std::vector<Sample>&, const MlpOptions&);

  ModelKind kind_ = ModelKind::kLasso;
  Eigen::VectorXd x_mean_, x_scale_;
  bool log_ = true;
  double y_mean_ = 0, y_scale_ = 1;  // of the (transformed) target
  double alpha_ = 0;
  Eigen::VectorXd lasso_w_;
  double lasso_b_ = 0;
  Mlp mlp_;
};

// Both throw ModelError on fewer than 20 samples, all-equal targets, or
// non-positive targets under the log transform.
AreaModel TrainLasso(const std::vector<Sample>& train, const LassoOptions& opts = {});
AreaModel TrainMlp(const std::vector<Sample>& train, const MlpOptions& opts = {});

// Picks the alpha with the lowest mean relative error under k-fold
// cross-validation.
double SelectLassoAlpha(const std::vector<Sample>& train, const std::vector<double>& grid,
                        int folds = 3);

// r^2 = 1 - SS_res / SS_tot.
double RSquared(const std::vector<double>& y, const std::vector<double>& f);
// Mean of |y - f| / |y| over samples with y != 0; throws ModelError when
// none remain.
double MeanRelativeError(const std::vector<double>& y, const std::vector<double>& f);

struct EvalReport {
  double r2_train = 0, r2_test = 0;
  double mre_train = 0, mre_test = 0;
};

EvalReport Evaluate(const AreaModel& model, const std::vector<Sample>& train,
                    const std::vector<Sample>& test);

}  // namespace mergedse::cost

#endif  // MERGEDSE_COST_MODEL_H_
