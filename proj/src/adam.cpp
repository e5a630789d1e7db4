// Copyright 2026 The DivMF Authors
//
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
#include "divmf/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace divmf {

AdamState::AdamState(int rows, int cols, const AdamConfig& cfg)
    : cfg_(cfg),
      m_(Eigen::MatrixXd::Zero(rows, cols)),
      v_(Eigen::MatrixXd::Zero(rows, cols)) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("adam: state shape must be positive");
  if (cfg.lr <= 0.0 || cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 ||
      cfg.beta2 < 0.0 || cfg.beta2 >= 1.0 || cfg.eps <= 0.0)
    throw std::invalid_argument("adam: hyperparameters out of range");
}

void AdamState::step(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad) {
  if (param.rows() != m_.rows() || param.cols() != m_.cols() ||
      grad.rows() != m_.rows() || grad.cols() != m_.cols())
    throw std::invalid_argument("adam: parameter/gradient shape mismatch");
  ++t_;
  Eigen::MatrixXd g = grad;
  if (cfg_.weight_decay != 0.0) g += cfg_.weight_decay * param;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * g;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  param.array() -=
      cfg_.lr * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + cfg_.eps);
}

}  // namespace divmf
