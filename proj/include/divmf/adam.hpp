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
#pragma once

#include <Eigen/Core>

namespace divmf {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // L2 penalty folded into the gradient before the moment updates.
  double weight_decay = 0.0;
};

// First and second moment buffers for one parameter matrix.
class AdamState {
 public:
  AdamState(int rows, int cols, const AdamConfig& cfg);

  // Applies one bias-corrected update in place. grad must match param's shape.
  void step(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad);

  long long steps_taken() const { return t_; }

 private:
  AdamConfig cfg_;
  Eigen::MatrixXd m_;
  Eigen::MatrixXd v_;
  long long t_ = 0;
};

}  // namespace divmf
