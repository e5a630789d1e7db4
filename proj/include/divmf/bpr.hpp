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

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "divmf/interactions.hpp"
#include "divmf/mf_model.hpp"

namespace divmf {

struct BprTriple {
  int user;
  int pos_item;
  int neg_item;
};

// Draws `count` triples: a training record uniformly at random, then one
// negative item uniformly among items the user has not interacted with.
// Users whose training set covers every item cannot produce a negative and
// are redrawn; if no user can, returns an empty vector.
std::vector<BprTriple> sample_bpr_triples(const SplitSet& split, int count,
                                          std::mt19937_64& rng);

// Pairwise ranking loss over the triples,
//   sum over triples of -log sigmoid(score(u, i) - score(u, j)),
// with gradients accumulated into caller-provided matrices shaped like the
// embeddings. Returns the summed loss.
double bpr_loss_and_grad(const MfModel& model,
                         const std::vector<BprTriple>& triples,
                         Eigen::MatrixXd& grad_user, Eigen::MatrixXd& grad_item);

// Loss only, for tests and monitoring.
double bpr_loss(const MfModel& model, const std::vector<BprTriple>& triples);

}  // namespace divmf
