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
#include "divmf/bpr.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace divmf {

std::vector<BprTriple> sample_bpr_triples(const SplitSet& split, int count,
                                          std::mt19937_64& rng) {
  std::vector<BprTriple> out;
  if (count <= 0 || split.train.records.empty() || split.n_items <= 0)
    return out;
  out.reserve(count);
  std::uniform_int_distribution<std::size_t> rec_dist(
      0, split.train.records.size() - 1);
  std::uniform_int_distribution<int> item_dist(0, split.n_items - 1);
  bool warned = false;
  long long attempts = 0;
  const long long budget = 100LL * count + 1000;
  while (static_cast<int>(out.size()) < count && attempts < budget) {
    ++attempts;
    const DenseRecord& rec = split.train.records[rec_dist(rng)];
    const std::vector<int>& owned = split.train_by_user[rec.user];
    if (static_cast<int>(owned.size()) >= split.n_items) {
      // No item is left to rank below this user's positives.
      if (!warned) {
        std::cerr << "note: user " << rec.user
                  << " interacts with every item; skipped in negative"
                     " sampling\n";
        warned = true;
      }
      continue;
    }
    int neg;
    do {
      neg = item_dist(rng);
    } while (std::binary_search(owned.begin(), owned.end(), neg));
    out.push_back({rec.user, rec.item, neg});
  }
  return out;
}

namespace {

// -log sigmoid(x), stable in both tails.
double softplus_neg(double x) {
  return x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

}  // namespace

double bpr_loss_and_grad(const MfModel& model,
                         const std::vector<BprTriple>& triples,
                         Eigen::MatrixXd& grad_user,
                         Eigen::MatrixXd& grad_item) {
  if (grad_user.rows() != model.user_emb.rows() ||
      grad_user.cols() != model.user_emb.cols() ||
      grad_item.rows() != model.item_emb.rows() ||
      grad_item.cols() != model.item_emb.cols())
    throw std::invalid_argument("bpr: gradient buffers must match embeddings");
  double loss = 0.0;
  for (const BprTriple& t : triples) {
    const auto pu = model.user_emb.row(t.user);
    const auto qi = model.item_emb.row(t.pos_item);
    const auto qj = model.item_emb.row(t.neg_item);
    const double x = pu.dot(qi - qj);
    loss += softplus_neg(x);
    const double g = 1.0 / (1.0 + std::exp(x));  // sigmoid(-x)
    grad_user.row(t.user) -= g * (qi - qj);
    grad_item.row(t.pos_item) -= g * pu;
    grad_item.row(t.neg_item) += g * pu;
  }
  if (!std::isfinite(loss))
    throw std::runtime_error("bpr: non-finite loss, scores diverged");
  return loss;
}

double bpr_loss(const MfModel& model, const std::vector<BprTriple>& triples) {
  double loss = 0.0;
  for (const BprTriple& t : triples)
    loss += softplus_neg(model.user_emb.row(t.user).dot(
        model.item_emb.row(t.pos_item) - model.item_emb.row(t.neg_item)));
  if (!std::isfinite(loss))
    throw std::runtime_error("bpr: non-finite loss, scores diverged");
  return loss;
}

}  // namespace divmf
