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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "divmf/interactions.hpp"
#include "divmf/mf_model.hpp"

namespace divmf {

// Row-wise softmax with the max-subtraction trick; rows sum to one.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores);

// Boolean keep-mask of a matrix's top entries per row. An entry survives when
// fewer than k entries in its row are strictly larger, so ties at the
// boundary are all kept and a row's kept count can exceed k.
struct TopMask {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> keep;
  std::vector<int> kept_per_row;
};
TopMask top_mask(const Eigen::MatrixXd& scores, int k);

enum class UnmaskScheme { kNone, kTopPlus, kRandom };

UnmaskScheme parse_unmask_scheme(const std::string& name);
std::string unmask_scheme_name(UnmaskScheme scheme);

// Widens a top-k mask so the regularizer can reach items just below the
// cutoff. kTopPlus keeps the top k + n entries per row; kRandom additionally
// unmasks n entries drawn uniformly from the masked remainder of each row
// (fewer when the remainder is smaller). exclude, when non-null, marks
// columns per row that random unmasking must not touch. kNone returns the
// mask unchanged.
TopMask unmask(const Eigen::MatrixXd& scores, const TopMask& base, int k,
               UnmaskScheme scheme, int n, std::mt19937_64& rng,
               const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>* exclude =
                   nullptr);

// Coverage term: -sum_i log(col_sum_i + 1e-12) over columns of the masked
// probability matrix. Pushes every item's total recommendation mass up.
double coverage_reg(const Eigen::MatrixXd& masked_soft);

// Skewness term: sum of p log p over rows of the masked matrix after
// renormalizing each row to sum to one. Zero entries contribute zero. Throws
// if a row has no mass at all.
double skewness_reg(const Eigen::MatrixXd& masked_soft);

// Value and gradient of coverage_reg + skewness_reg with respect to the raw
// score block. The mask is taken as given and not differentiated through;
// gradients flow through the row softmax (including its normalizer).
double div_loss_grad_scores(
    const Eigen::MatrixXd& scores,
    const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& keep,
    Eigen::MatrixXd& grad_scores);

// A sampled submatrix of the interaction space for one regularizer step.
struct MiniBatchSpec {
  std::vector<int> users;  // ascending
  std::vector<int> items;  // ascending
  int k_b = 0;             // per-batch list length
};

// Draws r_b users and c_b items without replacement (sorted ascending so the
// full-size batch degenerates to the identity selection) and scales the list
// length: k_b = max(1, round(c_b / n_items * k)) with half-to-even rounding.
MiniBatchSpec sample_minibatch(int n_users, int n_items, int r_b, int c_b,
                               int k, std::mt19937_64& rng);

// One full regularizer evaluation on a batch: scores the submatrix, builds
// the k_b mask (optionally widened by the unmask scheme), and back-propagates
// into embedding-shaped gradient matrices. Returns the loss for the batch.
double div_loss_and_grad(const MfModel& model, const MiniBatchSpec& batch,
                         UnmaskScheme scheme, int n_unmask,
                         std::mt19937_64& rng, Eigen::MatrixXd& grad_user,
                         Eigen::MatrixXd& grad_item);

}  // namespace divmf
