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
#include "divmf/divreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace divmf {

namespace {

// Guards the coverage log against fully masked columns.
constexpr double kLogEps = 1e-12;
// Floor inside log so underflowed probabilities stay finite; the softmax
// factor in the chain rule zeroes these entries' contributions anyway.
constexpr double kProbFloor = 1e-300;

std::vector<int> sample_distinct(int n, int take, std::mt19937_64& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < take; ++j) {
    std::uniform_int_distribution<int> pick(j, n - 1);
    std::swap(idx[j], idx[pick(rng)]);
  }
  idx.resize(take);
  return idx;
}

}  // namespace

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores) {
  if (!scores.allFinite())
    throw std::invalid_argument("softmax_rows: non-finite input");
  Eigen::MatrixXd out(scores.rows(), scores.cols());
  if (scores.cols() == 0) return out;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double mx = scores.row(r).maxCoeff();
    const Eigen::ArrayXd e = (scores.row(r).transpose().array() - mx).exp();
    out.row(r) = (e / e.sum()).matrix().transpose();
  }
  return out;
}

TopMask top_mask(const Eigen::MatrixXd& scores, int k) {
  if (k < 1) throw std::invalid_argument("top_mask: k must be >= 1");
  TopMask mask;
  mask.keep.resize(scores.rows(), scores.cols());
  mask.kept_per_row.assign(scores.rows(), 0);
  const int cols = static_cast<int>(scores.cols());
  if (cols == 0) return mask;
  const int kk = std::min(k, cols);
  std::vector<double> buf(cols);
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    for (int c = 0; c < cols; ++c) buf[c] = scores(r, c);
    std::nth_element(buf.begin(), buf.begin() + (kk - 1), buf.end(),
                     std::greater<>());
    // An entry survives iff fewer than k entries in its row are strictly
    // larger, which is the same as clearing the k-th largest value cutoff.
    const double cutoff = buf[kk - 1];
    int kept = 0;
    for (int c = 0; c < cols; ++c) {
      const bool keep = scores(r, c) >= cutoff;
      mask.keep(r, c) = keep;
      kept += keep;
    }
    mask.kept_per_row[r] = kept;
  }
  return mask;
}

UnmaskScheme parse_unmask_scheme(const std::string& name) {
  if (name == "none") return UnmaskScheme::kNone;
  if (name == "top_plus") return UnmaskScheme::kTopPlus;
  if (name == "random") return UnmaskScheme::kRandom;
  throw std::runtime_error("unknown unmask scheme '" + name +
                           "' (expected none, top_plus or random)");
}

std::string unmask_scheme_name(UnmaskScheme scheme) {
  switch (scheme) {
    case UnmaskScheme::kNone:
      return "none";
    case UnmaskScheme::kTopPlus:
      return "top_plus";
    case UnmaskScheme::kRandom:
      return "random";
  }
  throw std::logic_error("unreachable");
}

TopMask unmask(const Eigen::MatrixXd& scores, const TopMask& base, int k,
               UnmaskScheme scheme, int n, std::mt19937_64& rng,
               const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>*
                   exclude) {
  if (scheme == UnmaskScheme::kNone || n <= 0) return base;
  if (scheme == UnmaskScheme::kTopPlus) return top_mask(scores, k + n);

  TopMask out = base;
  std::vector<int> pool;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    pool.clear();
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      if (out.keep(r, c)) continue;
      if (exclude && (*exclude)(r, c)) continue;
      pool.push_back(static_cast<int>(c));
    }
    const int take = std::min<int>(n, static_cast<int>(pool.size()));
    for (int j = 0; j < take; ++j) {
      std::uniform_int_distribution<int> pick(j, static_cast<int>(pool.size()) -
                                                     1);
      std::swap(pool[j], pool[pick(rng)]);
      out.keep(r, pool[j]) = true;
      ++out.kept_per_row[r];
    }
  }
  return out;
}

double coverage_reg(const Eigen::MatrixXd& masked_soft) {
  double loss = 0.0;
  for (Eigen::Index c = 0; c < masked_soft.cols(); ++c)
    loss -= std::log(masked_soft.col(c).sum() + kLogEps);
  return loss;
}

double skewness_reg(const Eigen::MatrixXd& masked_soft) {
  double loss = 0.0;
  for (Eigen::Index r = 0; r < masked_soft.rows(); ++r) {
    const double row_sum = masked_soft.row(r).sum();
    if (!(row_sum > 0.0))
      throw std::domain_error("skewness_reg: row without unmasked mass");
    for (Eigen::Index c = 0; c < masked_soft.cols(); ++c) {
      const double p = masked_soft(r, c) / row_sum;
      if (p > 0.0) loss += p * std::log(p);
    }
  }
  return loss;
}

double div_loss_grad_scores(
    const Eigen::MatrixXd& scores,
    const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& keep,
    Eigen::MatrixXd& grad_scores) {
  const Eigen::Index rows = scores.rows(), cols = scores.cols();
  if (keep.rows() != rows || keep.cols() != cols)
    throw std::invalid_argument("div_loss_grad_scores: mask shape mismatch");

  const Eigen::MatrixXd soft = softmax_rows(scores);
  const Eigen::ArrayXXd masked = keep.select(soft.array(), 0.0);
  const Eigen::ArrayXd col_sum = masked.colwise().sum().transpose();
  const Eigen::ArrayXd row_sum = masked.rowwise().sum();

  double loss = -(col_sum + kLogEps).log().sum();

  // Partials with respect to the masked probabilities: the coverage pull on
  // each column plus the row-entropy term. Masked-out entries stay zero; the
  // selection itself is not differentiated.
  Eigen::ArrayXXd g_masked = Eigen::ArrayXXd::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!(row_sum(r) > 0.0))
      throw std::domain_error("div_loss_grad_scores: row without unmasked mass");
    double entropy_term = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!keep(r, c)) continue;
      const double p = masked(r, c) / row_sum(r);
      entropy_term += p * std::log(std::max(p, kProbFloor));
    }
    loss += entropy_term;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!keep(r, c)) continue;
      const double p = masked(r, c) / row_sum(r);
      g_masked(r, c) =
          -1.0 / (col_sum(c) + kLogEps) +
          (std::log(std::max(p, kProbFloor)) - entropy_term) / row_sum(r);
    }
  }

  // Chain through the row softmax, normalizer included.
  grad_scores.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::ArrayXd s = soft.row(r).transpose().array();
    const Eigen::ArrayXd g = g_masked.row(r).transpose();
    const double inner = (g * s).sum();
    grad_scores.row(r) = (s * (g - inner)).matrix().transpose();
  }
  return loss;
}

MiniBatchSpec sample_minibatch(int n_users, int n_items, int r_b, int c_b,
                               int k, std::mt19937_64& rng) {
  if (n_users <= 0 || n_items <= 0 || k < 1)
    throw std::invalid_argument("sample_minibatch: bad dimensions");
  if (r_b <= 0 || r_b > n_users) r_b = n_users;
  if (c_b <= 0 || c_b > n_items) c_b = n_items;

  MiniBatchSpec batch;
  batch.users = sample_distinct(n_users, r_b, rng);
  batch.items = sample_distinct(n_items, c_b, rng);
  // Ascending order makes the full-size batch the identity selection.
  std::sort(batch.users.begin(), batch.users.end());
  std::sort(batch.items.begin(), batch.items.end());

  // List length scales with the sampled column share; ties at .5 round to
  // the even neighbour, and the result never drops below 1.
  const double scaled = static_cast<double>(c_b) /
                        static_cast<double>(n_items) * static_cast<double>(k);
  const double whole = std::floor(scaled);
  const double frac = scaled - whole;
  long long rounded = static_cast<long long>(whole);
  if (frac > 0.5 || (frac == 0.5 && rounded % 2 != 0)) ++rounded;
  batch.k_b = static_cast<int>(std::max(1LL, rounded));
  return batch;
}

double div_loss_and_grad(const MfModel& model, const MiniBatchSpec& batch,
                         UnmaskScheme scheme, int n_unmask,
                         std::mt19937_64& rng, Eigen::MatrixXd& grad_user,
                         Eigen::MatrixXd& grad_item) {
  if (batch.users.empty() || batch.items.empty())
    throw std::invalid_argument("div_loss_and_grad: empty batch");
  if (grad_user.rows() != model.user_emb.rows() ||
      grad_user.cols() != model.user_emb.cols() ||
      grad_item.rows() != model.item_emb.rows() ||
      grad_item.cols() != model.item_emb.cols())
    throw std::invalid_argument(
        "div_loss_and_grad: gradient buffers must match embeddings");

  const Eigen::MatrixXd scores = score_submatrix(model, batch.users,
                                                 batch.items);
  const int k_b = std::min(batch.k_b, static_cast<int>(batch.items.size()));
  const TopMask base = top_mask(scores, k_b);
  const TopMask mask = unmask(scores, base, k_b, scheme, n_unmask, rng);

  Eigen::MatrixXd g_scores;
  const double loss = div_loss_grad_scores(scores, mask.keep, g_scores);
  if (!std::isfinite(loss))
    throw std::runtime_error("div_loss_and_grad: non-finite loss");

  const int nu = static_cast<int>(batch.users.size());
  const int ni = static_cast<int>(batch.items.size());
  Eigen::MatrixXd P(nu, model.dim()), Q(ni, model.dim());
  for (int a = 0; a < nu; ++a) P.row(a) = model.user_emb.row(batch.users[a]);
  for (int b = 0; b < ni; ++b) Q.row(b) = model.item_emb.row(batch.items[b]);

  const Eigen::MatrixXd g_user_block = g_scores * Q;
  const Eigen::MatrixXd g_item_block = g_scores.transpose() * P;
  for (int a = 0; a < nu; ++a)
    grad_user.row(batch.users[a]) += g_user_block.row(a);
  for (int b = 0; b < ni; ++b)
    grad_item.row(batch.items[b]) += g_item_block.row(b);
  return loss;
}

}  // namespace divmf
