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
#include "divmf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

#include "divmf/adam.hpp"
#include "divmf/bpr.hpp"

namespace divmf {

namespace {

// Each phase draws from its own stream so inserting or removing one phase
// never perturbs another's randomness.
enum SeedSalt : std::uint64_t {
  kSaltInit = 0,
  kSaltBpr = 1,
  kSaltDiversity = 2,
  kSaltAlternate = 3,
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Optim {
  AdamState user;
  AdamState item;
};

Optim make_optim(const MfModel& model, const TrainConfig& cfg,
                 double weight_decay) {
  AdamConfig acfg;
  acfg.lr = cfg.lr;
  acfg.beta1 = cfg.beta1;
  acfg.beta2 = cfg.beta2;
  acfg.eps = cfg.adam_eps;
  acfg.weight_decay = weight_decay;
  return Optim{AdamState(model.n_users(), model.dim(), acfg),
               AdamState(model.n_items(), model.dim(), acfg)};
}

double run_bpr_epoch(MfModel& model, const SplitSet& split,
                     const TrainConfig& cfg, Optim& opt,
                     std::mt19937_64& rng) {
  const long long n_train =
      static_cast<long long>(split.train.records.size());
  const long long batches = (n_train + cfg.bpr_batch - 1) / cfg.bpr_batch;
  Eigen::MatrixXd grad_user(model.n_users(), model.dim());
  Eigen::MatrixXd grad_item(model.n_items(), model.dim());
  double loss_sum = 0.0;
  long long n_triples = 0;
  for (long long b = 0; b < batches; ++b) {
    const std::vector<BprTriple> triples =
        sample_bpr_triples(split, cfg.bpr_batch, rng);
    if (triples.empty()) break;
    grad_user.setZero();
    grad_item.setZero();
    loss_sum += bpr_loss_and_grad(model, triples, grad_user, grad_item);
    n_triples += static_cast<long long>(triples.size());
    opt.user.step(model.user_emb, grad_user);
    opt.item.step(model.item_emb, grad_item);
  }
  return n_triples > 0 ? loss_sum / static_cast<double>(n_triples) : 0.0;
}

double run_div_epoch(MfModel& model, const TrainConfig& cfg, Optim& opt,
                     std::mt19937_64& rng) {
  const int n_users = model.n_users();
  const int n_items = model.n_items();
  const int r_b = (cfg.r_b <= 0 || cfg.r_b > n_users) ? n_users : cfg.r_b;
  const int c_b = (cfg.c_b <= 0 || cfg.c_b > n_items) ? n_items : cfg.c_b;
  const int batches = (n_users + r_b - 1) / r_b;
  Eigen::MatrixXd grad_user(n_users, model.dim());
  Eigen::MatrixXd grad_item(n_items, model.dim());
  double loss_sum = 0.0;
  for (int b = 0; b < batches; ++b) {
    const MiniBatchSpec batch =
        sample_minibatch(n_users, n_items, r_b, c_b, cfg.k, rng);
    grad_user.setZero();
    grad_item.setZero();
    loss_sum += div_loss_and_grad(model, batch, cfg.scheme, cfg.n_unmask, rng,
                                  grad_user, grad_item);
    opt.user.step(model.user_emb, grad_user);
    opt.item.step(model.item_emb, grad_item);
  }
  return loss_sum / static_cast<double>(batches);
}

// Second phase driver. The plain variant runs the regularizer alone; the
// alternating variant interleaves one accuracy epoch per round, each
// objective on its own optimizer so no step ever mixes their gradients.
void run_phase2(MfModel& model, const SplitSet* split, const TrainConfig& cfg,
                int n_ep, const EpochSink& sink,
                DiversityPhaseReport* report) {
  DiversityPhaseReport rep;
  if (n_ep > 0) {
    Optim div_opt = make_optim(
        model, cfg, cfg.div_weight_decay ? cfg.weight_decay : 0.0);
    std::mt19937_64 div_rng(derive_seed(cfg.seed, kSaltDiversity));
    std::optional<Optim> acc_opt;
    std::optional<std::mt19937_64> acc_rng;
    if (cfg.alternating) {
      if (!split)
        throw std::invalid_argument(
            "alternating second phase needs the training split");
      acc_opt.emplace(make_optim(model, cfg, cfg.weight_decay));
      acc_rng.emplace(derive_seed(cfg.seed, kSaltAlternate));
    }
    for (int epoch = 1; epoch <= n_ep; ++epoch) {
      if (cfg.alternating)
        run_bpr_epoch(model, *split, cfg, *acc_opt, *acc_rng);
      const double mean_loss = run_div_epoch(model, cfg, div_opt, div_rng);
      if (!std::isfinite(mean_loss))
        throw std::runtime_error(
            "diversity phase diverged: non-finite loss at epoch " +
            std::to_string(epoch));
      rep.div_loss_history.push_back(mean_loss);
      rep.epochs_run = epoch;
      if (sink) sink(epoch, model);
    }
  }
  if (report) *report = std::move(rep);
}

}  // namespace

void validate_config(const TrainConfig& cfg) {
  if (cfg.d < 1 || cfg.k < 1 || cfg.n_unmask < 0 || cfg.n_ep_max < 0 ||
      cfg.accuracy_patience < 1 || cfg.max_accuracy_epochs < 1 ||
      cfg.bpr_batch < 1 || cfg.eval_every < 1 || cfg.r_b < 0 || cfg.c_b < 0)
    throw std::invalid_argument("train config: count out of range");
  if (!(cfg.lr > 0.0) || cfg.weight_decay < 0.0 ||
      !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
      !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) || !(cfg.adam_eps > 0.0))
    throw std::invalid_argument("train config: rate out of range");
}

TestMetrics eval_test_metrics(const MfModel& model, const SplitSet& split,
                              int k) {
  const RecLists recs = recommend_topk(model, split, k);
  TestMetrics metrics;
  metrics.ndcg = ndcg_at_k(recs, split.test_item);
  metrics.coverage = coverage_at_k(recs);
  metrics.entropy = entropy_at_k(recs);
  metrics.gini = gini_at_k(recs);
  return metrics;
}

double eval_val_ndcg(const MfModel& model, const SplitSet& split, int k) {
  return ndcg_at_k(recommend_topk(model, split, k), split.val_item);
}

MfModel train_accuracy_phase(MfModel model, const SplitSet& split,
                             const TrainConfig& cfg,
                             AccuracyPhaseReport* report) {
  validate_config(cfg);
  if (model.n_users() != split.n_users || model.n_items() != split.n_items)
    throw std::invalid_argument(
        "train_accuracy_phase: model/split shape mismatch");
  if (split.train.records.empty())
    throw std::invalid_argument("train_accuracy_phase: empty training set");

  Optim opt = make_optim(model, cfg, cfg.weight_decay);
  std::mt19937_64 rng(derive_seed(cfg.seed, kSaltBpr));
  AccuracyPhaseReport rep;
  MfModel best = model;
  double best_val = -1.0;
  int best_epoch = 0;
  int stale = 0;
  for (int epoch = 1; epoch <= cfg.max_accuracy_epochs; ++epoch) {
    const double mean_loss = run_bpr_epoch(model, split, cfg, opt, rng);
    if (!std::isfinite(mean_loss))
      throw std::runtime_error(
          "accuracy phase diverged: non-finite loss at epoch " +
          std::to_string(epoch));
    rep.loss_history.push_back(mean_loss);
    rep.epochs_run = epoch;
    if (epoch % cfg.eval_every != 0) continue;
    const double val = eval_val_ndcg(model, split, cfg.k);
    rep.val_ndcg_history.push_back(val);
    if (val > best_val) {
      best_val = val;
      best = model;
      best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.accuracy_patience) {
      break;
    }
  }
  rep.best_epoch = best_epoch;
  rep.best_val_ndcg = std::max(best_val, 0.0);
  if (report) *report = std::move(rep);
  return best_epoch > 0 ? best : model;
}

void train_diversity_phase(MfModel& model, const TrainConfig& cfg, int n_ep,
                           const EpochSink& on_epoch,
                           DiversityPhaseReport* report) {
  validate_config(cfg);
  if (n_ep < 0)
    throw std::invalid_argument("train_diversity_phase: n_ep must be >= 0");
  TrainConfig pure = cfg;
  pure.alternating = false;  // this entry point is the regularizer-only phase
  run_phase2(model, nullptr, pure, n_ep, on_epoch, report);
}

MfModel train_divmf(const SplitSet& split, const TrainConfig& cfg,
                    AccuracyPhaseReport* acc_report,
                    DiversityPhaseReport* div_report) {
  validate_config(cfg);
  MfModel model = init_model(split.n_users, split.n_items, cfg.d,
                             derive_seed(cfg.seed, kSaltInit));
  model = train_accuracy_phase(std::move(model), split, cfg, acc_report);
  run_phase2(model, &split, cfg, cfg.n_ep_max, nullptr, div_report);
  return model;
}

CurveTable sweep_tradeoff(const SplitSet& split, const TrainConfig& cfg) {
  validate_config(cfg);
  CurveTable curve;
  MfModel model = init_model(split.n_users, split.n_items, cfg.d,
                             derive_seed(cfg.seed, kSaltInit));
  model = train_accuracy_phase(std::move(model), split, cfg, nullptr);
  const auto add_point = [&curve, &split, k = cfg.k](int n_ep,
                                                     const MfModel& m) {
    const TestMetrics tm = eval_test_metrics(m, split, k);
    curve.points.push_back({n_ep, tm.ndcg, tm.coverage, tm.entropy, -tm.gini});
  };
  add_point(0, model);
  run_phase2(model, &split, cfg, cfg.n_ep_max, add_point, nullptr);
  return curve;
}

void write_curve_csv(const CurveTable& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "n_ep,ndcg,coverage,entropy,neg_gini\n";
  char buf[160];
  for (const CurvePoint& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%.6g,%.6g,%.6g\n", p.n_ep, p.ndcg,
                  p.coverage, p.entropy, p.neg_gini);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace divmf
