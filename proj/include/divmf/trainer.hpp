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
#include <functional>
#include <string>
#include <vector>

#include "divmf/divreg.hpp"
#include "divmf/interactions.hpp"
#include "divmf/metrics.hpp"
#include "divmf/mf_model.hpp"

namespace divmf {

struct TrainConfig {
  int d = 32;
  double lr = 0.001;
  double weight_decay = 0.0001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  int k = 5;
  UnmaskScheme scheme = UnmaskScheme::kTopPlus;
  int n_unmask = 100;
  int r_b = 0;  // users per regularizer batch; 0 means all
  int c_b = 0;  // items per regularizer batch; 0 means all

  int n_ep_max = 10;  // regularizer epochs after the accuracy phase
  int accuracy_patience = 5;  // evaluations without val improvement before stopping
  int max_accuracy_epochs = 200;
  int bpr_batch = 1024;
  int eval_every = 1;  // validation cadence during the accuracy phase

  // Interleave one accuracy epoch with each regularizer epoch in the second
  // phase instead of running the regularizer alone.
  bool alternating = false;
  // Keep the L2 term active during the regularizer phase.
  bool div_weight_decay = true;

  std::uint64_t seed = 42;
};

// Throws std::invalid_argument when a count or rate is out of range.
void validate_config(const TrainConfig& cfg);

struct AccuracyPhaseReport {
  int epochs_run = 0;
  int best_epoch = 0;
  double best_val_ndcg = 0.0;
  std::vector<double> val_ndcg_history;  // one entry per evaluation
  std::vector<double> loss_history;      // mean BPR loss per epoch
};

struct DiversityPhaseReport {
  int epochs_run = 0;
  std::vector<double> div_loss_history;  // mean batch loss per epoch
};

struct TestMetrics {
  double ndcg = 0.0;
  double coverage = 0.0;
  double entropy = 0.0;
  double gini = 0.0;
};

TestMetrics eval_test_metrics(const MfModel& model, const SplitSet& split,
                              int k);
double eval_val_ndcg(const MfModel& model, const SplitSet& split, int k);

// Phase one: BPR epochs with Adam, starting from the given model, until
// validation nDCG fails to improve for cfg.accuracy_patience consecutive
// evaluations (or the epoch cap). Returns the model restored to its
// best-validation state. Throws if the loss diverges. Reusing the same
// starting model, config and seed reproduces the trajectory exactly.
MfModel train_accuracy_phase(MfModel model, const SplitSet& split,
                             const TrainConfig& cfg,
                             AccuracyPhaseReport* report = nullptr);

using EpochSink = std::function<void(int epoch, const MfModel& model)>;

// Phase two: n_ep epochs of the diversity regularizer on an already-trained
// model, ceil(n_users / r_b) batches per epoch, with a fresh optimizer.
// Never touches the accuracy loss. on_epoch, when set, observes the model
// after every epoch.
void train_diversity_phase(MfModel& model, const TrainConfig& cfg, int n_ep,
                           const EpochSink& on_epoch = nullptr,
                           DiversityPhaseReport* report = nullptr);

// Both phases back to back from a fresh model; cfg.alternating selects the
// variant whose second phase interleaves accuracy and regularizer epochs.
MfModel train_divmf(const SplitSet& split, const TrainConfig& cfg,
                    AccuracyPhaseReport* acc_report = nullptr,
                    DiversityPhaseReport* div_report = nullptr);

struct CurvePoint {
  int n_ep = 0;
  double ndcg = 0.0;
  double coverage = 0.0;
  double entropy = 0.0;
  double neg_gini = 0.0;
};

struct CurveTable {
  std::vector<CurvePoint> points;
};

// Accuracy-diversity trade-off: one accuracy phase, then test metrics after
// each second-phase epoch up to cfg.n_ep_max. Row 0 is the plain MF model.
CurveTable sweep_tradeoff(const SplitSet& split, const TrainConfig& cfg);

// CSV with header n_ep,ndcg,coverage,entropy,neg_gini and %.6g values.
void write_curve_csv(const CurveTable& curve, const std::string& path);

}  // namespace divmf
