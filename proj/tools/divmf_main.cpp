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
#include <cstdio>
#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "divmf/dataset_io.hpp"
#include "divmf/interactions.hpp"
#include "divmf/metrics.hpp"
#include "divmf/mf_model.hpp"
#include "divmf/trainer.hpp"

namespace {

struct PreprocessOpts {
  std::string input;
  std::string format = "csv";
  std::string delimiter;  // empty = take the preset's
  std::string output = "data";
  int core = 0;  // 0 skips k-core filtering
  std::uint64_t seed = 42;
  bool strict_small_users = false;
};

struct StatsOpts {
  std::string input;
  std::string dataset;
  std::string format = "csv";
  std::string delimiter;
};

struct TrainCliOpts {
  divmf::TrainConfig cfg;
  std::string scheme = "top_plus";
  bool no_div_weight_decay = false;
  bool dump_config = false;
  std::string split_path;
  std::string checkpoint = "model.ckpt";
  std::string curve_out = "curve.csv";
  std::string lists_out;
};

struct EvalOpts {
  std::string split_path;
  std::string checkpoint;
  int k = 5;
};

void add_train_flags(CLI::App* sub, TrainCliOpts& o, bool sweep_epochs) {
  sub->add_option("--seed", o.cfg.seed, "Master RNG seed")
      ->capture_default_str();
  sub->add_option("--k", o.cfg.k, "Recommendation list length")
      ->capture_default_str();
  if (sweep_epochs)
    sub->add_option("--n-ep-max", o.cfg.n_ep_max,
                    "Largest diversity epoch count on the curve")
        ->capture_default_str();
  else
    sub->add_option("--n-ep", o.cfg.n_ep_max, "Diversity epochs to run")
        ->capture_default_str();
  sub->add_option("--dim", o.cfg.d, "Embedding dimension")
      ->capture_default_str();
  sub->add_option("--lr", o.cfg.lr, "Adam learning rate")
      ->capture_default_str();
  sub->add_option("--weight-decay", o.cfg.weight_decay, "L2 strength")
      ->capture_default_str();
  sub->add_option("--unmask-scheme", o.scheme,
                  "Mask widening: none, top_plus or random")
      ->check(CLI::IsMember({"none", "top_plus", "random"}))
      ->capture_default_str();
  sub->add_option("--n-unmask", o.cfg.n_unmask,
                  "Items unmasked beyond the top k")
      ->capture_default_str();
  sub->add_option("--rb", o.cfg.r_b, "Users per regularizer batch (0 = all)")
      ->capture_default_str();
  sub->add_option("--cb", o.cfg.c_b, "Items per regularizer batch (0 = all)")
      ->capture_default_str();
  sub->add_option("--patience", o.cfg.accuracy_patience,
                  "Evaluations without val improvement before stopping")
      ->capture_default_str();
  sub->add_option("--max-epochs", o.cfg.max_accuracy_epochs,
                  "Hard cap on accuracy epochs")
      ->capture_default_str();
  sub->add_option("--bpr-batch", o.cfg.bpr_batch, "Triples per BPR step")
      ->capture_default_str();
  sub->add_option("--eval-every", o.cfg.eval_every,
                  "Validation cadence in epochs")
      ->capture_default_str();
  sub->add_flag("--alternating", o.cfg.alternating,
                "Interleave accuracy epochs into the second phase");
  sub->add_flag("--no-div-weight-decay", o.no_div_weight_decay,
                "Drop the L2 term during the second phase");
  sub->add_flag("--dump-config", o.dump_config,
                "Print the effective configuration and exit")
      ->configurable(false);
}

// Effective key=value configuration of one subcommand, loadable again via
// --config thanks to the section header.
void dump_config(const CLI::App* sub) {
  std::printf("[%s]\n%s", sub->get_name().c_str(),
              sub->config_to_str(true, false).c_str());
}

void finish_train_opts(TrainCliOpts& o) {
  o.cfg.scheme = divmf::parse_unmask_scheme(o.scheme);
  o.cfg.div_weight_decay = !o.no_div_weight_decay;
  divmf::validate_config(o.cfg);
}

divmf::FormatSpec make_format(const std::string& name,
                              const std::string& delimiter) {
  divmf::FormatSpec fmt = divmf::FormatSpec::named(name);
  if (!delimiter.empty()) fmt.delimiter = delimiter;
  return fmt;
}

void print_metrics(const divmf::TestMetrics& m) {
  std::printf("ndcg=%.6g\n", m.ndcg);
  std::printf("coverage=%.6g\n", m.coverage);
  std::printf("entropy=%.6g\n", m.entropy);
  std::printf("neg_gini=%.6g\n", -m.gini);
}

int cmd_preprocess(const PreprocessOpts& o) {
  divmf::InteractionLog log =
      divmf::parse_interactions(o.input, make_format(o.format, o.delimiter));
  log = divmf::to_implicit(std::move(log));
  if (o.core >= 1) log = divmf::kcore_filter(log, o.core);

  // Users that cannot give one train, one val and one test row each leave
  // the dataset before renumbering, so the dense user axis has no holes.
  std::unordered_map<std::string, int> degree;
  for (const auto& rec : log.records) ++degree[rec.user];
  long long small_users = 0;
  for (const auto& [user, deg] : degree) small_users += deg < 3;
  if (small_users > 0) {
    if (o.strict_small_users)
      throw std::runtime_error(std::to_string(small_users) +
                               " user(s) have fewer than 3 interactions");
    std::cerr << "note: dropping " << small_users
              << " user(s) with fewer than 3 interactions\n";
    divmf::InteractionLog kept;
    kept.has_timestamps = log.has_timestamps;
    for (auto& rec : log.records)
      if (degree[rec.user] >= 3) kept.records.push_back(std::move(rec));
    if (kept.records.empty())
      throw std::runtime_error("no users with 3 or more interactions");
    log = std::move(kept);
  }

  auto [dense, maps] = divmf::remap_ids(log);
  const divmf::SplitSet split = divmf::leave_one_out_split(dense, o.seed);
  const std::string dataset_path = o.output + ".dataset";
  const std::string split_path = o.output + ".split";
  divmf::write_dataset(dataset_path, dense);
  divmf::write_split(split_path, split);

  std::printf("seed=%llu\n", static_cast<unsigned long long>(o.seed));
  std::printf("core=%d\n", o.core);
  std::fputs(divmf::format_stats(divmf::dataset_stats(dense)).c_str(), stdout);
  std::printf("dataset=%s\n", dataset_path.c_str());
  std::printf("split=%s\n", split_path.c_str());
  return 0;
}

int cmd_stats(const StatsOpts& o) {
  divmf::DatasetStats stats;
  if (!o.dataset.empty()) {
    stats = divmf::dataset_stats(divmf::read_dataset(o.dataset));
  } else if (!o.input.empty()) {
    stats = divmf::dataset_stats(
        divmf::parse_interactions(o.input, make_format(o.format, o.delimiter)));
  } else {
    throw std::runtime_error("stats needs --input or --dataset");
  }
  std::fputs(divmf::format_stats(stats).c_str(), stdout);
  return 0;
}

int cmd_train(TrainCliOpts& o, CLI::App* sub) {
  if (o.dump_config) {
    dump_config(sub);
    return 0;
  }
  finish_train_opts(o);
  const divmf::SplitSet split = divmf::read_split(o.split_path);
  divmf::AccuracyPhaseReport acc;
  divmf::DiversityPhaseReport div;
  const divmf::MfModel model = divmf::train_divmf(split, o.cfg, &acc, &div);
  divmf::save_checkpoint(model, o.checkpoint);
  if (!o.lists_out.empty())
    divmf::write_rec_lists(divmf::recommend_topk(model, split, o.cfg.k),
                           o.lists_out);

  std::printf("seed=%llu\n", static_cast<unsigned long long>(o.cfg.seed));
  std::printf("k=%d\n", o.cfg.k);
  std::printf("n_ep=%d\n", div.epochs_run);
  std::printf("accuracy_epochs=%d\n", acc.epochs_run);
  std::printf("best_val_ndcg=%.6g\n", acc.best_val_ndcg);
  print_metrics(divmf::eval_test_metrics(model, split, o.cfg.k));
  std::printf("checkpoint=%s\n", o.checkpoint.c_str());
  return 0;
}

int cmd_sweep(TrainCliOpts& o, CLI::App* sub) {
  if (o.dump_config) {
    dump_config(sub);
    return 0;
  }
  finish_train_opts(o);
  const divmf::SplitSet split = divmf::read_split(o.split_path);
  const divmf::CurveTable curve = divmf::sweep_tradeoff(split, o.cfg);
  divmf::write_curve_csv(curve, o.curve_out);
  std::printf("seed=%llu\n", static_cast<unsigned long long>(o.cfg.seed));
  std::printf("k=%d\n", o.cfg.k);
  std::printf("rows=%zu\n", curve.points.size());
  std::printf("curve=%s\n", o.curve_out.c_str());
  return 0;
}

int cmd_eval(const EvalOpts& o) {
  const divmf::SplitSet split = divmf::read_split(o.split_path);
  const divmf::MfModel model = divmf::load_checkpoint(o.checkpoint);
  if (model.n_users() != split.n_users || model.n_items() != split.n_items)
    throw std::runtime_error(
        "checkpoint shape (" + std::to_string(model.n_users()) + " users, " +
        std::to_string(model.n_items()) + " items) does not match dataset (" +
        std::to_string(split.n_users) + " users, " +
        std::to_string(split.n_items) + " items)");
  std::printf("k=%d\n", o.k);
  print_metrics(divmf::eval_test_metrics(model, split, o.k));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-factorization recommender with an aggregate-diversity"
               " regularizer"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Config file (key=value under a [subcommand] section); "
                 "command-line flags win");

  PreprocessOpts pre_opts;
  CLI::App* pre = app.add_subcommand(
      "preprocess", "Parse, filter and split a raw interaction file");
  pre->fallthrough();
  pre->add_option("--input", pre_opts.input, "Raw interaction file")
      ->required()
      ->check(CLI::ExistingFile);
  pre->add_option("--format", pre_opts.format, "csv, tsv or movielens")
      ->check(CLI::IsMember({"csv", "tsv", "movielens"}))
      ->capture_default_str();
  pre->add_option("--delimiter", pre_opts.delimiter,
                  "Field delimiter override");
  pre->add_option("--output", pre_opts.output,
                  "Prefix for the .dataset and .split files")
      ->capture_default_str();
  pre->add_option("--core", pre_opts.core,
                  "k-core threshold (0 = no filtering)")
      ->capture_default_str();
  pre->add_option("--seed", pre_opts.seed, "Split seed")
      ->capture_default_str();
  pre->add_flag("--strict-small-users", pre_opts.strict_small_users,
                "Fail instead of dropping users with < 3 interactions");

  StatsOpts stats_opts;
  CLI::App* stats = app.add_subcommand(
      "stats", "Report size, density and popularity concentration");
  stats->fallthrough();
  stats->add_option("--input", stats_opts.input, "Raw interaction file")
      ->check(CLI::ExistingFile);
  stats->add_option("--dataset", stats_opts.dataset,
                    "Canonical dataset file from preprocess")
      ->check(CLI::ExistingFile);
  stats->add_option("--format", stats_opts.format, "csv, tsv or movielens")
      ->check(CLI::IsMember({"csv", "tsv", "movielens"}))
      ->capture_default_str();
  stats->add_option("--delimiter", stats_opts.delimiter,
                    "Field delimiter override");

  TrainCliOpts train_opts;
  CLI::App* train =
      app.add_subcommand("train", "Two-phase training to a checkpoint");
  train->fallthrough();
  train->add_option("--split", train_opts.split_path,
                    "Split file from preprocess")
      ->required();
  train->add_option("--checkpoint", train_opts.checkpoint,
                    "Checkpoint output path")
      ->capture_default_str();
  train->add_option("--lists", train_opts.lists_out,
                    "Also write the final recommendation lists here");
  add_train_flags(train, train_opts, false);

  TrainCliOpts sweep_opts;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Accuracy-diversity trade-off curve over diversity epochs");
  sweep->fallthrough();
  sweep->add_option("--split", sweep_opts.split_path,
                    "Split file from preprocess")
      ->required();
  sweep->add_option("--out", sweep_opts.curve_out, "Curve CSV output path")
      ->capture_default_str();
  add_train_flags(sweep, sweep_opts, true);

  EvalOpts eval_opts;
  CLI::App* eval =
      app.add_subcommand("eval", "Metrics of a checkpoint on a split");
  eval->fallthrough();
  eval->add_option("--split", eval_opts.split_path,
                   "Split file from preprocess")
      ->required();
  eval->add_option("--checkpoint", eval_opts.checkpoint, "Checkpoint to score")
      ->required();
  eval->add_option("--k", eval_opts.k, "Recommendation list length")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (pre->parsed()) return cmd_preprocess(pre_opts);
    if (stats->parsed()) return cmd_stats(stats_opts);
    if (train->parsed()) return cmd_train(train_opts, train);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep);
    if (eval->parsed()) return cmd_eval(eval_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
