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

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "divmf/interactions.hpp"

namespace divmf::testsupport {

// Fresh scratch directory under the system temp root, unique per call.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  auto ticks = std::chrono::steady_clock::now().time_since_epoch().count();
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("divmf_" + tag + "_" + std::to_string(ticks) + "_" +
       std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// In-memory split with `per_user` random train items per user plus one
// validation and one test item each, all distinct. Needs per_user + 2 items.
inline SplitSet make_random_split(int n_users, int n_items, int per_user,
                                  std::uint64_t seed) {
  if (per_user + 2 > n_items) throw std::runtime_error("catalog too small");
  SplitSet split;
  split.n_users = n_users;
  split.n_items = n_items;
  split.train.n_users = n_users;
  split.train.n_items = n_items;
  split.train.has_timestamps = false;
  split.train_by_user.resize(n_users);
  split.val_item.assign(n_users, -1);
  split.test_item.assign(n_users, -1);
  split.val_ts.assign(n_users, 0);
  split.test_ts.assign(n_users, 0);
  std::mt19937_64 rng(seed);
  std::vector<int> pool(n_items);
  for (int u = 0; u < n_users; ++u) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int j = 0; j < per_user + 2; ++j) {
      std::uniform_int_distribution<int> pick(j, n_items - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    std::vector<int> own(pool.begin(), pool.begin() + per_user);
    std::sort(own.begin(), own.end());
    for (int item : own) {
      split.train.records.push_back(DenseRecord{u, item, 1.0, 0});
    }
    split.train_by_user[u] = std::move(own);
    split.val_item[u] = pool[per_user];
    split.test_item[u] = pool[per_user + 1];
  }
  return split;
}

// Group-structured interaction generator: users in group g mostly pick items
// from group g's contiguous block, with within-group popularity following a
// power law. Produces learnable structure plus the popularity skew that keeps
// plain MF recommendations concentrated on few items.
struct PlantedConfig {
  int n_users = 200;
  int n_items = 120;
  int n_groups = 6;
  int min_per_user = 10;
  int max_per_user = 20;
  double zipf_s = 0.8;    // within-group popularity exponent
  double noise = 0.05;    // chance of an out-of-group pick
  std::uint64_t seed = 7;
};

inline DenseLog planted_dense_log(const PlantedConfig& cfg) {
  DenseLog log;
  log.n_users = cfg.n_users;
  log.n_items = cfg.n_items;
  log.has_timestamps = true;
  std::mt19937_64 rng(cfg.seed);
  int block = cfg.n_items / cfg.n_groups;
  std::vector<double> weight(block);
  for (int r = 0; r < block; ++r) {
    weight[r] = 1.0 / std::pow(static_cast<double>(r + 1), cfg.zipf_s);
  }
  std::discrete_distribution<int> in_group(weight.begin(), weight.end());
  std::uniform_int_distribution<int> any_item(0, cfg.n_items - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> count_dist(cfg.min_per_user,
                                                cfg.max_per_user);
  for (int u = 0; u < cfg.n_users; ++u) {
    int group = u % cfg.n_groups;
    int want = count_dist(rng);
    std::vector<char> taken(cfg.n_items, 0);
    int made = 0;
    long long t = 1000;
    int guard = 0;
    while (made < want && guard < 100 * want + 1000) {
      ++guard;
      int item;
      if (coin(rng) < cfg.noise) {
        item = any_item(rng);
      } else {
        item = group * block + in_group(rng);
      }
      if (taken[item]) continue;
      taken[item] = 1;
      log.records.push_back(DenseRecord{u, item, 1.0, t++});
      ++made;
    }
  }
  return log;
}

// Same structure as raw CSV text with string tokens, for pipeline tests.
inline std::string planted_csv_text(const PlantedConfig& cfg) {
  DenseLog log = planted_dense_log(cfg);
  std::ostringstream out;
  for (const DenseRecord& rec : log.records) {
    out << "u" << rec.user << ",i" << rec.item << "," << (1 + rec.item % 5)
        << "," << rec.timestamp << "\n";
  }
  return out.str();
}

}  // namespace divmf::testsupport
