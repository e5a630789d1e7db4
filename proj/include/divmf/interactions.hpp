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
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace divmf {

// One raw interaction record. Tokens are opaque strings until remapping.
struct Interaction {
  std::string user;
  std::string item;
  double rating = 1.0;
  long long timestamp = 0;
};

// Sparse interaction set. `has_timestamps` is true iff every record carried
// a timestamp in the source file.
struct InteractionLog {
  std::vector<Interaction> records;
  bool has_timestamps = false;
};

// Column layout of a raw interaction file. A line must provide at least the
// user and item columns; rating and timestamp columns are used when the line
// has enough fields and the index is >= 0.
struct FormatSpec {
  std::string delimiter = ",";
  int user_col = 0;
  int item_col = 1;
  int rating_col = 2;
  int time_col = 3;

  // Presets: "csv" (u,i[,r[,t]]), "tsv" (tab), "movielens" (u::i::r::t).
  static FormatSpec named(const std::string& name);
};

// Interaction record after dense renumbering.
struct DenseRecord {
  int user = 0;
  int item = 0;
  double rating = 1.0;
  long long timestamp = 0;
};

struct DenseLog {
  int n_users = 0;
  int n_items = 0;
  std::vector<DenseRecord> records;
  bool has_timestamps = false;
};

// Bijection between raw tokens and dense indices, in first-appearance order.
struct IdMaps {
  std::vector<std::string> user_token;  // index -> token
  std::vector<std::string> item_token;
  std::unordered_map<std::string, int> user_index;  // token -> index
  std::unordered_map<std::string, int> item_index;
};

// Leave-one-out split. `val_item[u]` / `test_item[u]` are -1 for users that
// were dropped because they had fewer than three interactions.
struct SplitSet {
  int n_users = 0;
  int n_items = 0;
  DenseLog train;
  std::vector<std::vector<int>> train_by_user;  // sorted item lists
  std::vector<int> val_item;
  std::vector<int> test_item;
  std::vector<long long> val_ts;  // timestamps of the held-out records, 0 when untimed
  std::vector<long long> test_ts;
  std::vector<int> dropped_users;
};

struct DatasetStats {
  long long n_users = 0;
  long long n_items = 0;
  long long n_interactions = 0;
  double density_pct = 0.0;        // interactions / (users * items) * 100
  double top_decile_share = 0.0;   // share of interactions held by the top 10% of items
};

// Reads a delimited interaction file. Duplicate (user, item) pairs collapse to
// the record with the earliest timestamp (first occurrence when untimed).
// Throws std::runtime_error on unreadable files, malformed lines (with the
// line number) and empty results.
InteractionLog parse_interactions(const std::string& path, const FormatSpec& fmt);

// Binarizes ratings to 1.0, keeping the record count.
InteractionLog to_implicit(InteractionLog log);

// Iteratively peels users and items of degree < core until the remaining
// bipartite graph is a fixed point. Throws if nothing survives.
InteractionLog kcore_filter(const InteractionLog& log, int core);

// Renumbers users and items densely in first-appearance order.
std::pair<DenseLog, IdMaps> remap_ids(const InteractionLog& log);

// Holds out one test and one validation interaction per user: the latest and
// second-latest when timestamps exist, otherwise two seeded uniform draws.
// Users with fewer than three interactions are dropped with a note when
// `drop_small_users` is set, and rejected otherwise.
SplitSet leave_one_out_split(const DenseLog& log, std::uint64_t seed,
                             bool drop_small_users = true);

DatasetStats dataset_stats(const InteractionLog& log);
DatasetStats dataset_stats(const DenseLog& log);

std::string format_stats(const DatasetStats& stats);

}  // namespace divmf
