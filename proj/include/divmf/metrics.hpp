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

#include <string>
#include <vector>

#include "divmf/interactions.hpp"
#include "divmf/mf_model.hpp"

namespace divmf {

// Per-user top-k recommendation lists, each sorted by descending score.
struct RecLists {
  int n_items = 0;
  int k = 0;
  std::vector<std::vector<int>> items;  // one list per user
};

// Top-k lists excluding each user's training items. Score ties break toward
// the lower item index so repeated runs agree exactly. Throws when some user
// has fewer than k candidate items left.
RecLists recommend_topk(const MfModel& model, const SplitSet& split, int k);

// How often each item appears across all lists.
std::vector<long long> item_frequency(const RecLists& recs);

// Mean truncated nDCG over users with a test item: a hit at 1-based rank r
// contributes 1/log2(r + 1), and the single-relevant-item ideal is 1.
// Users without a test item are skipped; returns 0 if nobody has one.
double ndcg_at_k(const RecLists& recs, const std::vector<int>& test_item);

// Fraction of the catalogue that appears in at least one list.
double coverage_at_k(const RecLists& recs);

// Shannon entropy (natural log) of the item frequency distribution.
double entropy_at_k(const RecLists& recs);

// Gini coefficient of the item frequency distribution over the whole
// catalogue; items never recommended count as zeros. 0 is perfectly even,
// values near 1 mean a few items dominate.
double gini_at_k(const RecLists& recs);

// Plain-text list file, one line per user: "u: i1 i2 ... ik". Reading back
// needs the catalogue size, which the lines do not carry.
void write_rec_lists(const RecLists& recs, const std::string& path);
RecLists read_rec_lists(const std::string& path, int n_items);

}  // namespace divmf
