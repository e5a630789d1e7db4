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
#include "divmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace divmf {

RecLists recommend_topk(const MfModel& model, const SplitSet& split, int k) {
  if (k < 1) throw std::invalid_argument("recommend_topk: k must be >= 1");
  const int n_users = model.n_users();
  const int n_items = model.n_items();
  if (split.n_users != n_users || split.n_items != n_items)
    throw std::invalid_argument("recommend_topk: model/split shape mismatch");

  std::vector<char> dropped(n_users, 0);
  for (int u : split.dropped_users)
    if (u >= 0 && u < n_users) dropped[u] = 1;

  RecLists recs;
  recs.n_items = n_items;
  recs.k = k;
  recs.items.resize(n_users);
  std::vector<int> cand;
  for (int u = 0; u < n_users; ++u) {
    if (dropped[u]) continue;  // removed from the dataset, keep list empty
    const std::vector<int>& owned = split.train_by_user[u];
    if (n_items - static_cast<int>(owned.size()) < k)
      throw std::runtime_error(
          "recommend_topk: user " + std::to_string(u) + " has only " +
          std::to_string(n_items - static_cast<int>(owned.size())) +
          " candidate item(s) for k=" + std::to_string(k));
    const Eigen::VectorXd scores =
        model.item_emb * model.user_emb.row(u).transpose();
    cand.clear();
    std::size_t next_owned = 0;
    for (int i = 0; i < n_items; ++i) {
      if (next_owned < owned.size() && owned[next_owned] == i) {
        ++next_owned;
        continue;
      }
      cand.push_back(i);
    }
    // Ties break toward the lower item index so runs are repeatable.
    const auto better = [&scores](int a, int b) {
      if (scores(a) != scores(b)) return scores(a) > scores(b);
      return a < b;
    };
    std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end(), better);
    std::sort(cand.begin(), cand.begin() + k, better);
    cand.resize(k);
    recs.items[u] = cand;
  }
  return recs;
}

std::vector<long long> item_frequency(const RecLists& recs) {
  std::vector<long long> freq(recs.n_items, 0);
  for (const auto& list : recs.items)
    for (int item : list) {
      if (item < 0 || item >= recs.n_items)
        throw std::out_of_range("item_frequency: item index out of range");
      ++freq[item];
    }
  return freq;
}

double ndcg_at_k(const RecLists& recs, const std::vector<int>& test_item) {
  if (test_item.size() != recs.items.size())
    throw std::invalid_argument("ndcg_at_k: one test slot per user required");
  double total = 0.0;
  long long evaluated = 0;
  for (std::size_t u = 0; u < recs.items.size(); ++u) {
    const int target = test_item[u];
    if (target < 0) continue;
    ++evaluated;
    const auto& list = recs.items[u];
    for (std::size_t rank = 0; rank < list.size(); ++rank) {
      if (list[rank] == target) {
        // 1-based rank r contributes 1/log2(r + 1); the ideal list puts the
        // single relevant item first for a gain of exactly 1.
        total += 1.0 / std::log2(static_cast<double>(rank) + 2.0);
        break;
      }
    }
  }
  return evaluated > 0 ? total / static_cast<double>(evaluated) : 0.0;
}

double coverage_at_k(const RecLists& recs) {
  if (recs.n_items <= 0) throw std::invalid_argument("coverage_at_k: no items");
  const std::vector<long long> freq = item_frequency(recs);
  long long covered = 0;
  for (long long f : freq) covered += f > 0;
  return static_cast<double>(covered) / static_cast<double>(recs.n_items);
}

double entropy_at_k(const RecLists& recs) {
  const std::vector<long long> freq = item_frequency(recs);
  long long total = 0;
  for (long long f : freq) total += f;
  if (total == 0) return 0.0;
  double entropy = 0.0;
  for (long long f : freq) {
    if (f == 0) continue;
    const double p = static_cast<double>(f) / static_cast<double>(total);
    entropy -= p * std::log(p);
  }
  return entropy;
}

double gini_at_k(const RecLists& recs) {
  const int n = recs.n_items;
  if (n < 2) throw std::invalid_argument("gini_at_k: needs at least 2 items");
  const std::vector<long long> freq = item_frequency(recs);
  long long total = 0;
  for (long long f : freq) total += f;
  if (total == 0) return 0.0;
  std::vector<double> p(freq.size());
  for (std::size_t i = 0; i < freq.size(); ++i)
    p[i] = static_cast<double>(freq[i]) / static_cast<double>(total);
  std::sort(p.begin(), p.end());  // p_j is the j-th least value
  double gini = 0.0;
  for (int j = 1; j <= n; ++j)
    gini += static_cast<double>(2 * j - n - 1) * p[j - 1];
  return gini / static_cast<double>(n - 1);
}

void write_rec_lists(const RecLists& recs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t u = 0; u < recs.items.size(); ++u) {
    out << u << ':';
    for (int item : recs.items[u]) out << ' ' << item;
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

RecLists read_rec_lists(const std::string& path, int n_items) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  RecLists recs;
  recs.n_items = n_items;
  std::string line;
  long long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": missing user prefix");
    long long user = 0;
    try {
      user = std::stoll(line.substr(0, colon));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad user prefix");
    }
    if (user != static_cast<long long>(recs.items.size()))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": users must appear in order");
    std::istringstream rest(line.substr(colon + 1));
    std::vector<int> list;
    int item = 0;
    while (rest >> item) {
      if (item < 0 || item >= n_items)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": item index out of range");
      list.push_back(item);
    }
    recs.items.push_back(std::move(list));
  }
  for (const auto& list : recs.items)
    recs.k = std::max(recs.k, static_cast<int>(list.size()));
  return recs;
}

}  // namespace divmf
