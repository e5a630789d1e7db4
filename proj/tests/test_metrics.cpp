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
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "divmf/metrics.hpp"
#include "divmf/mf_model.hpp"
#include "support/synth.hpp"

using namespace divmf;

namespace {

MfModel rank_one_model(const std::vector<double>& item_scores) {
  MfModel model;
  model.user_emb = Eigen::MatrixXd::Ones(1, 1);
  model.item_emb = Eigen::MatrixXd(item_scores.size(), 1);
  for (std::size_t i = 0; i < item_scores.size(); ++i)
    model.item_emb(static_cast<int>(i), 0) = item_scores[i];
  return model;
}

SplitSet bare_split(int n_users, int n_items,
                    std::vector<std::vector<int>> train_by_user) {
  SplitSet split;
  split.n_users = n_users;
  split.n_items = n_items;
  split.train_by_user = std::move(train_by_user);
  split.train_by_user.resize(n_users);
  split.val_item.assign(n_users, -1);
  split.test_item.assign(n_users, -1);
  split.val_ts.assign(n_users, 0);
  split.test_ts.assign(n_users, 0);
  return split;
}

RecLists lists_of(int n_items, std::vector<std::vector<int>> items) {
  RecLists recs;
  recs.n_items = n_items;
  recs.k = 0;
  for (const auto& list : items)
    recs.k = std::max(recs.k, static_cast<int>(list.size()));
  recs.items = std::move(items);
  return recs;
}

RecLists random_lists(int n_users, int n_items, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RecLists recs;
  recs.n_items = n_items;
  recs.k = k;
  recs.items.resize(n_users);
  std::vector<int> pool(n_items);
  std::iota(pool.begin(), pool.end(), 0);
  for (int u = 0; u < n_users; ++u) {
    for (int j = 0; j < k; ++j) {
      std::uniform_int_distribution<int> pick(j, n_items - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    recs.items[u].assign(pool.begin(), pool.begin() + k);
  }
  return recs;
}

}  // namespace

TEST_CASE("recommend_topk returns the forced list when k candidates remain") {
  MfModel model = rank_one_model({0.5, 0.4, 0.3, 0.2, 0.1});
  SplitSet split = bare_split(1, 5, {{0, 1, 2}});
  RecLists recs = recommend_topk(model, split, 2);
  CHECK(recs.items[0] == std::vector<int>{3, 4});

  MfModel rising = rank_one_model({0.1, 0.2, 0.3, 0.4, 0.5});
  recs = recommend_topk(rising, split, 2);
  CHECK(recs.items[0] == std::vector<int>{4, 3});
}

TEST_CASE("recommend_topk breaks score ties toward the lower index") {
  MfModel model = rank_one_model({0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  SplitSet split = bare_split(1, 7, {{1}});
  RecLists recs = recommend_topk(model, split, 3);
  CHECK(recs.items[0] == std::vector<int>{0, 2, 3});
}

TEST_CASE("recommend_topk matches a full-sort oracle") {
  const int n_users = 5, n_items = 7, k = 3;
  MfModel model = init_model(n_users, n_items, 4, 97);
  SplitSet split = testsupport::make_random_split(n_users, n_items, 2, 31);
  RecLists recs = recommend_topk(model, split, k);
  for (int u = 0; u < n_users; ++u) {
    const Eigen::VectorXd scores =
        model.item_emb * model.user_emb.row(u).transpose();
    std::vector<int> cand;
    for (int i = 0; i < n_items; ++i)
      if (!std::binary_search(split.train_by_user[u].begin(),
                              split.train_by_user[u].end(), i))
        cand.push_back(i);
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
      if (scores(a) != scores(b)) return scores(a) > scores(b);
      return a < b;
    });
    cand.resize(k);
    CHECK(recs.items[u] == cand);
  }
}

TEST_CASE("recommend_topk rejects infeasible requests") {
  MfModel model = rank_one_model({0.5, 0.4, 0.3, 0.2, 0.1});
  SplitSet split = bare_split(1, 5, {{0, 1, 2}});
  CHECK_THROWS_AS(recommend_topk(model, split, 3), std::runtime_error);
  CHECK_THROWS_AS(recommend_topk(model, split, 0), std::invalid_argument);
  SplitSet wrong = bare_split(2, 5, {{}, {}});
  CHECK_THROWS_AS(recommend_topk(model, wrong, 2), std::invalid_argument);
}

TEST_CASE("lists exclude training items and never repeat within a user") {
  const int n_users = 30, n_items = 25, k = 5;
  MfModel model = init_model(n_users, n_items, 6, 11);
  SplitSet split = testsupport::make_random_split(n_users, n_items, 8, 12);
  RecLists recs = recommend_topk(model, split, k);
  for (int u = 0; u < n_users; ++u) {
    REQUIRE(recs.items[u].size() == static_cast<std::size_t>(k));
    std::set<int> seen(recs.items[u].begin(), recs.items[u].end());
    CHECK(seen.size() == recs.items[u].size());
    for (int item : recs.items[u])
      CHECK_FALSE(std::binary_search(split.train_by_user[u].begin(),
                                     split.train_by_user[u].end(), item));
  }
  const std::vector<long long> freq = item_frequency(recs);
  CHECK(std::accumulate(freq.begin(), freq.end(), 0LL) ==
        static_cast<long long>(n_users) * k);
}

TEST_CASE("dropped users keep empty recommendation lists") {
  MfModel model = init_model(3, 6, 2, 5);
  SplitSet split = bare_split(3, 6, {{0}, {}, {1}});
  split.dropped_users = {1};
  RecLists recs = recommend_topk(model, split, 2);
  CHECK(recs.items[0].size() == 2);
  CHECK(recs.items[1].empty());
  CHECK(recs.items[2].size() == 2);
}

TEST_CASE("ndcg_at_k scores hits by their discounted rank") {
  RecLists recs = lists_of(8, {{0, 1, 2}, {3, 4, 5}, {1, 2, 7}});

  SUBCASE("rank 1 for every evaluated user gives 1") {
    CHECK(ndcg_at_k(recs, {0, 3, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("rank 3 gives 1/log2(4) = 0.5") {
    CHECK(ndcg_at_k(recs, {2, 5, 7}) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("a miss contributes zero") {
    CHECK(ndcg_at_k(recs, {6, 6, 6}) == 0.0);
  }
  SUBCASE("mixed ranks average over evaluated users only") {
    // User 0 hits at rank 1, user 1 at rank 2, user 2 has no test item.
    const double expect = (1.0 + 1.0 / std::log2(3.0)) / 2.0;
    CHECK(ndcg_at_k(recs, {0, 4, -1}) ==
          doctest::Approx(expect).epsilon(1e-15));
  }
  SUBCASE("nobody evaluated gives 0") {
    CHECK(ndcg_at_k(recs, {-1, -1, -1}) == 0.0);
  }
  SUBCASE("one slot per user is required") {
    CHECK_THROWS_AS(ndcg_at_k(recs, {0, 1}), std::invalid_argument);
  }
}

TEST_CASE("coverage_at_k counts the touched share of the catalogue") {
  CHECK(coverage_at_k(lists_of(4, {{0}, {1}})) == 0.5);
  CHECK(coverage_at_k(lists_of(4, {{0, 1}, {2, 3}})) == 1.0);
  CHECK(coverage_at_k(lists_of(3, {{2}, {2}, {2}})) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("entropy_at_k matches hand-computed distributions") {
  SUBCASE("point mass is zero") {
    CHECK(entropy_at_k(lists_of(5, {{2}, {2}, {2}})) == 0.0);
  }
  SUBCASE("uniform over four items is ln 4") {
    CHECK(entropy_at_k(lists_of(4, {{0}, {1}, {2}, {3}})) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-15));
  }
  SUBCASE("frequencies 1,2,3,4") {
    RecLists recs =
        lists_of(4, {{3, 2}, {3, 2}, {3, 2}, {3, 1}, {1, 0}});
    CHECK(entropy_at_k(recs) ==
          doctest::Approx(1.2798542258336674).epsilon(1e-12));
  }
}

TEST_CASE("gini_at_k matches hand-computed distributions") {
  SUBCASE("uniform frequencies give zero") {
    RecLists recs = lists_of(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}});
    CHECK(std::abs(gini_at_k(recs)) <= 1e-15);
  }
  SUBCASE("a single dominating item gives one") {
    CHECK(gini_at_k(lists_of(4, {{3}, {3}, {3}, {3}})) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("shares 0.1, 0.2, 0.3, 0.4 give one third") {
    RecLists recs =
        lists_of(4, {{3, 2}, {3, 2}, {3, 2}, {3, 1}, {1, 0}});
    CHECK(gini_at_k(recs) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("never-recommended items occupy the lowest sorted positions") {
    RecLists recs = lists_of(6, {{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}});
    CHECK(gini_at_k(recs) == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("a one-item catalogue is rejected") {
    CHECK_THROWS_AS(gini_at_k(lists_of(1, {{0}})), std::invalid_argument);
  }
}

TEST_CASE("relabeling items leaves every metric unchanged") {
  const int n_users = 12, n_items = 15, k = 4;
  RecLists recs = random_lists(n_users, n_items, k, 321);
  std::vector<int> test_item(n_users);
  std::mt19937_64 rng(654);
  std::uniform_int_distribution<int> pick(-1, n_items - 1);
  for (int u = 0; u < n_users; ++u) test_item[u] = pick(rng);

  std::vector<int> perm(n_items);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  RecLists relabeled = recs;
  for (auto& list : relabeled.items)
    for (int& item : list) item = perm[item];
  std::vector<int> test_relabeled(n_users);
  for (int u = 0; u < n_users; ++u)
    test_relabeled[u] = test_item[u] < 0 ? -1 : perm[test_item[u]];

  CHECK(ndcg_at_k(relabeled, test_relabeled) ==
        doctest::Approx(ndcg_at_k(recs, test_item)).epsilon(1e-15));
  CHECK(coverage_at_k(relabeled) == coverage_at_k(recs));
  CHECK(entropy_at_k(relabeled) ==
        doctest::Approx(entropy_at_k(recs)).epsilon(1e-12));
  CHECK(gini_at_k(relabeled) ==
        doctest::Approx(gini_at_k(recs)).epsilon(1e-12));
}

TEST_CASE("metrics agree with a brute-force recomputation") {
  std::mt19937_64 rng(2468);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> users_dist(3, 50), items_dist(5, 20);
    const int n_users = users_dist(rng);
    const int n_items = items_dist(rng);
    std::uniform_int_distribution<int> k_dist(1, std::min(5, n_items));
    const int k = k_dist(rng);
    RecLists recs = random_lists(n_users, n_items, k, 10'000 + trial);
    std::vector<int> test_item(n_users);
    std::uniform_int_distribution<int> pick(-2, n_items - 1);
    for (int u = 0; u < n_users; ++u)
      test_item[u] = std::max(pick(rng), -1);

    std::vector<long long> counts(n_items, 0);
    for (const auto& list : recs.items)
      for (int item : list) ++counts[item];
    const double total = static_cast<double>(n_users) * k;

    long long covered = 0;
    double entropy = 0.0;
    for (long long c : counts) {
      if (c == 0) continue;
      ++covered;
      const double p = c / total;
      entropy -= p * std::log(p);
    }
    std::vector<double> shares(n_items);
    for (int i = 0; i < n_items; ++i) shares[i] = counts[i] / total;
    std::sort(shares.begin(), shares.end());
    double gini = 0.0;
    for (int j = 1; j <= n_items; ++j)
      gini += (2.0 * j - n_items - 1) * shares[j - 1];
    gini /= n_items - 1;

    double gain = 0.0;
    long long evaluated = 0;
    for (int u = 0; u < n_users; ++u) {
      if (test_item[u] < 0) continue;
      ++evaluated;
      const auto& list = recs.items[u];
      for (std::size_t r = 0; r < list.size(); ++r)
        if (list[r] == test_item[u]) {
          gain += 1.0 / std::log2(r + 2.0);
          break;
        }
    }
    const double ndcg = evaluated > 0 ? gain / evaluated : 0.0;

    REQUIRE(coverage_at_k(recs) ==
            doctest::Approx(covered / double(n_items)).epsilon(1e-12));
    REQUIRE(entropy_at_k(recs) == doctest::Approx(entropy).epsilon(1e-12));
    REQUIRE(gini_at_k(recs) == doctest::Approx(gini).epsilon(1e-12));
    REQUIRE(ndcg_at_k(recs, test_item) ==
            doctest::Approx(ndcg).epsilon(1e-12));
  }
}

TEST_CASE("fully balanced lists maximize every diversity metric") {
  // 4 users, 4 items, k=2, every item recommended exactly twice.
  RecLists recs = lists_of(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}});
  CHECK(coverage_at_k(recs) == 1.0);
  CHECK(std::abs(gini_at_k(recs)) <= 1e-15);
  CHECK(entropy_at_k(recs) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("recommendation lists survive a file round-trip") {
  const auto dir = testsupport::scratch_dir("reclists");
  const std::string path = (dir / "lists.txt").string();
  RecLists recs = lists_of(9, {{4, 0, 7}, {}, {8, 2, 1}});
  write_rec_lists(recs, path);

  const std::string text = testsupport::read_text(path);
  CHECK(text == "0: 4 0 7\n1:\n2: 8 2 1\n");

  RecLists back = read_rec_lists(path, 9);
  CHECK(back.n_items == 9);
  CHECK(back.k == 3);
  CHECK(back.items == recs.items);
}

TEST_CASE("read_rec_lists rejects malformed files") {
  const auto dir = testsupport::scratch_dir("reclists_bad");
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_rec_lists((dir / "absent.txt").string(), 5),
                    std::runtime_error);
  }
  SUBCASE("missing user prefix") {
    const std::string path = (dir / "noprefix.txt").string();
    testsupport::write_text(path, "4 0 7\n");
    CHECK_THROWS_AS(read_rec_lists(path, 9), std::runtime_error);
  }
  SUBCASE("users out of order") {
    const std::string path = (dir / "order.txt").string();
    testsupport::write_text(path, "1: 4 0\n0: 2 3\n");
    CHECK_THROWS_AS(read_rec_lists(path, 9), std::runtime_error);
  }
  SUBCASE("item index beyond the catalogue") {
    const std::string path = (dir / "range.txt").string();
    testsupport::write_text(path, "0: 4 9\n");
    CHECK_THROWS_AS(read_rec_lists(path, 9), std::runtime_error);
  }
}
