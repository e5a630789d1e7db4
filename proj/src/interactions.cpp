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
#include "divmf/interactions.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace divmf {

namespace {

std::vector<std::string> split_fields(const std::string& line,
                                      const std::string& delim) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(delim, pos);
    if (next == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + delim.size();
  }
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

long long parse_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

[[noreturn]] void fail_line(const std::string& path, long long lineno,
                            const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

FormatSpec FormatSpec::named(const std::string& name) {
  FormatSpec fmt;
  if (name == "csv") {
    fmt.delimiter = ",";
  } else if (name == "tsv") {
    fmt.delimiter = "\t";
  } else if (name == "movielens") {
    fmt.delimiter = "::";
  } else {
    throw std::runtime_error("unknown format '" + name +
                             "' (expected csv, tsv or movielens)");
  }
  return fmt;
}

InteractionLog parse_interactions(const std::string& path,
                                  const FormatSpec& fmt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  if (fmt.delimiter.empty())
    throw std::runtime_error("empty delimiter in format spec");
  const int need =
      std::max(fmt.user_col, fmt.item_col) + 1;

  InteractionLog log;
  std::unordered_map<std::string, std::size_t> first_slot;
  std::string line;
  long long lineno = 0;
  bool all_timed = fmt.time_col >= 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line, fmt.delimiter);
    if (static_cast<int>(fields.size()) < need)
      fail_line(path, lineno,
                "expected at least " + std::to_string(need) + " fields, got " +
                    std::to_string(fields.size()));
    Interaction rec;
    rec.user = fields[fmt.user_col];
    rec.item = fields[fmt.item_col];
    if (rec.user.empty() || rec.item.empty())
      fail_line(path, lineno, "empty user or item token");
    bool timed = false;
    try {
      if (fmt.rating_col >= 0 &&
          fmt.rating_col < static_cast<int>(fields.size()))
        rec.rating = parse_real(fields[fmt.rating_col]);
      if (fmt.time_col >= 0 && fmt.time_col < static_cast<int>(fields.size())) {
        rec.timestamp = parse_int(fields[fmt.time_col]);
        timed = true;
      }
    } catch (const std::exception&) {
      fail_line(path, lineno, "malformed numeric field");
    }
    if (!timed) all_timed = false;

    // Duplicate (user, item) pairs collapse to the earliest timestamp, or the
    // first occurrence when the file carries no timestamps.
    std::string key = rec.user + '\t' + rec.item;
    auto [it, inserted] = first_slot.try_emplace(std::move(key),
                                                 log.records.size());
    if (inserted) {
      log.records.push_back(std::move(rec));
    } else if (timed && rec.timestamp < log.records[it->second].timestamp) {
      log.records[it->second] = std::move(rec);
    }
  }
  if (log.records.empty())
    throw std::runtime_error(path + ": no interaction records");
  log.has_timestamps = all_timed;
  return log;
}

InteractionLog to_implicit(InteractionLog log) {
  for (auto& rec : log.records) rec.rating = 1.0;
  return log;
}

InteractionLog kcore_filter(const InteractionLog& log, int core) {
  if (core < 1) throw std::invalid_argument("k-core threshold must be >= 1");
  const std::size_t n = log.records.size();

  // Work on integer ids so the peeling passes stay cheap.
  std::vector<int> u_of(n), i_of(n);
  std::unordered_map<std::string, int> umap, imap;
  for (std::size_t idx = 0; idx < n; ++idx) {
    auto [uit, unew] =
        umap.try_emplace(log.records[idx].user, static_cast<int>(umap.size()));
    u_of[idx] = uit->second;
    auto [iit, inew] =
        imap.try_emplace(log.records[idx].item, static_cast<int>(imap.size()));
    i_of[idx] = iit->second;
  }
  std::vector<int> udeg(umap.size(), 0), ideg(imap.size(), 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    ++udeg[u_of[idx]];
    ++ideg[i_of[idx]];
  }

  std::vector<char> alive(n, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t idx = 0; idx < n; ++idx) {
      if (!alive[idx]) continue;
      if (udeg[u_of[idx]] < core || ideg[i_of[idx]] < core) {
        alive[idx] = 0;
        --udeg[u_of[idx]];
        --ideg[i_of[idx]];
        changed = true;
      }
    }
  }

  InteractionLog out;
  out.has_timestamps = log.has_timestamps;
  for (std::size_t idx = 0; idx < n; ++idx)
    if (alive[idx]) out.records.push_back(log.records[idx]);
  if (out.records.empty())
    throw std::runtime_error("k-core filter with core=" + std::to_string(core) +
                             " removed every record");
  return out;
}

std::pair<DenseLog, IdMaps> remap_ids(const InteractionLog& log) {
  DenseLog dense;
  IdMaps maps;
  dense.has_timestamps = log.has_timestamps;
  dense.records.reserve(log.records.size());
  for (const auto& rec : log.records) {
    auto [uit, unew] =
        maps.user_index.try_emplace(rec.user,
                                    static_cast<int>(maps.user_token.size()));
    if (unew) maps.user_token.push_back(rec.user);
    auto [iit, inew] =
        maps.item_index.try_emplace(rec.item,
                                    static_cast<int>(maps.item_token.size()));
    if (inew) maps.item_token.push_back(rec.item);
    dense.records.push_back(
        {uit->second, iit->second, rec.rating, rec.timestamp});
  }
  dense.n_users = static_cast<int>(maps.user_token.size());
  dense.n_items = static_cast<int>(maps.item_token.size());
  return {std::move(dense), std::move(maps)};
}

SplitSet leave_one_out_split(const DenseLog& log, std::uint64_t seed,
                             bool drop_small_users) {
  SplitSet split;
  split.n_users = log.n_users;
  split.n_items = log.n_items;
  split.train.n_users = log.n_users;
  split.train.n_items = log.n_items;
  split.train.has_timestamps = log.has_timestamps;
  split.train_by_user.assign(log.n_users, {});
  split.val_item.assign(log.n_users, -1);
  split.test_item.assign(log.n_users, -1);
  split.val_ts.assign(log.n_users, 0);
  split.test_ts.assign(log.n_users, 0);

  std::vector<std::vector<int>> recs_by_user(log.n_users);
  for (std::size_t idx = 0; idx < log.records.size(); ++idx) {
    const DenseRecord& rec = log.records[idx];
    if (rec.user < 0 || rec.user >= log.n_users || rec.item < 0 ||
        rec.item >= log.n_items)
      throw std::out_of_range("interaction record outside declared bounds");
    recs_by_user[rec.user].push_back(static_cast<int>(idx));
  }

  std::mt19937_64 rng(seed);
  // 0 = train, 1 = val, 2 = test, 3 = removed with a dropped user.
  std::vector<char> role(log.records.size(), 0);
  for (int u = 0; u < log.n_users; ++u) {
    const auto& recs = recs_by_user[u];
    if (recs.size() < 3) {
      if (!drop_small_users)
        throw std::runtime_error("user " + std::to_string(u) + " has " +
                                 std::to_string(recs.size()) +
                                 " interaction(s); the split needs 3 or more");
      if (!recs.empty()) {
        split.dropped_users.push_back(u);
        for (int idx : recs) role[idx] = 3;
      }
      continue;
    }
    int test_rec = -1, val_rec = -1;
    if (log.has_timestamps) {
      // Latest instance goes to test, second latest to validation. Equal
      // timestamps fall back to file order so the choice stays deterministic.
      auto later = [&log](int a, int b) {
        if (log.records[a].timestamp != log.records[b].timestamp)
          return log.records[a].timestamp > log.records[b].timestamp;
        return a > b;
      };
      for (int idx : recs)
        if (test_rec < 0 || later(idx, test_rec)) test_rec = idx;
      for (int idx : recs) {
        if (idx == test_rec) continue;
        if (val_rec < 0 || later(idx, val_rec)) val_rec = idx;
      }
    } else {
      const int sz = static_cast<int>(recs.size());
      std::uniform_int_distribution<int> first(0, sz - 1);
      const int a = first(rng);
      std::uniform_int_distribution<int> second(0, sz - 2);
      int b = second(rng);
      if (b >= a) ++b;
      test_rec = recs[a];
      val_rec = recs[b];
    }
    role[test_rec] = 2;
    role[val_rec] = 1;
    split.test_item[u] = log.records[test_rec].item;
    split.val_item[u] = log.records[val_rec].item;
    split.test_ts[u] = log.records[test_rec].timestamp;
    split.val_ts[u] = log.records[val_rec].timestamp;
  }
  if (!split.dropped_users.empty())
    std::cerr << "note: dropped " << split.dropped_users.size()
              << " user(s) with fewer than 3 interactions\n";

  for (std::size_t idx = 0; idx < log.records.size(); ++idx) {
    if (role[idx] != 0) continue;
    const DenseRecord& rec = log.records[idx];
    split.train.records.push_back(rec);
    split.train_by_user[rec.user].push_back(rec.item);
  }
  for (auto& items : split.train_by_user)
    std::sort(items.begin(), items.end());
  return split;
}

namespace {

DatasetStats stats_from_degrees(long long n_users, long long n_items,
                                std::vector<long long> item_deg) {
  DatasetStats stats;
  stats.n_users = n_users;
  stats.n_items = n_items;
  const long long total =
      std::accumulate(item_deg.begin(), item_deg.end(), 0LL);
  stats.n_interactions = total;
  if (n_users > 0 && n_items > 0)
    stats.density_pct = 100.0 * static_cast<double>(total) /
                        (static_cast<double>(n_users) *
                         static_cast<double>(n_items));
  if (total > 0 && n_items > 0) {
    std::sort(item_deg.begin(), item_deg.end(), std::greater<>());
    // Fractional decile boundary, so a uniform log scores exactly 10%.
    const double decile = 0.1 * static_cast<double>(n_items);
    const std::size_t whole = static_cast<std::size_t>(decile);
    double mass = 0.0;
    for (std::size_t j = 0; j < whole && j < item_deg.size(); ++j)
      mass += static_cast<double>(item_deg[j]);
    if (whole < item_deg.size())
      mass += (decile - static_cast<double>(whole)) *
              static_cast<double>(item_deg[whole]);
    stats.top_decile_share = mass / static_cast<double>(total);
  }
  return stats;
}

}  // namespace

DatasetStats dataset_stats(const InteractionLog& log) {
  std::unordered_map<std::string, int> users, items;
  std::vector<long long> item_deg;
  for (const auto& rec : log.records) {
    users.try_emplace(rec.user, static_cast<int>(users.size()));
    auto [it, inserted] =
        items.try_emplace(rec.item, static_cast<int>(items.size()));
    if (inserted) item_deg.push_back(0);
    ++item_deg[it->second];
  }
  return stats_from_degrees(static_cast<long long>(users.size()),
                            static_cast<long long>(items.size()),
                            std::move(item_deg));
}

DatasetStats dataset_stats(const DenseLog& log) {
  std::vector<long long> item_deg(log.n_items, 0);
  for (const auto& rec : log.records) ++item_deg[rec.item];
  return stats_from_degrees(log.n_users, log.n_items, std::move(item_deg));
}

std::string format_stats(const DatasetStats& stats) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "users=%lld\nitems=%lld\ninteractions=%lld\n"
                "density_pct=%.6g\ntop_decile_share=%.6g\n",
                stats.n_users, stats.n_items, stats.n_interactions,
                stats.density_pct, stats.top_decile_share);
  return buf;
}

}  // namespace divmf
