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
#include "divmf/dataset_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace divmf {

namespace {

struct Header {
  long long users = 0;
  long long items = 0;
  long long interactions = 0;
};

Header read_header(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": missing header line");
  Header h;
  if (std::sscanf(line.c_str(), "users=%lld items=%lld interactions=%lld",
                  &h.users, &h.items, &h.interactions) != 3 ||
      h.users <= 0 || h.items <= 0 || h.interactions < 0)
    throw std::runtime_error(path + ": bad header line '" + line + "'");
  return h;
}

struct Row {
  int user = 0;
  int item = 0;
  long long ts = 0;
  std::string role;  // empty in plain dataset files
};

Row parse_row(const std::string& line, const Header& h, const std::string& path,
              long long lineno, bool with_role) {
  Row row;
  char role_buf[16] = {0};
  int consumed = with_role
                     ? std::sscanf(line.c_str(), "%d\t%d\t%lld\t%15s",
                                   &row.user, &row.item, &row.ts, role_buf)
                     : std::sscanf(line.c_str(), "%d\t%d\t%lld", &row.user,
                                   &row.item, &row.ts);
  if (consumed != (with_role ? 4 : 3))
    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                             ": malformed record line");
  if (row.user < 0 || row.user >= h.users || row.item < 0 ||
      row.item >= h.items)
    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                             ": index outside header bounds");
  row.role = role_buf;
  return row;
}

}  // namespace

void write_dataset(const std::string& path, const DenseLog& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "users=" << log.n_users << " items=" << log.n_items
      << " interactions=" << log.records.size() << "\n";
  for (const auto& rec : log.records)
    out << rec.user << '\t' << rec.item << '\t' << rec.timestamp << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

DenseLog read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const Header h = read_header(in, path);
  DenseLog log;
  log.n_users = static_cast<int>(h.users);
  log.n_items = static_cast<int>(h.items);
  std::string line;
  long long lineno = 1;
  bool any_ts = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const Row row = parse_row(line, h, path, lineno, false);
    any_ts = any_ts || row.ts != 0;
    log.records.push_back({row.user, row.item, 1.0, row.ts});
  }
  if (static_cast<long long>(log.records.size()) != h.interactions)
    throw std::runtime_error(path + ": header promises " +
                             std::to_string(h.interactions) + " records, found " +
                             std::to_string(log.records.size()));
  log.has_timestamps = any_ts;
  return log;
}

void write_split(const std::string& path, const SplitSet& split) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  long long held = 0;
  for (int u = 0; u < split.n_users; ++u) {
    held += split.val_item[u] >= 0;
    held += split.test_item[u] >= 0;
  }
  out << "users=" << split.n_users << " items=" << split.n_items
      << " interactions=" << split.train.records.size() + held << "\n";
  for (const auto& rec : split.train.records)
    out << rec.user << '\t' << rec.item << '\t' << rec.timestamp << "\ttrain\n";
  for (int u = 0; u < split.n_users; ++u)
    if (split.val_item[u] >= 0)
      out << u << '\t' << split.val_item[u] << '\t' << split.val_ts[u]
          << "\tval\n";
  for (int u = 0; u < split.n_users; ++u)
    if (split.test_item[u] >= 0)
      out << u << '\t' << split.test_item[u] << '\t' << split.test_ts[u]
          << "\ttest\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

SplitSet read_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const Header h = read_header(in, path);
  SplitSet split;
  split.n_users = static_cast<int>(h.users);
  split.n_items = static_cast<int>(h.items);
  split.train.n_users = split.n_users;
  split.train.n_items = split.n_items;
  split.train_by_user.assign(split.n_users, {});
  split.val_item.assign(split.n_users, -1);
  split.test_item.assign(split.n_users, -1);
  split.val_ts.assign(split.n_users, 0);
  split.test_ts.assign(split.n_users, 0);

  std::string line;
  long long lineno = 1, rows = 0;
  bool any_ts = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const Row row = parse_row(line, h, path, lineno, true);
    ++rows;
    any_ts = any_ts || row.ts != 0;
    if (row.role == "train") {
      split.train.records.push_back({row.user, row.item, 1.0, row.ts});
      split.train_by_user[row.user].push_back(row.item);
    } else if (row.role == "val" || row.role == "test") {
      auto& slot = row.role == "val" ? split.val_item : split.test_item;
      auto& ts_slot = row.role == "val" ? split.val_ts : split.test_ts;
      if (slot[row.user] >= 0)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": duplicate " + row.role + " row for user " +
                                 std::to_string(row.user));
      slot[row.user] = row.item;
      ts_slot[row.user] = row.ts;
    } else {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown role '" + row.role + "'");
    }
  }
  if (rows != h.interactions)
    throw std::runtime_error(path + ": header promises " +
                             std::to_string(h.interactions) + " records, found " +
                             std::to_string(rows));
  split.train.has_timestamps = any_ts;
  for (auto& items : split.train_by_user)
    std::sort(items.begin(), items.end());
  // Users absent from every role were dropped before the file was written.
  for (int u = 0; u < split.n_users; ++u)
    if (split.train_by_user[u].empty() && split.val_item[u] < 0 &&
        split.test_item[u] < 0)
      split.dropped_users.push_back(u);
  return split;
}

}  // namespace divmf
