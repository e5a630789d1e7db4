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
#include "divmf/mf_model.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

namespace divmf {

// The checkpoint payload is written in host byte order and declared
// little-endian, so refuse to build anywhere that would not hold.
static_assert(std::endian::native == std::endian::little);

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

MfModel init_model(int n_users, int n_items, int d, std::uint64_t seed) {
  if (n_users <= 0 || n_items <= 0 || d <= 0)
    throw std::invalid_argument("init_model: dimensions must be positive");
  MfModel model;
  model.user_emb.resize(n_users, d);
  model.item_emb.resize(n_items, d);
  std::mt19937_64 rng(seed);
  const double scale = 0.1 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (int r = 0; r < n_users; ++r)
    for (int c = 0; c < d; ++c) model.user_emb(r, c) = dist(rng);
  for (int r = 0; r < n_items; ++r)
    for (int c = 0; c < d; ++c) model.item_emb(r, c) = dist(rng);
  return model;
}

double score_one(const MfModel& model, int user, int item) {
  if (user < 0 || user >= model.n_users() || item < 0 ||
      item >= model.n_items())
    throw std::out_of_range("score_one: index out of range");
  return model.user_emb.row(user).dot(model.item_emb.row(item));
}

Eigen::MatrixXd score_submatrix(const MfModel& model,
                                const std::vector<int>& users,
                                const std::vector<int>& items) {
  Eigen::MatrixXd P(static_cast<int>(users.size()), model.dim());
  for (std::size_t a = 0; a < users.size(); ++a) {
    if (users[a] < 0 || users[a] >= model.n_users())
      throw std::out_of_range("score_submatrix: user index out of range");
    P.row(static_cast<int>(a)) = model.user_emb.row(users[a]);
  }
  Eigen::MatrixXd Q(static_cast<int>(items.size()), model.dim());
  for (std::size_t b = 0; b < items.size(); ++b) {
    if (items[b] < 0 || items[b] >= model.n_items())
      throw std::out_of_range("score_submatrix: item index out of range");
    Q.row(static_cast<int>(b)) = model.item_emb.row(items[b]);
  }
  return P * Q.transpose();
}

void save_checkpoint(const MfModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "divmf-ckpt v1 users=" << model.n_users()
      << " items=" << model.n_items() << " d=" << model.dim() << "\n";
  const auto dump = [&out](const Eigen::MatrixXd& mat) {
    const RowMajorMatrix rm = mat;
    out.write(reinterpret_cast<const char*>(rm.data()),
              static_cast<std::streamsize>(sizeof(double) * rm.size()));
  };
  dump(model.user_emb);
  dump(model.item_emb);
  if (!out) throw std::runtime_error("write failed: " + path);
}

MfModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error(path + ": missing checkpoint header");
  int n_users = 0, n_items = 0, d = 0;
  if (std::sscanf(header.c_str(), "divmf-ckpt v1 users=%d items=%d d=%d",
                  &n_users, &n_items, &d) != 3 ||
      n_users <= 0 || n_items <= 0 || d <= 0)
    throw std::runtime_error(path + ": corrupt checkpoint header '" + header +
                             "'");
  const auto slurp = [&](int rows) {
    RowMajorMatrix rm(rows, d);
    const std::streamsize bytes =
        static_cast<std::streamsize>(sizeof(double) * rm.size());
    in.read(reinterpret_cast<char*>(rm.data()), bytes);
    if (in.gcount() != bytes)
      throw std::runtime_error(path + ": truncated checkpoint payload");
    return Eigen::MatrixXd(rm);
  };
  MfModel model;
  model.user_emb = slurp(n_users);
  model.item_emb = slurp(n_items);
  char extra = 0;
  in.read(&extra, 1);
  if (in.gcount() != 0)
    throw std::runtime_error(path + ": trailing bytes after checkpoint payload");
  return model;
}

}  // namespace divmf
