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
#include <vector>

#include <Eigen/Core>

namespace divmf {

// Matrix-factorization model. The score of (u, i) is the dot product of the
// u-th row of user_emb with the i-th row of item_emb.
struct MfModel {
  Eigen::MatrixXd user_emb;  // n_users x d
  Eigen::MatrixXd item_emb;  // n_items x d

  int n_users() const { return static_cast<int>(user_emb.rows()); }
  int n_items() const { return static_cast<int>(item_emb.rows()); }
  int dim() const { return static_cast<int>(user_emb.cols()); }
};

// Embeddings drawn uniformly from (-0.1/sqrt(d), 0.1/sqrt(d)) so that initial
// scores are O(0.01) and the row softmax starts near uniform.
MfModel init_model(int n_users, int n_items, int d, std::uint64_t seed);

double score_one(const MfModel& model, int user, int item);

// Dense block of scores for the given index lists; entry (a, b) is the score
// of (users[a], items[b]). Throws on out-of-range indices.
Eigen::MatrixXd score_submatrix(const MfModel& model,
                                const std::vector<int>& users,
                                const std::vector<int>& items);

// Checkpoint file: a header line
//   divmf-ckpt v1 users=<n> items=<m> d=<d>
// followed by row-major little-endian 64-bit floats, user_emb then item_emb.
void save_checkpoint(const MfModel& model, const std::string& path);
MfModel load_checkpoint(const std::string& path);

}  // namespace divmf
