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

#include "divmf/interactions.hpp"

namespace divmf {

// Canonical dataset file:
//   users=<n> items=<m> interactions=<c>
//   u<TAB>i<TAB>t        (one line per record, dense indices)
// The timestamp column is 0 for untimed logs; a file whose timestamps are all
// zero reads back as untimed.
void write_dataset(const std::string& path, const DenseLog& log);
DenseLog read_dataset(const std::string& path);

// Split file: same header, lines are u<TAB>i<TAB>t<TAB>role with role in
// {train, val, test}. Train records come first in canonical order, then the
// per-user validation and test rows in ascending user order.
void write_split(const std::string& path, const SplitSet& split);
SplitSet read_split(const std::string& path);

}  // namespace divmf
