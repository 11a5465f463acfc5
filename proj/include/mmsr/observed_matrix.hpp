// Copyright 2026 The mmsr Authors. All Rights Reserved.
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
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "mmsr/errors.hpp"
#include "mmsr/graph.hpp"

namespace mmsr {

// The revealed entries X_Omega of an m x n matrix together with the
// bipartite graph of their positions.
//
// Row values are stored in the order of graph().left_neighbors(i) and
// column values in the order of graph().right_neighbors(j), so sweeps can
// walk both without lookups.
template <typename Scalar = double>
class ObservedMatrix {
 public:
  struct Entry {
    int row = 0;
    int col = 0;
    Scalar value{};
  };

  ObservedMatrix() = default;

  // Throws InputError on out-of-range positions or a repeated position.
  ObservedMatrix(int rows, int cols, std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t k = 1; k < entries_.size(); ++k) {
      if (entries_[k].row == entries_[k - 1].row && entries_[k].col == entries_[k - 1].col) {
        std::ostringstream msg;
        msg << "entry (" << entries_[k].row << ", " << entries_[k].col << ") given twice";
        throw InputError(msg.str());
      }
    }
    std::vector<Edge> edges;
    edges.reserve(entries_.size());
    for (const Entry& e : entries_) edges.push_back({e.row, e.col});
    graph_ = BipartiteGraph(rows, cols, edges);

    row_values_.reserve(entries_.size());
    for (const Entry& e : entries_) row_values_.push_back(e.value);

    // Column-major copy: entries are row-sorted, so appending per column
    // keeps each column ascending in row index.
    col_values_.resize(entries_.size());
    std::vector<int> next(cols, 0);
    for (int j = 0; j < cols; ++j) next[j] = graph_.right_offset(j);
    for (const Entry& e : entries_) col_values_[next[e.col]++] = e.value;
  }

  int rows() const { return graph_.left_size(); }
  int cols() const { return graph_.right_size(); }
  std::size_t size() const { return entries_.size(); }

  const BipartiteGraph& graph() const { return graph_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Values aligned with graph().left_neighbors(i).
  std::span<const Scalar> row_values(int i) const {
    return {row_values_.data() + graph_.left_offset(i),
            static_cast<std::size_t>(graph_.left_degree(i))};
  }

  // Values aligned with graph().right_neighbors(j).
  std::span<const Scalar> col_values(int j) const {
    return {col_values_.data() + graph_.right_offset(j),
            static_cast<std::size_t>(graph_.right_degree(j))};
  }

  std::optional<Scalar> value(int i, int j) const {
    if (i < 0 || i >= rows()) return std::nullopt;
    const auto nb = graph_.left_neighbors(i);
    const auto it = std::lower_bound(nb.begin(), nb.end(), j);
    if (it == nb.end() || *it != j) return std::nullopt;
    return row_values(i)[it - nb.begin()];
  }

 private:
  std::vector<Entry> entries_;
  BipartiteGraph graph_;
  std::vector<Scalar> row_values_;
  std::vector<Scalar> col_values_;
};

using ObservedMatrixd = ObservedMatrix<double>;

}  // namespace mmsr
