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

// Brute-force reference implementations used only by the tests. Each one
// follows the defining rule directly and shares no code with the library
// routine it checks.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "mmsr/graph.hpp"

namespace mmsr::oracle {

// Unified adjacency matrix built straight from the edge list.
inline std::vector<std::vector<bool>> adjacency_matrix(const BipartiteGraph& g) {
  const int m = g.left_size();
  const int v = g.vertex_count();
  std::vector<std::vector<bool>> adj(v, std::vector<bool>(v, false));
  for (const Edge& e : g.edges()) {
    adj[e.left][m + e.right] = true;
    adj[m + e.right][e.left] = true;
  }
  return adj;
}

// Label every vertex {outside, S1, S2} and test each pair of nonempty sets.
inline bool robust_by_ternary_labeling(const BipartiteGraph& g, int r) {
  const int v = g.vertex_count();
  const auto adj = adjacency_matrix(g);
  std::vector<int> label(v, 0);
  auto reachable = [&](int which) {
    for (int x = 0; x < v; ++x) {
      if (label[x] != which) continue;
      int outside = 0;
      for (int y = 0; y < v; ++y) outside += adj[x][y] && label[y] != which;
      if (outside >= r) return true;
    }
    return false;
  };
  std::int64_t total = 1;
  for (int k = 0; k < v; ++k) total *= 3;
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code;
    bool has1 = false, has2 = false;
    for (int x = 0; x < v; ++x) {
      label[x] = static_cast<int>(c % 3);
      c /= 3;
      has1 |= label[x] == 1;
      has2 |= label[x] == 2;
    }
    if (!has1 || !has2) continue;
    if (!reachable(1) && !reachable(2)) return false;
  }
  return true;
}

// Smallest removal set that disconnects the rest (>= 2 vertices), by
// trying every subset; v - 1 when none does.
inline int connectivity_by_removal(const BipartiteGraph& g) {
  const int v = g.vertex_count();
  const auto adj = adjacency_matrix(g);
  int best = std::max(v - 1, 0);
  for (std::uint32_t removed = 0; removed < (1u << v); ++removed) {
    std::vector<int> alive;
    for (int x = 0; x < v; ++x)
      if (!(removed >> x & 1)) alive.push_back(x);
    if (alive.size() < 2) continue;
    std::vector<bool> seen(v, false);
    std::vector<int> stack{alive[0]};
    seen[alive[0]] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y : alive)
        if (adj[x][y] && !seen[y]) {
          seen[y] = true;
          ++reached;
          stack.push_back(y);
        }
    }
    if (reached < alive.size()) best = std::min(best, v - static_cast<int>(alive.size()));
  }
  return best;
}

// Sign pattern over worker pairs: (i, j, +1 / -1).
struct SignedPair {
  int i;
  int j;
  int sign;
};

inline int mismatches(const std::vector<int>& signs, const std::vector<SignedPair>& pattern) {
  int count = 0;
  for (const auto& p : pattern) count += signs[p.i] * signs[p.j] != p.sign;
  return count;
}

// Minimum number of sign mismatches over all 2^n assignments.
inline int min_mismatches(int n, const std::vector<SignedPair>& pattern) {
  int best = std::numeric_limits<int>::max();
  std::vector<int> signs(n);
  for (std::uint32_t code = 0; code < (1u << n); ++code) {
    for (int k = 0; k < n; ++k) signs[k] = (code >> k & 1) ? -1 : 1;
    best = std::min(best, mismatches(signs, pattern));
  }
  return best;
}

}  // namespace mmsr::oracle
