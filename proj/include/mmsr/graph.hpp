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

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mmsr {

// An observed position (row `left`, column `right`).
struct Edge {
  int left = 0;
  int right = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Vertices drawn from both partitions. Also used to describe corrupted
// rows/columns.
struct VertexSet {
  std::vector<int> left;
  std::vector<int> right;

  bool empty() const { return left.empty() && right.empty(); }
  std::size_t size() const { return left.size() + right.size(); }
};

using CorruptionSet = VertexSet;

// The bipartite graph of observed positions: rows on the left, columns on
// the right. Immutable once built; edges are unique and sorted, neighbor
// lists ascending.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  // Throws InputError naming the first out-of-range pair. Duplicate pairs
  // are collapsed.
  BipartiteGraph(int left_size, int right_size, std::span<const Edge> edges);

  int left_size() const { return left_size_; }
  int right_size() const { return right_size_; }
  int vertex_count() const { return left_size_ + right_size_; }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const int> left_neighbors(int i) const {
    return {left_adj_.data() + left_offsets_[i], left_adj_.data() + left_offsets_[i + 1]};
  }
  std::span<const int> right_neighbors(int j) const {
    return {right_adj_.data() + right_offsets_[j], right_adj_.data() + right_offsets_[j + 1]};
  }

  // Position of vertex i's first edge in the row-major (resp. column-major)
  // edge order.
  int left_offset(int i) const { return left_offsets_[i]; }
  int right_offset(int j) const { return right_offsets_[j]; }

  int left_degree(int i) const { return left_offsets_[i + 1] - left_offsets_[i]; }
  int right_degree(int j) const { return right_offsets_[j + 1] - right_offsets_[j]; }

  bool has_edge(int i, int j) const;

  // Unified vertex numbering: left i -> i, right j -> left_size() + j.
  std::vector<std::vector<int>> unified_adjacency() const;

 private:
  int left_size_ = 0;
  int right_size_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> left_offsets_{0};
  std::vector<int> left_adj_;
  std::vector<int> right_offsets_{0};
  std::vector<int> right_adj_;
};

inline BipartiteGraph build_graph(int left_size, int right_size, std::span<const Edge> omega) {
  return BipartiteGraph(left_size, right_size, omega);
}

// Default cap on m + n for the exhaustive checks below.
inline constexpr int kBruteForceVertexLimit = 16;

// True iff every vertex has at most F neighbors in `corrupted`.
bool is_f_local(const BipartiteGraph& graph, const CorruptionSet& corrupted, int F);

// Smallest F for which is_f_local holds: the largest number of corrupted
// neighbors seen by any vertex.
int local_corruption_bound(const BipartiteGraph& graph, const CorruptionSet& corrupted);

// True iff some vertex of `subset` has at least r neighbors outside it.
bool is_r_reachable(const BipartiteGraph& graph, const VertexSet& subset, int r);

// A pair of disjoint nonempty vertex sets, neither r-reachable.
struct RobustnessWitness {
  VertexSet first;
  VertexSet second;
};

// Exhaustive search for a witness that the graph is not r-robust. Returns
// nullopt when the graph is r-robust. Throws CapabilityError when
// m + n > vertex_limit.
std::optional<RobustnessWitness> find_robustness_witness(const BipartiteGraph& graph, int r,
                                                          int vertex_limit = kBruteForceVertexLimit);

bool is_r_robust(const BipartiteGraph& graph, int r, int vertex_limit = kBruteForceVertexLimit);

// Minimum number of vertices whose removal leaves a disconnected graph of
// at least two vertices; vertex_count() - 1 when no such set exists, 0 when
// the graph is already disconnected.
int vertex_connectivity(const BipartiteGraph& graph, int vertex_limit = kBruteForceVertexLimit);

// Component label per unified vertex index (see unified_adjacency()).
std::vector<int> connected_components(const BipartiteGraph& graph);

bool is_connected(const BipartiteGraph& graph);

// Every one of the n_left * n_right edges is kept independently with
// probability p, visiting pairs in row-major order.
BipartiteGraph generate_er_bipartite(int n_left, int n_right, double p, std::uint64_t seed);

// Edge probability (ln n + 2 F ln ln n + x) / n above which M-MSR with
// parameter F recovers F-local corruptions on G(n, n, p), clamped to [0, 1].
// Requires n >= 3.
double robust_recovery_threshold(int n, int F, double x);

}  // namespace mmsr
