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

#include "mmsr/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <sstream>
#include <string>

#include "mmsr/errors.hpp"
#include "mmsr/random.hpp"

namespace mmsr {
namespace {

std::vector<bool> membership(std::span<const int> ids, int size, const char* side) {
  std::vector<bool> in(size, false);
  for (int id : ids) {
    if (id < 0 || id >= size) {
      std::ostringstream msg;
      msg << side << " vertex " << id << " out of range [0, " << size << ")";
      throw InputError(msg.str());
    }
    in[id] = true;
  }
  return in;
}

using Mask = std::uint32_t;
constexpr int kHardVertexCap = 24;

void check_limit(const BipartiteGraph& graph, int vertex_limit, const char* what) {
  const int v = graph.vertex_count();
  if (v > vertex_limit || v > kHardVertexCap) {
    std::ostringstream msg;
    msg << what << ": graph has " << v << " vertices, exhaustive limit is "
        << std::min(vertex_limit, kHardVertexCap)
        << "; no sampling-based estimate is provided";
    throw CapabilityError(msg.str());
  }
}

std::vector<Mask> adjacency_masks(const BipartiteGraph& graph) {
  const auto adj = graph.unified_adjacency();
  std::vector<Mask> masks(adj.size(), 0);
  for (std::size_t v = 0; v < adj.size(); ++v)
    for (int w : adj[v]) masks[v] |= Mask{1} << w;
  return masks;
}

VertexSet to_vertex_set(Mask mask, int left_size) {
  VertexSet set;
  for (Mask rest = mask; rest != 0; rest &= rest - 1) {
    const int v = std::countr_zero(rest);
    if (v < left_size)
      set.left.push_back(v);
    else
      set.right.push_back(v - left_size);
  }
  return set;
}

// Connectivity of the subgraph induced by `alive`.
bool induced_connected(const std::vector<Mask>& adj, Mask alive) {
  if (alive == 0) return true;
  Mask seen = alive & (~alive + 1);
  Mask frontier = seen;
  while (frontier != 0) {
    Mask next = 0;
    for (Mask rest = frontier; rest != 0; rest &= rest - 1) next |= adj[std::countr_zero(rest)];
    next &= alive & ~seen;
    seen |= next;
    frontier = next;
  }
  return seen == alive;
}

}  // namespace

BipartiteGraph::BipartiteGraph(int left_size, int right_size, std::span<const Edge> edges)
    : left_size_(left_size), right_size_(right_size) {
  if (left_size < 0 || right_size < 0) throw InputError("graph dimensions must be non-negative");
  edges_.assign(edges.begin(), edges.end());
  for (const Edge& e : edges_) {
    if (e.left < 0 || e.left >= left_size || e.right < 0 || e.right >= right_size) {
      std::ostringstream msg;
      msg << "edge (" << e.left << ", " << e.right << ") out of range for " << left_size << "x"
          << right_size << " graph";
      throw InputError(msg.str());
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  left_offsets_.assign(left_size + 1, 0);
  right_offsets_.assign(right_size + 1, 0);
  for (const Edge& e : edges_) {
    ++left_offsets_[e.left + 1];
    ++right_offsets_[e.right + 1];
  }
  for (int i = 0; i < left_size; ++i) left_offsets_[i + 1] += left_offsets_[i];
  for (int j = 0; j < right_size; ++j) right_offsets_[j + 1] += right_offsets_[j];

  left_adj_.resize(edges_.size());
  right_adj_.resize(edges_.size());
  std::vector<int> lpos(left_offsets_.begin(), left_offsets_.end() - 1);
  std::vector<int> rpos(right_offsets_.begin(), right_offsets_.end() - 1);
  // Edges are sorted by (left, right), so both fills come out ascending.
  for (const Edge& e : edges_) {
    left_adj_[lpos[e.left]++] = e.right;
    right_adj_[rpos[e.right]++] = e.left;
  }
}

bool BipartiteGraph::has_edge(int i, int j) const {
  if (i < 0 || i >= left_size_) return false;
  const auto nb = left_neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::vector<int>> BipartiteGraph::unified_adjacency() const {
  std::vector<std::vector<int>> adj(vertex_count());
  for (const Edge& e : edges_) {
    adj[e.left].push_back(left_size_ + e.right);
    adj[left_size_ + e.right].push_back(e.left);
  }
  return adj;
}

bool is_f_local(const BipartiteGraph& graph, const CorruptionSet& corrupted, int F) {
  return local_corruption_bound(graph, corrupted) <= F;
}

int local_corruption_bound(const BipartiteGraph& graph, const CorruptionSet& corrupted) {
  const auto bad_left = membership(corrupted.left, graph.left_size(), "left");
  const auto bad_right = membership(corrupted.right, graph.right_size(), "right");
  int bound = 0;
  for (int i = 0; i < graph.left_size(); ++i) {
    int count = 0;
    for (int j : graph.left_neighbors(i)) count += bad_right[j];
    bound = std::max(bound, count);
  }
  for (int j = 0; j < graph.right_size(); ++j) {
    int count = 0;
    for (int i : graph.right_neighbors(j)) count += bad_left[i];
    bound = std::max(bound, count);
  }
  return bound;
}

bool is_r_reachable(const BipartiteGraph& graph, const VertexSet& subset, int r) {
  if (subset.empty()) throw InputError("r-reachability needs a nonempty vertex set");
  const auto in_left = membership(subset.left, graph.left_size(), "left");
  const auto in_right = membership(subset.right, graph.right_size(), "right");
  if (r <= 0) return true;
  for (int i : subset.left) {
    int outside = 0;
    for (int j : graph.left_neighbors(i)) outside += !in_right[j];
    if (outside >= r) return true;
  }
  for (int j : subset.right) {
    int outside = 0;
    for (int i : graph.right_neighbors(j)) outside += !in_left[i];
    if (outside >= r) return true;
  }
  return false;
}

std::optional<RobustnessWitness> find_robustness_witness(const BipartiteGraph& graph, int r,
                                                          int vertex_limit) {
  check_limit(graph, vertex_limit, "robustness check");
  const int v = graph.vertex_count();
  if (r <= 0 || v < 2) return std::nullopt;

  const auto adj = adjacency_masks(graph);
  const Mask full = (Mask{1} << v) - 1;
  const std::size_t count = std::size_t{1} << v;

  // witness[mask]: some nonempty subset of `mask` that is not r-reachable,
  // or 0 when none exists. Filled in increasing order so every strict
  // subset is ready.
  std::vector<Mask> witness(count, 0);
  for (Mask mask = 1; mask <= full; ++mask) {
    bool reachable = false;
    for (Mask rest = mask; rest != 0 && !reachable; rest &= rest - 1) {
      const int u = std::countr_zero(rest);
      reachable = std::popcount(adj[u] & ~mask) >= r;
    }
    if (!reachable) {
      witness[mask] = mask;
      continue;
    }
    for (Mask rest = mask; rest != 0; rest &= rest - 1) {
      const Mask sub = witness[mask & ~(rest & (~rest + 1))];
      if (sub != 0) {
        witness[mask] = sub;
        break;
      }
    }
  }

  for (Mask s1 = 1; s1 <= full; ++s1) {
    if (witness[s1] != s1) continue;
    const Mask s2 = witness[full & ~s1];
    if (s2 != 0) {
      return RobustnessWitness{to_vertex_set(s1, graph.left_size()),
                               to_vertex_set(s2, graph.left_size())};
    }
  }
  return std::nullopt;
}

bool is_r_robust(const BipartiteGraph& graph, int r, int vertex_limit) {
  return !find_robustness_witness(graph, r, vertex_limit).has_value();
}

int vertex_connectivity(const BipartiteGraph& graph, int vertex_limit) {
  check_limit(graph, vertex_limit, "vertex connectivity");
  const int v = graph.vertex_count();
  if (v <= 1) return 0;
  const auto adj = adjacency_masks(graph);
  const Mask full = (Mask{1} << v) - 1;
  int best = v - 1;
  for (Mask removed = 0; removed <= full; ++removed) {
    const int k = std::popcount(removed);
    if (k >= best || v - k < 2) continue;
    if (!induced_connected(adj, full & ~removed)) best = k;
  }
  return best;
}

std::vector<int> connected_components(const BipartiteGraph& graph) {
  const auto adj = graph.unified_adjacency();
  std::vector<int> label(adj.size(), -1);
  int next = 0;
  for (std::size_t start = 0; start < adj.size(); ++start) {
    if (label[start] >= 0) continue;
    std::queue<int> queue;
    queue.push(static_cast<int>(start));
    label[start] = next;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for (int w : adj[u]) {
        if (label[w] < 0) {
          label[w] = next;
          queue.push(w);
        }
      }
    }
    ++next;
  }
  return label;
}

bool is_connected(const BipartiteGraph& graph) {
  const auto label = connected_components(graph);
  return std::all_of(label.begin(), label.end(), [](int c) { return c == 0; });
}

BipartiteGraph generate_er_bipartite(int n_left, int n_right, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
  if (n_left < 0 || n_right < 0) throw InputError("graph dimensions must be non-negative");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n_left; ++i)
    for (int j = 0; j < n_right; ++j)
      if (rng.bernoulli(p)) edges.push_back({i, j});
  return BipartiteGraph(n_left, n_right, edges);
}

double robust_recovery_threshold(int n, int F, double x) {
  if (n < 3) throw InputError("threshold needs n >= 3 so that ln ln n > 0");
  const double ln_n = std::log(static_cast<double>(n));
  const double p = (ln_n + 2.0 * F * std::log(ln_n) + x) / n;
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace mmsr
