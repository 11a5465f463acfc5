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

#include "mmsr/sign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <string>

#include <Eigen/Eigenvalues>

#include "mmsr/errors.hpp"
#include "mmsr/random.hpp"

namespace mmsr {
namespace {

constexpr double kZeroComponent = 1e-9;

// out <- D^-1/2 W D^-1/2 y
void apply_normalized(const std::vector<std::vector<int>>& adj, const Eigen::VectorXd& inv_sqrt_deg,
                      const Eigen::VectorXd& y, Eigen::VectorXd& out) {
  const auto n = static_cast<int>(adj.size());
  for (int a = 0; a < n; ++a) {
    double acc = 0.0;
    for (int b : adj[a]) acc += inv_sqrt_deg[b] * y[b];
    out[a] = inv_sqrt_deg[a] * acc;
  }
}

void normalize_orientation(Eigen::VectorXd& x) {
  Eigen::Index at = 0;
  const double peak = x.cwiseAbs().maxCoeff(&at);
  x /= (x[at] < 0 ? -peak : peak);
}

// Mismatches on edges touching `a` if its sign were flipped, minus current.
int flip_gain(int a, const std::vector<std::vector<std::pair<int, int>>>& by_worker, const std::vector<int>& sign) {
  int delta = 0;
  for (const auto& [b, s] : by_worker[a]) delta += sign[a] * sign[b] == s ? 1 : -1;
  return delta;
}

// Kernighan-Lin passes: flip every worker once, each time taking the
// unlocked worker with the best gain, and keep the best prefix. Repeats
// until a pass no longer helps.
void kl_descent(const std::vector<int>& workers, const std::vector<std::vector<std::pair<int, int>>>& by_worker,
                std::vector<int>& sign) {
  std::vector<char> locked(sign.size(), 0);
  std::vector<int> flipped;
  for (;;) {
    for (int a : workers) locked[a] = 0;
    flipped.clear();
    int running = 0, best_total = 0;
    std::size_t best_len = 0;
    for (std::size_t step = 0; step < workers.size(); ++step) {
      int pick = -1, pick_gain = 0;
      for (int a : workers) {
        if (locked[a]) continue;
        const int g = flip_gain(a, by_worker, sign);
        if (pick < 0 || g < pick_gain) {
          pick = a;
          pick_gain = g;
        }
      }
      sign[pick] = -sign[pick];
      locked[pick] = 1;
      flipped.push_back(pick);
      running += pick_gain;
      if (running < best_total) {
        best_total = running;
        best_len = flipped.size();
      }
    }
    for (std::size_t k = best_len; k < flipped.size(); ++k) sign[flipped[k]] = -sign[flipped[k]];
    if (best_total >= 0) break;
  }
}

// Starts from the zero-threshold rounding and from threshold cuts of the
// eigenvector (at most kMaxCuts of them, evenly spaced), runs kl_descent
// from each and keeps the first assignment with the fewest mismatches.
void refine_component(const std::vector<int>& workers, const std::vector<double>& score,
                      const std::vector<std::vector<std::pair<int, int>>>& by_worker, std::vector<int>& sign) {
  constexpr std::size_t kMaxCuts = 32;
  const auto count = [&](const std::vector<int>& sg) {
    int c = 0;
    for (int a : workers)
      for (const auto& [b, s] : by_worker[a])
        if (a < b && sg[a] * sg[b] != s) ++c;
    return c;
  };
  std::vector<std::size_t> order(workers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return score[x] < score[y]; });

  std::vector<int> best_sign = sign;
  kl_descent(workers, by_worker, best_sign);
  int best = count(best_sign);

  // Cut k: the k lowest scores get -, the rest +.
  const std::size_t cuts = std::min(order.size() + 1, kMaxCuts);
  std::vector<int> trial = sign;
  for (std::size_t c = 0; c < cuts && best > 0; ++c) {
    const std::size_t k = cuts == order.size() + 1 ? c : c * order.size() / (cuts - 1);
    for (std::size_t r = 0; r < order.size(); ++r) trial[workers[order[r]]] = r < k ? -1 : 1;
    kl_descent(workers, by_worker, trial);
    if (const int m = count(trial); m < best) {
      best = m;
      best_sign = trial;
    }
  }
  sign = best_sign;
}

}  // namespace

WalkEigenpair smallest_walk_eigenpair(const std::vector<std::vector<int>>& adjacency,
                                      const SpectralOptions& options) {
  const auto n = static_cast<int>(adjacency.size());
  if (n < 2) throw InputError("smallest_walk_eigenpair: need at least two nodes");
  Eigen::VectorXd inv_sqrt_deg(n);
  for (int a = 0; a < n; ++a) {
    if (adjacency[a].empty()) throw InputError("smallest_walk_eigenpair: isolated node " + std::to_string(a));
    inv_sqrt_deg[a] = 1.0 / std::sqrt(static_cast<double>(adjacency[a].size()));
  }

  WalkEigenpair out;
  Eigen::VectorXd y(n);
  if (n <= options.dense_limit) {
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b : adjacency[a]) N(a, b) = inv_sqrt_deg[a] * inv_sqrt_deg[b];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(N);
    if (solver.info() != Eigen::Success) throw NumericalError("smallest_walk_eigenpair: dense eigensolver failed");
    out.value = solver.eigenvalues()[0];
    y = solver.eigenvectors().col(0);
    out.residual = (N * y - out.value * y).norm();
  } else {
    // Restarted Lanczos with full reorthogonalization; each restart begins
    // from the previous Ritz vector. max_iter caps the total matvecs.
    constexpr int kBasis = 160;
    Rng rng(0x5eed);
    for (int a = 0; a < n; ++a) y[a] = rng.uniform(-1.0, 1.0);
    y.normalize();
    Eigen::MatrixXd Q;
    Eigen::VectorXd w(n), ny(n);
    int used = 0;
    out.residual = std::numeric_limits<double>::infinity();
    while (used < options.max_iter) {
      const int m = std::min({n, kBasis, options.max_iter - used});
      Q.resize(n, m);
      Eigen::VectorXd alpha(m), beta(m);
      Q.col(0) = y;
      int steps = m;
      for (int k = 0; k < m; ++k) {
        apply_normalized(adjacency, inv_sqrt_deg, Q.col(k), w);
        ++used;
        alpha[k] = Q.col(k).dot(w);
        for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).transpose() * w);
        beta[k] = w.norm();
        if (k + 1 == m) break;
        if (beta[k] < 1e-13) {
          steps = k + 1;
          break;
        }
        Q.col(k + 1) = w / beta[k];
      }
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
      for (int k = 0; k < steps; ++k) {
        T(k, k) = alpha[k];
        if (k + 1 < steps) T(k, k + 1) = T(k + 1, k) = beta[k];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(T);
      y = Q.leftCols(steps) * ritz.eigenvectors().col(0);
      y.normalize();
      apply_normalized(adjacency, inv_sqrt_deg, y, ny);
      out.value = y.dot(ny);
      out.residual = (ny - out.value * y).norm();
      if (out.residual <= options.tol) break;
    }
    out.iterations = used;
    if (out.residual > options.tol)
      throw NumericalError("smallest_walk_eigenpair: Lanczos did not converge, residual " +
                           std::to_string(out.residual));
  }
  out.vector = y.cwiseProduct(inv_sqrt_deg);
  normalize_orientation(out.vector);
  return out;
}

std::vector<std::vector<int>> subdivide_positive(int n, std::span<const SignedEdge> edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n || e.i == e.j)
      throw InputError("sign pair (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ") is invalid");
    if (e.sign != 1 && e.sign != -1)
      throw InputError("sign for pair (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ") must be +1 or -1");
    if (e.sign < 0) {
      adj[e.i].push_back(e.j);
      adj[e.j].push_back(e.i);
    } else {
      const auto mid = static_cast<int>(adj.size());
      adj.push_back({e.i, e.j});
      adj[e.i].push_back(mid);
      adj[e.j].push_back(mid);
    }
  }
  return adj;
}

SignAssignment sign_determination(int n, std::span<const SignedEdge> edges, const SpectralOptions& options) {
  if (n < 0) throw InputError("sign_determination: negative worker count");
  const auto adj = subdivide_positive(n, edges);
  const bool refine = options.refine;
  std::vector<std::vector<std::pair<int, int>>> edges_by_worker(n);
  for (const auto& e : edges) {
    edges_by_worker[e.i].push_back({e.j, e.sign});
    edges_by_worker[e.j].push_back({e.i, e.sign});
  }
  const auto total = static_cast<int>(adj.size());

  SignAssignment out;
  out.sign.assign(n, 1);
  out.flagged.assign(n, false);
  out.component.assign(n, -1);

  std::vector<int> comp(total, -1), local(total, -1);
  for (int root = 0; root < n; ++root) {
    if (comp[root] >= 0) continue;
    const auto id = static_cast<int>(out.component_eigenvalue.size());
    std::vector<int> members{root};
    comp[root] = id;
    for (std::size_t k = 0; k < members.size(); ++k)
      for (int b : adj[members[k]])
        if (comp[b] < 0) {
          comp[b] = id;
          members.push_back(b);
        }
    for (int a : members)
      if (a < n) out.component[a] = id;
    if (members.size() == 1) {
      out.flagged[root] = true;
      out.component_eigenvalue.push_back(0.0);
      continue;
    }

    for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<int>(k);
    std::vector<std::vector<int>> sub(members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
      for (int b : adj[members[k]]) sub[k].push_back(local[b]);
    const auto pair = smallest_walk_eigenpair(sub, options);
    out.component_eigenvalue.push_back(pair.value);

    std::vector<int> workers;
    std::vector<double> score;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const int a = members[k];
      if (a >= n) continue;
      const double x = pair.vector[static_cast<Eigen::Index>(k)];
      workers.push_back(a);
      score.push_back(x);
      if (std::abs(x) < kZeroComponent) out.flagged[a] = true;
      out.sign[a] = x > -kZeroComponent ? 1 : -1;
    }
    if (refine) refine_component(workers, score, edges_by_worker, out.sign);
    int plus = 0, minus = 0;
    for (int a : workers)
      if (!out.flagged[a]) (out.sign[a] > 0 ? plus : minus)++;
    if (minus > plus) {
      out.flip_applied = true;
      // Flip the whole component: refinement may have given flagged
      // workers a sign, and it is only meaningful relative to the rest.
      for (int a : workers) out.sign[a] = -out.sign[a];
    }
  }
  return out;
}

int count_mismatches(std::span<const int> sign, std::span<const SignedEdge> edges) {
  int count = 0;
  for (const auto& e : edges)
    if (sign[e.i] * sign[e.j] != e.sign) ++count;
  return count;
}

}  // namespace mmsr
