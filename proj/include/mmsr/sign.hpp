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

#include <span>
#include <vector>

#include <Eigen/Core>

namespace mmsr {

// One observed off-diagonal sign of the skill covariance: +1 if workers i
// and j look alike, -1 if they look opposite.
struct SignedEdge {
  int i = 0;
  int j = 0;
  int sign = 1;
};

struct SpectralOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  // Components whose subdivided graph has at most this many nodes are
  // solved with a dense symmetric eigensolver; larger ones use restarted
  // Lanczos with at most max_iter matrix-vector products.
  int dense_limit = 400;
  // Improve the zero-threshold rounding by a threshold sweep over the
  // eigenvector followed by single-flip descent on the mismatch count.
  bool refine = true;
};

// Smallest eigenpair of the random-walk matrix A = D^-1 W of a connected
// undirected graph. `vector` is a right eigenvector of A, normalized to
// unit max-norm.
struct WalkEigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  int iterations = 0;
};

// Adjacency lists; must be symmetric, loop-free and connected with at
// least two nodes. Throws NumericalError if the iterative solver does not
// reach residual `tol` within `max_iter` matrix-vector products.
WalkEigenpair smallest_walk_eigenpair(const std::vector<std::vector<int>>& adjacency,
                                      const SpectralOptions& options = {});

// The graph on workers 0..n-1 plus one midpoint node per positive edge.
// Negative edges join their endpoints directly, so a sign pattern that is
// exactly explained by some s is a bipartite graph here.
std::vector<std::vector<int>> subdivide_positive(int n, std::span<const SignedEdge> edges);

struct SignAssignment {
  std::vector<int> sign;       // +1 / -1 per worker
  std::vector<bool> flagged;   // isolated worker or zero eigencomponent
  std::vector<int> component;  // connected component id per worker
  std::vector<double> component_eigenvalue;
  bool flip_applied = false;
};

// Two-colors workers so that sign(s_i s_j) matches as many observed signs
// as the spectral rounding finds. Each connected component is oriented so
// that + is the majority (ties keep the eigenvector's own orientation).
// Throws InputError on out-of-range ids, self pairs or signs not in {-1, +1}.
SignAssignment sign_determination(int n, std::span<const SignedEdge> edges,
                                  const SpectralOptions& options = {});

int count_mismatches(std::span<const int> sign, std::span<const SignedEdge> edges);

}  // namespace mmsr
