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

#include <vector>

#include "mmsr/random.hpp"
#include "mmsr/sign.hpp"

namespace mmsr::fixture {

// Random sign pattern on `n` workers: each pair present with probability
// `density`, sign taken from a planted assignment and flipped with
// probability `noise`.
inline std::vector<SignedEdge> random_sign_pattern(Rng& rng, int n, double density, double noise) {
  std::vector<int> planted(n);
  for (auto& s : planted) s = rng.bernoulli(0.5) ? 1 : -1;
  std::vector<SignedEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(density)) {
        int s = planted[i] * planted[j];
        if (rng.bernoulli(noise)) s = -s;
        edges.push_back({i, j, s});
      }
  return edges;
}

}  // namespace mmsr::fixture
