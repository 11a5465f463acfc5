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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmsr/crowd.hpp"
#include "mmsr/graph.hpp"
#include "mmsr/recovery.hpp"
#include "mmsr/run_result.hpp"

// Drivers behind the CLI subcommands. Each returns a RunResult whose config
// echoes every resolved parameter and writes its files under `out` when
// `out` is non-empty.
namespace mmsr {

struct CompleteOptions {
  std::string matrix;
  int F = 0;
  int max_iter = 10000;
  double tol = 1e-10;
  std::string init = "ones";  // "ones" or "row"
  int init_row = 0;
  double init_fill = 1.0;  // bound for unobserved columns under "row"
  std::uint64_t seed = 0;
  std::string out;
};

// Artifacts: u.txt, v.txt, reconstruction.txt (the full u v^T).
RunResult cmd_complete(const CompleteOptions& options);

struct RobustnessOptions {
  std::string graph;
  int r = 1;
  int vertex_limit = kBruteForceVertexLimit;
  std::uint64_t seed = 0;
};

// Metrics robust (0/1), vertex_connectivity; table holds the witness pair.
RunResult cmd_robustness(const RobustnessOptions& options);

struct CrowdSimOptions {
  CrowdScenario scenario;
  int repeats = 50;
  std::uint64_t seed = 0;
  std::string sweep_key;  // empty: a single setting
  std::vector<double> sweep_values;
  std::string out;
};

// Keys accepted by sweep_key.
const std::vector<std::string>& crowd_sweep_keys();
// Sets one scenario parameter by key; throws InputError on an unknown key
// or a non-integer value for an integer parameter.
void set_crowd_parameter(CrowdScenario& scenario, const std::string& key, double value);

// Repeat r uses seed derive_seed(seed, r) for every swept value. Table rows
// (parameter, value, method, repeats, mean_error, std_error) in sweep order
// then method order mmsr, mv, pgd. Artifacts: sweep.csv plus labels.csv,
// truth.csv and adversaries.csv from repeat 0 of the first setting.
RunResult cmd_crowd_sim(const CrowdSimOptions& options);

struct CrowdPredictOptions {
  std::string labels;
  std::string truth;  // optional; a missing file only warns
  int classes = 0;    // 0 infers from the labels
  int F = 3;
  int n_min = 3;
  std::uint64_t seed = 0;
  std::string out;
};

// Artifacts: predictions.csv, skills.csv, and workers.csv / tasks.csv when
// the ids are not plain indices.
RunResult cmd_crowd_predict(const CrowdPredictOptions& options);

struct RecoverySweepOptions {
  std::vector<int> dims{10, 20};
  std::vector<double> noise_probs{0.0, 0.1, 0.2};
  int trials = 50;
  std::vector<std::string> methods{"mmsr", "pca", "rpca"};
  double entry_lo = 0.0;
  double entry_hi = 2.0;
  double noise_value = 200.0;
  double criterion = 1e-4;
  std::optional<int> F;  // default: the planted corruption bound
  std::uint64_t seed = 0;
  std::string out;
};

// Rows sorted by method name, n, noise_prob. Artifact: sweep.csv.
RunResult cmd_recovery_sweep(const RecoverySweepOptions& options);

// 0 success, 2 InputError, 3 CapabilityError, 4 NumericalError. Other
// exceptions map to 1. The message goes to `err`.
int run_guarded(const std::function<void()>& body, std::ostream& err);

}  // namespace mmsr
