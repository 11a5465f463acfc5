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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmsr/graph.hpp"
#include "mmsr/observed_matrix.hpp"
#include "mmsr/solver.hpp"

namespace mmsr {

// Planted rank-one matrix plus sparse large positive noise, fully observed.
struct RecoveryConfig {
  int n = 20;
  double entry_lo = 0.0;  // factor entries are drawn from (lo, hi]
  double entry_hi = 2.0;
  double noise_value = 200.0;
  double noise_prob = 0.1;
  int trials = 50;
  double criterion = 1e-4;
  std::uint64_t seed = 0;
};

struct RecoveryInstance {
  ObservedMatrixd X;
  GroundTruth<double> truth;
  std::vector<Edge> noisy;  // positions that received noise, sorted
};

// Throws InputError if lo < 0, hi <= lo, n < 1, the noise probability is not
// a probability or the noise value is negative.
RecoveryInstance gen_instance(const RecoveryConfig& config, std::uint64_t seed);

// Largest number of noisy entries in any single row or column.
int entry_corruption_bound(int rows, int cols, const std::vector<Edge>& noisy);

struct BaselineResult {
  FactorPair<double> factors;
  std::vector<double> objective;  // before the first step, then after each
  int iterations = 0;
};

// Gradient descent on ||P(X - u v^T)||_F^2 with a fixed step
// step_scale / ||X||_F. Starts from u0/v0 if given, else from a random
// positive point of the data's scale. Stops early once the relative change
// of (u, v) drops below tol. Throws NumericalError on divergence.
struct PcaOptions {
  double step_scale = 0.2;
  int iters = 5000;
  double tol = 1e-13;
  std::optional<Vector<double>> u0;
  std::optional<Vector<double>> v0;
};

BaselineResult pca_baseline(const ObservedMatrixd& X, const PcaOptions& options, std::uint64_t seed);
double pca_objective(const ObservedMatrixd& X, const FactorPair<double>& f);

enum class StepSchedule { geometric, inverse_sqrt };

// Projected subgradient descent on
//   ||P(X - u v^T)||_1 + alpha |u^T u - v^T v|
// over u, v >= 0. Steps move along the normalized subgradient by
// c q^t (geometric) or c / sqrt(t + 1) (inverse_sqrt), where
// c = c_scale * sqrt(2 median|X_ij| sqrt(rows cols)), roughly c_scale times
// the norm of a balanced factor pair of the data's scale. The best iterate
// by objective is returned.
struct RpcaOptions {
  double alpha = 1.0;
  double c_scale = 0.1;
  StepSchedule schedule = StepSchedule::geometric;
  double decay = 0.995;
  int iters = 3000;
  std::optional<Vector<double>> u0;
  std::optional<Vector<double>> v0;
};

BaselineResult rpca_baseline(const ObservedMatrixd& X, const RpcaOptions& options, std::uint64_t seed);
double rpca_objective(const ObservedMatrixd& X, const FactorPair<double>& f, double alpha);

enum class RecoveryMethod { mmsr, pca, rpca };

std::string_view method_name(RecoveryMethod m);
// Throws InputError on an unknown name.
RecoveryMethod parse_method(std::string_view name);

struct RecoverySolverOptions {
  std::optional<int> F;  // default: entry_corruption_bound of the planted noise
  MmsrOptions mmsr{.F = 0, .max_iter = 2000, .tol = 1e-10, .record_history = false, .frozen = {}};
  PcaOptions pca;
  RpcaOptions rpca;
};

struct TrialOutcome {
  double error = 0.0;  // full-matrix relative Frobenius error
  bool recovered = false;
  double seconds = 0.0;
  int F = 0;  // F used by M-MSR, 0 for the baselines
};

TrialOutcome solve_instance(const RecoveryInstance& instance, RecoveryMethod method, double criterion,
                            const RecoverySolverOptions& options, std::uint64_t seed);

// Seed of one trial; independent of the method so methods see identical
// instances.
std::uint64_t trial_seed(std::uint64_t master, int n, double noise_prob, int trial);

struct SweepSpec {
  std::vector<int> dims;
  std::vector<double> noise_probs;
  RecoveryMethod method = RecoveryMethod::mmsr;
  RecoveryConfig base;  // n, noise_prob are taken from the grid
  RecoverySolverOptions solver;
};

struct SweepCell {
  RecoveryMethod method = RecoveryMethod::mmsr;
  int n = 0;
  double noise_prob = 0.0;
  int trials = 0;
  int recovered = 0;
  double recovery_rate = 0.0;
  double mean_seconds = 0.0;
};

// One cell per (n, noise_prob), n-major in the given order.
std::vector<SweepCell> recovery_sweep(const SweepSpec& spec);

}  // namespace mmsr
