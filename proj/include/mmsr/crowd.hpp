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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmsr/observed_matrix.hpp"
#include "mmsr/sign.hpp"
#include "mmsr/solver.hpp"

namespace mmsr {

struct Label {
  int worker = 0;
  int task = 0;
  int label = 0;
};

// Crowd observations: at most one label per (worker, task), each in
// [0, classes). Stored sorted by (worker, task).
class LabelSet {
 public:
  LabelSet() = default;
  // Throws InputError on out-of-range ids or labels, fewer than two
  // classes, or a repeated (worker, task).
  LabelSet(int workers, int tasks, int classes, std::vector<Label> labels);

  int workers() const { return workers_; }
  int tasks() const { return tasks_; }
  int classes() const { return classes_; }
  const std::vector<Label>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  // Number of tasks each worker answered.
  std::vector<int> answered() const;

 private:
  int workers_ = 0;
  int tasks_ = 0;
  int classes_ = 2;
  std::vector<Label> labels_;
};

struct SingleCoinConfig {
  int workers = 80;
  int tasks = 1600;
  int classes = 2;
  double skill_lo = -0.1;
  double skill_hi = 0.7;
  double obs_sparsity = 0.04;
  // If non-empty, used as the per-worker skills instead of drawing them.
  std::vector<double> skills;
};

struct CrowdSample {
  LabelSet labels;
  std::vector<int> truth;      // per task
  std::vector<double> skill;   // s per worker
};

// Accuracy from skill: s = M/(M-1) p - 1/(M-1).
double accuracy_from_skill(double s, int classes);
double skill_from_accuracy(double p, int classes);

// Throws InputError if the skill interval leaves [-1/(M-1), 1] or the
// sparsity is not a probability.
CrowdSample simulate_singlecoin(const SingleCoinConfig& config, std::uint64_t seed);

struct AdversarySpec {
  int count = 20;
  int groups = 5;
  double accuracy = 0.3;
  double obs_sparsity = 0.4;
  // (source, mirror): the mirror group reuses the source group's answers.
  std::vector<std::pair<int, int>> colluding_pairs;
};

struct AdversaryInjection {
  LabelSet labels;
  std::vector<int> adversaries;  // ascending worker ids
  std::vector<int> group;        // per worker, -1 for honest workers
};

AdversaryInjection inject_adversaries(const LabelSet& labels, std::span<const int> truth, const AdversarySpec& spec,
                                      std::uint64_t seed);

struct AgreementEntry {
  int i = 0;  // i < j
  int j = 0;
  double c_tilde = 0.0;
  int shared = 0;
};

struct AgreementMatrix {
  int workers = 0;
  std::vector<AgreementEntry> pairs;  // sorted by (i, j)
};

// Fraction of shared tasks on which two workers agree, for every pair that
// shares at least `n_min` tasks (and at least one).
AgreementMatrix agreement_matrix(const LabelSet& labels, int n_min = 1);

// Centered agreement M/(M-1) C~ - 1/(M-1), stored at both (i, j) and
// (j, i). Entries with magnitude below `floor` are dropped.
ObservedMatrixd c_hat(const AgreementMatrix& agree, int classes, double floor = 1e-9);

struct SkillEstimate {
  std::vector<double> s;
  std::vector<double> p;
  std::vector<double> weight;
  std::vector<bool> flagged;  // isolated worker or empty projection cube
  bool sign_flip_applied = false;
};

// Clamps each s_i into [-1/(M-1) + 1/sqrt(N_i), 1 - 1/sqrt(N_i)] where N_i
// is the number of tasks the worker answered, then derives accuracy and
// log-odds vote weights. Workers with N_i = 0 get s = 0 and are flagged.
SkillEstimate finalize_skills(std::vector<double> s, std::span<const int> answered, int classes);

struct SkillOptions {
  int F = 3;
  int n_min = 3;
  MmsrOptions mmsr{.F = 3, .max_iter = 2000, .tol = 1e-8, .record_history = false, .frozen = {}};
  SpectralOptions spectral;
};

struct SkillDiagnostics {
  SolveReport solve;
  std::vector<double> magnitude;  // sqrt(u_i v_i) before signs and projection
  std::vector<double> raw;        // signed skill before projection
  SignAssignment signs;
};

// Robust skill estimate from labels: magnitudes from M-MSR on |C^|, signs
// from the spectral two-coloring of sign(C^). options.F overrides
// options.mmsr.F.
SkillEstimate estimate_skills(const LabelSet& labels, const SkillOptions& options = {},
                              SkillDiagnostics* diagnostics = nullptr);

// The same pipeline from a prepared centered-agreement matrix (square,
// symmetric). `answered` feeds the projection; options.n_min is unused.
SkillEstimate estimate_skills(const ObservedMatrixd& c_hat, std::span<const int> answered, int classes,
                              const SkillOptions& options = {}, SkillDiagnostics* diagnostics = nullptr);

struct Prediction {
  std::vector<int> label;      // per task
  std::vector<bool> unlabeled; // task received no labels (predicted 0)
};

// argmax over classes of the summed weights of workers voting for it; ties
// go to the lowest class.
Prediction predict_weighted(const LabelSet& labels, std::span<const double> weights);
Prediction predict_weighted(const LabelSet& labels, const SkillEstimate& skills);
Prediction predict_majority(const LabelSet& labels);

struct PgdOptions {
  double step = 0.0;  // 0 selects 1 / (2 max_i sum_j N_ij)
  int iters = 500;
  std::vector<double> x0;  // empty selects all 0.5
};

// Projected gradient descent on 1/2 sum N_ij (C^_ij - x_i x_j)^2 over
// observed pairs, projected to [-1, 1] each step.
std::vector<double> pgd_skills(const AgreementMatrix& agree, int classes, const PgdOptions& options = {});
double pgd_objective(const AgreementMatrix& agree, int classes, std::span<const double> x);

double prediction_error(std::span<const int> predicted, std::span<const int> truth);

// One synthetic run: simulate, corrupt, and score every method.
struct CrowdScenario {
  SingleCoinConfig crowd;
  AdversarySpec adversary;
  SkillOptions skills;
  PgdOptions pgd;
};

// Simulated labels after adversary injection, as seen by every method.
struct CrowdCorpus {
  LabelSet labels;
  std::vector<int> truth;
  std::vector<double> skill;     // planted s for honest workers
  std::vector<int> adversaries;  // ascending worker ids
  std::vector<int> group;        // per worker, -1 for honest workers
};

CrowdCorpus generate_crowd(const CrowdScenario& scenario, std::uint64_t seed);

struct CrowdTrial {
  double mmsr_error = 0.0;
  double majority_error = 0.0;
  double pgd_error = 0.0;
  std::vector<int> adversaries;
  std::vector<double> mmsr_skill;
  std::vector<std::string> warnings;
};

CrowdTrial run_crowd_trial(const CrowdScenario& scenario, std::uint64_t seed);

}  // namespace mmsr
