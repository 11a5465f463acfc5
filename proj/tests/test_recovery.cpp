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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mmsr/errors.hpp"
#include "mmsr/recovery.hpp"

using namespace mmsr;

namespace {

ObservedMatrixd dense(const Eigen::MatrixXd& M) {
  std::vector<ObservedMatrixd::Entry> e;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) e.push_back({i, j, M(i, j)});
  return ObservedMatrixd(static_cast<int>(M.rows()), static_cast<int>(M.cols()), e);
}

}  // namespace

TEST_CASE("generated instances") {
  RecoveryConfig c;
  CHECK(c.entry_lo == 0.0);
  CHECK(c.entry_hi == 2.0);
  CHECK(c.noise_value == 200.0);
  CHECK(c.criterion == 1e-4);

  c.n = 12;
  c.noise_prob = 0.0;
  const auto clean = gen_instance(c, 1);
  CHECK(clean.noisy.empty());
  for (const auto& e : clean.X.entries()) {
    CHECK(e.value == clean.truth.a[e.row] * clean.truth.b[e.col]);
    CHECK(e.value > 0.0);
  }
  for (Eigen::Index k = 0; k < 12; ++k) {
    CHECK(clean.truth.a[k] > 0.0);
    CHECK(clean.truth.a[k] <= 2.0);
  }

  c.noise_prob = 1.0;
  const auto full = gen_instance(c, 1);
  CHECK(full.noisy.size() == 144);
  for (const auto& e : full.X.entries()) CHECK(e.value == doctest::Approx(full.truth.a[e.row] * full.truth.b[e.col] + 200));

  c.noise_prob = 0.25;
  const auto a = gen_instance(c, 9), b = gen_instance(c, 9);
  CHECK(a.noisy == b.noisy);
  CHECK(a.truth.a == b.truth.a);

  RecoveryConfig bad;
  bad.entry_lo = -1;
  CHECK_THROWS_AS(gen_instance(bad, 0), InputError);
  bad = {};
  bad.noise_prob = 1.5;
  CHECK_THROWS_AS(gen_instance(bad, 0), InputError);
  bad = {};
  bad.n = 0;
  CHECK_THROWS_AS(gen_instance(bad, 0), InputError);
}

TEST_CASE("entry corruption bound") {
  CHECK(entry_corruption_bound(3, 3, {}) == 0);
  CHECK(entry_corruption_bound(3, 3, {{0, 0}, {0, 2}, {1, 2}, {2, 2}}) == 3);
  CHECK(entry_corruption_bound(3, 4, {{0, 0}, {0, 1}, {1, 3}}) == 2);
  CHECK_THROWS_AS(entry_corruption_bound(2, 2, {{2, 0}}), InputError);
}

TEST_CASE("pca gradient step by hand") {
  Eigen::MatrixXd M(1, 1);
  M << 4.0;
  const auto X = dense(M);
  PcaOptions o;
  o.step_scale = 0.1 * 4.0;  // step 0.1 since ||X||_F = 4
  o.iters = 1;
  o.u0 = Vector<double>::Ones(1);
  o.v0 = Vector<double>::Ones(1);
  const auto r = pca_baseline(X, o, 0);
  CHECK(r.factors.u[0] == doctest::Approx(1.6));
  CHECK(r.factors.v[0] == doctest::Approx(1.6));
  CHECK(r.objective.front() == doctest::Approx(9.0));
}

TEST_CASE("pca is stationary at the truth and descends on exact data") {
  RecoveryConfig c;
  c.n = 15;
  c.noise_prob = 0.0;
  const auto inst = gen_instance(c, 4);
  PcaOptions at_truth;
  at_truth.u0 = inst.truth.a;
  at_truth.v0 = inst.truth.b;
  at_truth.iters = 20;
  const auto s = pca_baseline(inst.X, at_truth, 0);
  CHECK(s.objective.back() == doctest::Approx(0.0));
  CHECK((s.factors.u - inst.truth.a).norm() < 1e-12);

  PcaOptions small;
  small.step_scale = 0.05;
  small.iters = 400;
  const auto d = pca_baseline(inst.X, small, 3);
  for (std::size_t k = 1; k < d.objective.size(); ++k) CHECK(d.objective[k] <= d.objective[k - 1] * (1 + 1e-12));

  const auto full = pca_baseline(inst.X, {}, 3);
  CHECK(reconstruct_error(full.factors, inst.truth, false) <= 1e-6);
  CHECK_THROWS_AS(pca_baseline(inst.X, {.step_scale = 0.0}, 0), InputError);
}

TEST_CASE("pca reports divergence") {
  RecoveryConfig c;
  c.n = 6;
  c.noise_prob = 0.0;
  const auto inst = gen_instance(c, 2);
  CHECK_THROWS_AS(pca_baseline(inst.X, {.step_scale = 50.0, .iters = 200}, 0), NumericalError);
}

TEST_CASE("rpca at a balanced exact factorization does not move") {
  Vector<double> a(3), b(3);
  a << 1.0, 2.0, 2.0;  // norm 3
  b << 2.0, 2.0, 1.0;  // norm 3
  const auto X = dense(a * b.transpose());
  RpcaOptions o;
  o.u0 = a;
  o.v0 = b;
  const auto r = rpca_baseline(X, o, 0);
  CHECK(r.objective.front() == 0.0);
  CHECK(r.iterations == 1);
  CHECK(r.factors.u == a);
  CHECK(r.factors.v == b);
}

TEST_CASE("rpca objective and convergence on exact data") {
  RecoveryConfig c;
  c.n = 12;
  c.noise_prob = 0.0;
  const auto inst = gen_instance(c, 8);
  FactorPair<double> f{inst.truth.a * 2.0, inst.truth.b / 2.0};
  double l1 = 0.0;
  for (const auto& e : inst.X.entries()) l1 += std::abs(e.value - f.u[e.row] * f.v[e.col]);
  CHECK(rpca_objective(inst.X, f, 0.0) == doctest::Approx(l1));
  CHECK(rpca_objective(inst.X, f, 1.0) ==
        doctest::Approx(std::abs(f.u.squaredNorm() - f.v.squaredNorm())));

  const auto r = rpca_baseline(inst.X, {}, 5);
  double running = r.objective.front();
  for (double v : r.objective) {
    CHECK(std::isfinite(v));
    CHECK(v <= 1e3 * r.objective.front());
    running = std::min(running, v);
  }
  CHECK(running <= 1e-4 * r.objective.front());
  CHECK(reconstruct_error(r.factors, inst.truth, false) <= 1e-4);

  RpcaOptions slow;
  slow.schedule = StepSchedule::inverse_sqrt;
  const auto s = rpca_baseline(inst.X, slow, 5);
  CHECK(*std::min_element(s.objective.begin(), s.objective.end()) < s.objective.front());
  CHECK_THROWS_AS(rpca_baseline(inst.X, {.alpha = -1.0}, 0), InputError);
}

TEST_CASE("method names") {
  for (auto m : {RecoveryMethod::mmsr, RecoveryMethod::pca, RecoveryMethod::rpca})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("svd"), InputError);
}

TEST_CASE("trial seeds separate cells and trials") {
  const auto s = trial_seed(1, 10, 0.1, 0);
  CHECK(s == trial_seed(1, 10, 0.1, 0));
  CHECK(s != trial_seed(1, 10, 0.1, 1));
  CHECK(s != trial_seed(1, 20, 0.1, 0));
  CHECK(s != trial_seed(1, 10, 0.2, 0));
  CHECK(s != trial_seed(2, 10, 0.1, 0));
}

TEST_CASE("noiseless cells recover with every method") {
  for (auto m : {RecoveryMethod::mmsr, RecoveryMethod::pca, RecoveryMethod::rpca}) {
    SweepSpec spec;
    spec.dims = {5, 10};
    spec.noise_probs = {0.0};
    spec.method = m;
    spec.base.trials = 5;
    for (const auto& cell : recovery_sweep(spec)) {
      CAPTURE(method_name(m));
      CHECK(cell.recovery_rate == 1.0);
      CHECK(cell.trials == 5);
    }
  }
}

TEST_CASE("classification is the thresholded error and is reproducible") {
  RecoveryConfig c;
  c.n = 15;
  for (double p : {0.1, 0.3}) {
    c.noise_prob = p;
    for (int t = 0; t < 10; ++t) {
      const auto seed = trial_seed(0, c.n, p, t);
      const auto inst = gen_instance(c, seed);
      for (auto m : {RecoveryMethod::mmsr, RecoveryMethod::rpca}) {
        const auto a = solve_instance(inst, m, c.criterion, {}, seed);
        const auto b = solve_instance(gen_instance(c, seed), m, c.criterion, {}, seed);
        CHECK(a.recovered == (a.error <= c.criterion));
        CHECK(a.error == b.error);
      }
    }
  }
  SweepSpec spec;
  spec.dims = {12};
  spec.noise_probs = {0.15};
  spec.base.trials = 10;
  const auto x = recovery_sweep(spec), y = recovery_sweep(spec);
  CHECK(x[0].recovered == y[0].recovered);
}

TEST_CASE("mmsr uses the planted row and column bound as F") {
  RecoveryConfig c;
  c.n = 20;
  c.noise_prob = 0.1;
  const auto inst = gen_instance(c, 6);
  const auto r = solve_instance(inst, RecoveryMethod::mmsr, c.criterion, {}, 0);
  CHECK(r.F == entry_corruption_bound(20, 20, inst.noisy));
  CHECK(r.recovered);
  RecoverySolverOptions zero;
  zero.F = 0;
  const auto z = solve_instance(inst, RecoveryMethod::mmsr, c.criterion, zero, 0);
  CHECK(z.F == 0);
  CHECK_FALSE(z.recovered);
}

TEST_CASE("mmsr recovery rate falls with noise") {
  SweepSpec spec;
  spec.dims = {20};
  spec.noise_probs = {0.0, 0.1, 0.2, 0.25, 0.3, 0.35, 0.4};
  spec.base.trials = 50;
  const auto cells = recovery_sweep(spec);
  int inversions = 0;
  for (std::size_t k = 1; k < cells.size(); ++k) inversions += cells[k].recovery_rate > cells[k - 1].recovery_rate;
  CHECK(inversions <= 1);
  CHECK(cells.front().recovery_rate == 1.0);
  CHECK(cells.back().recovery_rate < cells.front().recovery_rate);
}
