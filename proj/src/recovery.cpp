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

#include "mmsr/recovery.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <string>

#include "mmsr/errors.hpp"
#include "mmsr/random.hpp"

namespace mmsr {
namespace {

double median_abs(const ObservedMatrixd& X) {
  std::vector<double> a;
  a.reserve(X.entries().size());
  for (const auto& e : X.entries()) a.push_back(std::abs(e.value));
  if (a.empty()) throw InputError("matrix has no observed entries");
  const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  return *mid;
}

// Random positive factors with u_i v_j near the median entry.
FactorPair<double> random_start(const ObservedMatrixd& X, std::uint64_t seed) {
  const double scale = std::sqrt(std::max(median_abs(X), 1e-12));
  Rng rng(seed);
  FactorPair<double> f{Vector<double>(X.rows()), Vector<double>(X.cols())};
  for (Eigen::Index i = 0; i < f.u.size(); ++i) f.u[i] = scale * rng.uniform(0.5, 1.5);
  for (Eigen::Index j = 0; j < f.v.size(); ++j) f.v[j] = scale * rng.uniform(0.5, 1.5);
  return f;
}

FactorPair<double> start_point(const ObservedMatrixd& X, const std::optional<Vector<double>>& u0,
                               const std::optional<Vector<double>>& v0, std::uint64_t seed) {
  auto f = random_start(X, seed);
  if (u0) f.u = *u0;
  if (v0) f.v = *v0;
  if (f.u.size() != X.rows() || f.v.size() != X.cols())
    throw InputError("initial factor lengths do not match the matrix");
  return f;
}

double squared_norm(const ObservedMatrixd& X) {
  double s = 0.0;
  for (const auto& e : X.entries()) s += e.value * e.value;
  return s;
}

}  // namespace

RecoveryInstance gen_instance(const RecoveryConfig& c, std::uint64_t seed) {
  if (c.n < 1) throw InputError("matrix side must be positive");
  if (!(c.entry_lo >= 0.0) || !(c.entry_hi > c.entry_lo)) throw InputError("entry interval must satisfy 0 <= lo < hi");
  if (!(c.noise_prob >= 0.0 && c.noise_prob <= 1.0)) throw InputError("noise_prob must lie in [0, 1]");
  if (!(c.noise_value >= 0.0)) throw InputError("noise_value must be non-negative");

  Rng rng(seed);
  RecoveryInstance out;
  out.truth.a.resize(c.n);
  out.truth.b.resize(c.n);
  const double width = c.entry_hi - c.entry_lo;
  for (int i = 0; i < c.n; ++i) out.truth.a[i] = c.entry_lo + width * rng.uniform_open_closed();
  for (int j = 0; j < c.n; ++j) out.truth.b[j] = c.entry_lo + width * rng.uniform_open_closed();
  std::vector<ObservedMatrixd::Entry> entries;
  entries.reserve(static_cast<std::size_t>(c.n) * c.n);
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j) {
      double x = out.truth.a[i] * out.truth.b[j];
      if (rng.bernoulli(c.noise_prob)) {
        x += c.noise_value;
        out.noisy.push_back({i, j});
      }
      entries.push_back({i, j, x});
    }
  out.X = ObservedMatrixd(c.n, c.n, std::move(entries));
  return out;
}

int entry_corruption_bound(int rows, int cols, const std::vector<Edge>& noisy) {
  std::vector<int> r(rows, 0), c(cols, 0);
  for (const auto& e : noisy) {
    if (e.left < 0 || e.left >= rows || e.right < 0 || e.right >= cols)
      throw InputError("noisy position out of range");
    ++r[e.left];
    ++c[e.right];
  }
  int best = 0;
  for (int k : r) best = std::max(best, k);
  for (int k : c) best = std::max(best, k);
  return best;
}

double pca_objective(const ObservedMatrixd& X, const FactorPair<double>& f) {
  double s = 0.0;
  for (const auto& e : X.entries()) {
    const double r = e.value - f.u[e.row] * f.v[e.col];
    s += r * r;
  }
  return s;
}

BaselineResult pca_baseline(const ObservedMatrixd& X, const PcaOptions& o, std::uint64_t seed) {
  if (!(o.step_scale > 0)) throw InputError("step must be positive");
  if (o.iters < 0) throw InputError("iteration count must be non-negative");
  BaselineResult out;
  auto& f = out.factors;
  f = start_point(X, o.u0, o.v0, seed);
  const double norm = std::sqrt(squared_norm(X));
  const double step = o.step_scale / (norm > 0 ? norm : 1.0);
  Vector<double> gu(X.rows()), gv(X.cols());
  out.objective.push_back(pca_objective(X, f));
  const double limit = 1e12 * std::max(out.objective.front(), 1.0);
  for (int t = 0; t < o.iters; ++t) {
    gu.setZero();
    gv.setZero();
    for (const auto& e : X.entries()) {
      const double r = e.value - f.u[e.row] * f.v[e.col];
      gu[e.row] += 2.0 * r * f.v[e.col];
      gv[e.col] += 2.0 * r * f.u[e.row];
    }
    const double before = std::sqrt(f.u.squaredNorm() + f.v.squaredNorm());
    f.u += step * gu;
    f.v += step * gv;
    out.iterations = t + 1;
    const double obj = pca_objective(X, f);
    out.objective.push_back(obj);
    if (!std::isfinite(obj) || obj > limit)
      throw NumericalError("pca baseline diverged at iteration " + std::to_string(t + 1));
    const double moved = step * std::sqrt(gu.squaredNorm() + gv.squaredNorm());
    if (moved <= o.tol * std::max(before, 1e-300)) break;
  }
  return out;
}

double rpca_objective(const ObservedMatrixd& X, const FactorPair<double>& f, double alpha) {
  double s = 0.0;
  for (const auto& e : X.entries()) s += std::abs(e.value - f.u[e.row] * f.v[e.col]);
  return s + alpha * std::abs(f.u.squaredNorm() - f.v.squaredNorm());
}

BaselineResult rpca_baseline(const ObservedMatrixd& X, const RpcaOptions& o, std::uint64_t seed) {
  if (!(o.alpha >= 0)) throw InputError("alpha must be non-negative");
  if (!(o.c_scale >= 0)) throw InputError("step constant must be non-negative");
  if (!(o.decay > 0 && o.decay <= 1)) throw InputError("decay must lie in (0, 1]");
  if (o.iters < 0) throw InputError("iteration count must be non-negative");
  BaselineResult out;
  FactorPair<double> f = start_point(X, o.u0, o.v0, seed);
  const double c = o.c_scale * std::sqrt(2.0 * median_abs(X) * std::sqrt(double(X.rows()) * X.cols()));
  Vector<double> gu(X.rows()), gv(X.cols());
  double best = rpca_objective(X, f, o.alpha);
  out.objective.push_back(best);
  out.factors = f;
  const double limit = 1e12 * std::max(best, 1.0);
  double geometric = c;
  for (int t = 0; t < o.iters; ++t) {
    gu.setZero();
    gv.setZero();
    for (const auto& e : X.entries()) {
      const double r = e.value - f.u[e.row] * f.v[e.col];
      const double s = r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0);
      gu[e.row] -= s * f.v[e.col];
      gv[e.col] -= s * f.u[e.row];
    }
    const double gap = f.u.squaredNorm() - f.v.squaredNorm();
    const double sg = gap > 0 ? 1.0 : (gap < 0 ? -1.0 : 0.0);
    gu += o.alpha * sg * 2.0 * f.u;
    gv -= o.alpha * sg * 2.0 * f.v;
    const double gnorm = std::sqrt(gu.squaredNorm() + gv.squaredNorm());
    out.iterations = t + 1;
    if (gnorm == 0.0) {
      out.objective.push_back(out.objective.back());
      break;
    }
    const double step = o.schedule == StepSchedule::geometric ? geometric : c / std::sqrt(t + 1.0);
    geometric *= o.decay;
    f.u = (f.u - (step / gnorm) * gu).cwiseMax(0.0);
    f.v = (f.v - (step / gnorm) * gv).cwiseMax(0.0);
    const double obj = rpca_objective(X, f, o.alpha);
    out.objective.push_back(obj);
    if (!std::isfinite(obj) || obj > limit)
      throw NumericalError("rpca baseline diverged at iteration " + std::to_string(t + 1));
    if (obj < best) {
      best = obj;
      out.factors = f;
    }
  }
  return out;
}

std::string_view method_name(RecoveryMethod m) {
  switch (m) {
    case RecoveryMethod::mmsr: return "mmsr";
    case RecoveryMethod::pca: return "pca";
    case RecoveryMethod::rpca: return "rpca";
  }
  return "unknown";
}

RecoveryMethod parse_method(std::string_view name) {
  for (auto m : {RecoveryMethod::mmsr, RecoveryMethod::pca, RecoveryMethod::rpca})
    if (method_name(m) == name) return m;
  throw InputError("unknown method '" + std::string(name) + "' (expected mmsr, pca or rpca)");
}

TrialOutcome solve_instance(const RecoveryInstance& inst, RecoveryMethod method, double criterion,
                            const RecoverySolverOptions& options, std::uint64_t seed) {
  if (!(criterion > 0)) throw InputError("criterion must be positive");
  TrialOutcome out;
  const auto start = std::chrono::steady_clock::now();
  FactorPair<double> f;
  switch (method) {
    case RecoveryMethod::mmsr: {
      MmsrOptions m = options.mmsr;
      m.F = options.F ? *options.F : entry_corruption_bound(inst.X.rows(), inst.X.cols(), inst.noisy);
      out.F = m.F;
      double fill = 0.0;
      for (const auto& e : inst.X.entries()) fill = std::max(fill, e.value);
      auto v0 = init_row_completion(inst.X, 0, fill, seed);
      f = run_mmsr(inst.X, m, std::move(v0)).factors;
      break;
    }
    case RecoveryMethod::pca: f = pca_baseline(inst.X, options.pca, seed).factors; break;
    case RecoveryMethod::rpca: f = rpca_baseline(inst.X, options.rpca, seed).factors; break;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.error = reconstruct_error(f, inst.truth, false);
  out.recovered = out.error <= criterion;
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, int n, double noise_prob, int trial) {
  return derive_seed(master, static_cast<std::uint64_t>(n), std::bit_cast<std::uint64_t>(noise_prob),
                     static_cast<std::uint64_t>(trial));
}

std::vector<SweepCell> recovery_sweep(const SweepSpec& spec) {
  if (spec.base.trials < 1) throw InputError("trials must be positive");
  std::vector<SweepCell> cells;
  for (int n : spec.dims)
    for (double p : spec.noise_probs) {
      RecoveryConfig config = spec.base;
      config.n = n;
      config.noise_prob = p;
      SweepCell cell{spec.method, n, p, config.trials};
      double seconds = 0.0;
      for (int t = 0; t < config.trials; ++t) {
        const auto seed = trial_seed(config.seed, n, p, t);
        const auto inst = gen_instance(config, seed);
        const auto r = solve_instance(inst, spec.method, config.criterion, spec.solver, derive_seed(seed, 1));
        cell.recovered += r.recovered;
        seconds += r.seconds;
      }
      cell.recovery_rate = static_cast<double>(cell.recovered) / config.trials;
      cell.mean_seconds = seconds / config.trials;
      cells.push_back(cell);
    }
  return cells;
}

}  // namespace mmsr
