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
#include "mmsr/random.hpp"
#include "mmsr/solver.hpp"

using namespace mmsr;
using Vec = Vector<double>;
using Entry = ObservedMatrixd::Entry;

namespace {

std::vector<Neighbor<double>> neighbors(std::initializer_list<double> values) {
  std::vector<Neighbor<double>> out;
  int id = 0;
  for (double v : values) out.push_back({id++, v});
  return out;
}

std::vector<double> values_of(const std::vector<Neighbor<double>>& n) {
  std::vector<double> out;
  for (const auto& x : n) out.push_back(x.value);
  return out;
}

ObservedMatrixd rank_one(const Vec& a, const Vec& b, const std::vector<Edge>& omega) {
  std::vector<Entry> entries;
  for (const Edge& e : omega) entries.push_back({e.left, e.right, a[e.left] * b[e.right]});
  return ObservedMatrixd(static_cast<int>(a.size()), static_cast<int>(b.size()), entries);
}

std::vector<Edge> all_pairs(int m, int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) edges.push_back({i, j});
  return edges;
}

// Sort-based restatement of the trim rule.
std::vector<Neighbor<double>> trim_oracle(const std::vector<Neighbor<double>>& values, double own,
                                          int F) {
  std::vector<Neighbor<double>> above, below;
  for (const auto& x : values) {
    if (x.value > own) above.push_back(x);
    if (x.value < own) below.push_back(x);
  }
  std::sort(above.begin(), above.end(), [](const auto& a, const auto& b) {
    return a.value != b.value ? a.value > b.value : a.id < b.id;
  });
  std::sort(below.begin(), below.end(), [](const auto& a, const auto& b) {
    return a.value != b.value ? a.value < b.value : a.id < b.id;
  });
  std::vector<int> drop;
  for (int k = 0; k < std::min<int>(F, above.size()); ++k) drop.push_back(above[k].id);
  for (int k = 0; k < std::min<int>(F, below.size()); ++k) drop.push_back(below[k].id);
  std::vector<Neighbor<double>> kept;
  for (const auto& x : values)
    if (std::find(drop.begin(), drop.end(), x.id) == drop.end()) kept.push_back(x);
  return kept;
}

}  // namespace

TEST_CASE("trim_filter examples") {
  CHECK(values_of(trim_filter(neighbors({9, 5, 3, 1}), 4.0, 1)) == std::vector<double>{5, 3});
  CHECK(values_of(trim_filter(neighbors({6, 7, 8}), 5.0, 2)) == std::vector<double>{6});
  const auto any = neighbors({3, -1, 8, 8, 2});
  CHECK(trim_filter(any, 2.0, 0) == any);
  CHECK(trim_filter(neighbors({1, 9}), 5.0, 1).empty());
  CHECK_THROWS_AS(trim_filter(any, 2.0, -1), InputError);
}

TEST_CASE("trim_filter ties break on the smaller id") {
  const auto kept = trim_filter(neighbors({7, 7, 7, 1}), 2.0, 1);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == 1);
  CHECK(kept[1].id == 2);
}

TEST_CASE("trim_filter matches the sorted restatement and its bounds") {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const int size = static_cast<int>(rng.below(12));
    std::vector<Neighbor<double>> values;
    for (int k = 0; k < size; ++k)
      values.push_back({k, static_cast<double>(rng.below(6))});  // plenty of ties
    const double own = static_cast<double>(rng.below(6));
    const int F = static_cast<int>(rng.below(4));
    const auto kept = trim_filter(values, own, F);
    CHECK(kept == trim_oracle(values, own, F));
    CHECK(values.size() - kept.size() <= static_cast<std::size_t>(2 * F));
    const auto above_before = std::count_if(values.begin(), values.end(),
                                            [&](const auto& x) { return x.value > own; });
    const auto above_after = std::count_if(kept.begin(), kept.end(),
                                           [&](const auto& x) { return x.value > own; });
    CHECK(above_after == std::max<long>(0, above_before - F));
  }
}

TEST_CASE("mmsr_sweep hand-evaluated steps") {
  const auto X = rank_one(Vec::Ones(2), Vec::Ones(2), all_pairs(2, 2));
  FactorPair<double> fixed{Vec::Ones(2), Vec::Ones(2)};
  const auto same = mmsr_sweep(X, fixed, 0);
  CHECK(same.u.isApprox(Vec::Ones(2)));
  CHECK(same.v.isApprox(Vec::Ones(2)));

  FactorPair<double> start{Vec::Ones(2), Vec(2)};
  start.v << 1, 3;
  const auto next = mmsr_sweep(X, start, 0);
  CHECK(next.u[0] == doctest::Approx(2.0 / 3.0));
  CHECK(next.u[1] == doctest::Approx(2.0 / 3.0));
  CHECK(next.v[0] == doctest::Approx(1.5));
  CHECK(next.v[1] == doctest::Approx(1.5));

  Vec a(3), b = Vec::Ones(3);
  a << 1, 2, 3;
  const auto X3 = rank_one(a, b, all_pairs(3, 3));
  const auto one = mmsr_sweep(X3, FactorPair<double>{Vec::Ones(3), b}, 0);
  CHECK((one.u - a).norm() < 1e-14);
  CHECK((one.v - b).norm() < 1e-14);

  FactorPair<double> bad{Vec::Ones(2), Vec::Ones(2)};
  bad.v[1] = 0;
  CHECK_THROWS_AS(mmsr_sweep(X, bad, 0), NumericalError);
}

TEST_CASE("scale family of fixed points") {
  Rng rng(3);
  Vec a(4), b(5);
  for (auto& x : a) x = rng.uniform(0.5, 2);
  for (auto& x : b) x = rng.uniform(0.5, 2);
  const auto X = rank_one(a, b, all_pairs(4, 5));
  for (double k : {0.5, 2.0, 10.0}) {
    for (int F : {0, 1}) {
      const FactorPair<double> scaled{k * a, b / k};
      const auto next = mmsr_sweep(X, scaled, F);
      CHECK((next.u - scaled.u).norm() <= 1e-12 * scaled.u.norm());
      CHECK((next.v - scaled.v).norm() <= 1e-12 * scaled.v.norm());
    }
  }
}

TEST_CASE("run_mmsr converges on uncorrupted data") {
  const auto X = rank_one(Vec::Ones(2), Vec::Ones(2), all_pairs(2, 2));
  MmsrOptions opt;
  opt.tol = 1e-12;
  const auto res = run_mmsr(X, opt, Vec(Vec::Ones(2)));
  CHECK(res.report.converged);
  CHECK(res.report.iterations <= 2);
  CHECK(res.report.final_change <= opt.tol);
  CHECK((res.factors.u * res.factors.v.transpose() - Eigen::MatrixXd::Ones(2, 2)).norm() == 0.0);
}

TEST_CASE("run_mmsr trims a fully corrupted column on K_{5,5}") {
  REQUIRE(is_r_robust(BipartiteGraph(5, 5, all_pairs(5, 5)), 3));
  Rng rng(42);
  Vec a(5), b(5);
  for (auto& x : a) x = rng.uniform(0.5, 2);
  for (auto& x : b) x = rng.uniform(0.5, 2);
  std::vector<Entry> entries;
  for (const Edge& e : all_pairs(5, 5)) {
    const double value = e.right == 2 ? 1e6 * (1 + e.left) : a[e.left] * b[e.right];
    entries.push_back({e.left, e.right, value});
  }
  const ObservedMatrixd X(5, 5, entries);
  MmsrOptions opt;
  opt.F = 1;
  opt.record_history = true;
  GroundTruth<double> truth{a, b, {}, {true, true, false, true, true}};
  const auto res = run_mmsr(X, opt, std::nullopt, &truth);
  CHECK(res.report.converged);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (j == 2) continue;
      const double want = a[i] * b[j];
      CHECK(std::abs(res.factors.u[i] * res.factors.v[j] - want) <= 1e-6 * want);
    }
  CHECK(reconstruct_error(res.factors, truth, true) <= 1e-6);
  // Envelope never widens.
  double hi = res.report.initial_skew->max, lo = res.report.initial_skew->min;
  for (const auto& rec : res.report.history) {
    CHECK(rec.skew->max <= hi * (1 + 1e-12));
    CHECK(rec.skew->min >= lo * (1 - 1e-12));
    hi = rec.skew->max;
    lo = rec.skew->min;
  }
}

TEST_CASE("non-robust graph keeps two value clusters apart") {
  // Two K_{3,3} blocks joined by the edges L0-R3 and L3-R0: every vertex
  // has at most one neighbor outside its block, so neither block is
  // 3-reachable and F = 1 trims the only dissenting ratio.
  std::vector<Edge> edges;
  for (int block = 0; block < 2; ++block)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) edges.push_back({3 * block + i, 3 * block + j});
  edges.push_back({0, 3});
  edges.push_back({3, 0});
  const BipartiteGraph g(6, 6, edges);
  REQUIRE(is_connected(g));
  REQUIRE_FALSE(is_r_robust(g, 3));

  Rng rng(8);
  Vec a(6), b(6);
  for (auto& x : a) x = rng.uniform(0.5, 2);
  for (auto& x : b) x = rng.uniform(0.5, 2);
  const auto X = rank_one(a, b, edges);
  Vec v0(6);
  for (int j = 0; j < 6; ++j) v0[j] = b[j] / (j < 3 ? 2.0 : 1.0);
  MmsrOptions opt;
  opt.F = 1;
  opt.max_iter = 1000;
  opt.record_history = true;
  const GroundTruth<double> truth{a, b, {}, {}};
  const auto res = run_mmsr(X, opt, v0, &truth);
  CHECK(res.report.initial_skew->max - res.report.initial_skew->min == doctest::Approx(1.0));
  for (const auto& rec : res.report.history)
    CHECK(rec.skew->max - rec.skew->min >= (2.0 - 1.0) * (1 - 1e-9));
  CHECK(reconstruct_error(res.factors, truth, false) > 1e-2);
}

TEST_CASE("run_mmsr validation and warnings") {
  std::vector<Entry> entries{{0, 0, 1.0}, {0, 1, -2.0}, {1, 0, 1.0}};
  const ObservedMatrixd X(2, 2, entries);
  try {
    run_mmsr(X, MmsrOptions{});
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
  }

  std::vector<Entry> split{{0, 0, 1.0}, {1, 1, 2.0}};
  const auto res = run_mmsr(ObservedMatrixd(2, 2, split), MmsrOptions{});
  CHECK(res.report.converged);
  CHECK_FALSE(res.report.warnings.empty());

  MmsrOptions bad_tol;
  bad_tol.tol = 0;
  CHECK_THROWS_AS(run_mmsr(ObservedMatrixd(2, 2, split), bad_tol), InputError);
}

TEST_CASE("init_row_completion") {
  Vec a(3), b(4);
  a << 1, 2, 3;
  b << 0.5, 1, 1.5, 2;
  const auto full = rank_one(a, b, all_pairs(3, 4));
  CHECK((init_row_completion(full, 1, 1.0, 9) - 2.0 * b).norm() < 1e-15);

  std::vector<Edge> half{{0, 0}, {0, 2}, {1, 1}};
  const auto X = rank_one(a, b, half);
  const auto v0 = init_row_completion(X, 0, 2.0, 77);
  CHECK(v0 == init_row_completion(X, 0, 2.0, 77));
  CHECK(v0[0] == a[0] * b[0]);
  CHECK(v0[2] == a[0] * b[2]);
  CHECK(v0[1] > 0);
  CHECK(v0[1] <= 2.0);
  CHECK_THROWS_AS(init_row_completion(X, 2, 1.0, 1), InputError);
}

TEST_CASE("skew bounds and reconstruction error") {
  Vec a(2), b(3);
  a << 1.5, 0.7;
  b << 2, 1, 0.25;
  const GroundTruth<double> truth{a, b, {}, {}};
  const auto exact = skew_bounds(FactorPair<double>{a, b}, truth);
  CHECK(exact.min == doctest::Approx(1));
  CHECK(exact.max == doctest::Approx(1));
  const auto scaled = skew_bounds(FactorPair<double>{2 * a, b / 2}, truth);
  CHECK(scaled.min == doctest::Approx(2));
  CHECK(scaled.max == doctest::Approx(2));
  Vec u = a;
  u[1] *= 2;
  const auto mixed = skew_bounds(FactorPair<double>{u, b}, truth);
  CHECK(mixed.min == doctest::Approx(1));
  CHECK(mixed.max == doctest::Approx(2));

  CHECK(reconstruct_error(FactorPair<double>{a, b}, truth, false) == 0.0);
  CHECK(reconstruct_error(FactorPair<double>{2 * a, b}, truth, false) == doctest::Approx(1.0));
  CHECK(reconstruct_error(FactorPair<double>{1.0001 * a, b}, truth, false) ==
        doctest::Approx(1e-4).epsilon(1e-6));
  const GroundTruth<double> zero{Vec::Zero(2), b, {}, {}};
  CHECK_THROWS_AS(reconstruct_error(FactorPair<double>{a, b}, zero, false), InputError);
}
