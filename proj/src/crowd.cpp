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

#include "mmsr/crowd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_map>

#include "mmsr/errors.hpp"
#include "mmsr/random.hpp"

namespace mmsr {
namespace {

std::string pair_text(int a, int b) { return "(" + std::to_string(a) + ", " + std::to_string(b) + ")"; }

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError(std::string(what) + " must lie in [0, 1]");
}

int wrong_class(Rng& rng, int truth, int classes) {
  const int w = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes - 1)));
  return w >= truth ? w + 1 : w;
}

}  // namespace

LabelSet::LabelSet(int workers, int tasks, int classes, std::vector<Label> labels)
    : workers_(workers), tasks_(tasks), classes_(classes), labels_(std::move(labels)) {
  if (workers < 0 || tasks < 0) throw InputError("worker and task counts must be non-negative");
  if (classes < 2) throw InputError("need at least two classes");
  for (const auto& l : labels_) {
    if (l.worker < 0 || l.worker >= workers || l.task < 0 || l.task >= tasks)
      throw InputError("label for (worker, task) " + pair_text(l.worker, l.task) + " is out of range");
    if (l.label < 0 || l.label >= classes)
      throw InputError("label " + std::to_string(l.label) + " at (worker, task) " + pair_text(l.worker, l.task) +
                       " is not a class");
  }
  std::sort(labels_.begin(), labels_.end(),
            [](const Label& a, const Label& b) { return std::tie(a.worker, a.task) < std::tie(b.worker, b.task); });
  for (std::size_t k = 1; k < labels_.size(); ++k)
    if (labels_[k].worker == labels_[k - 1].worker && labels_[k].task == labels_[k - 1].task)
      throw InputError("duplicate label for (worker, task) " + pair_text(labels_[k].worker, labels_[k].task));
}

std::vector<int> LabelSet::answered() const {
  std::vector<int> out(workers_, 0);
  for (const auto& l : labels_) ++out[l.worker];
  return out;
}

double accuracy_from_skill(double s, int classes) { return ((classes - 1) * s + 1.0) / classes; }

double skill_from_accuracy(double p, int classes) {
  return static_cast<double>(classes) / (classes - 1) * p - 1.0 / (classes - 1);
}

CrowdSample simulate_singlecoin(const SingleCoinConfig& c, std::uint64_t seed) {
  if (c.classes < 2) throw InputError("need at least two classes");
  if (c.workers < 0 || c.tasks < 0) throw InputError("worker and task counts must be non-negative");
  const double floor = -1.0 / (c.classes - 1);
  if (!(c.skill_lo <= c.skill_hi) || c.skill_lo < floor - 1e-12 || c.skill_hi > 1.0)
    throw InputError("skill interval must satisfy " + std::to_string(floor) + " <= lo <= hi <= 1");
  require_probability(c.obs_sparsity, "obs_sparsity");

  Rng rng(seed);
  CrowdSample out;
  out.truth.resize(c.tasks);
  for (auto& t : out.truth) t = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.classes)));
  if (!c.skills.empty()) {
    if (static_cast<int>(c.skills.size()) != c.workers) throw InputError("fixed skill count does not match workers");
    for (double s : c.skills)
      if (!(s >= floor - 1e-12 && s <= 1.0)) throw InputError("fixed skill " + std::to_string(s) + " is out of range");
    out.skill = c.skills;
  } else {
    out.skill.resize(c.workers);
    for (auto& s : out.skill) s = rng.uniform(c.skill_lo, c.skill_hi);
  }

  std::vector<Label> labels;
  for (int w = 0; w < c.workers; ++w) {
    const double p = accuracy_from_skill(out.skill[w], c.classes);
    for (int t = 0; t < c.tasks; ++t) {
      if (!rng.bernoulli(c.obs_sparsity)) continue;
      const int y = rng.bernoulli(p) ? out.truth[t] : wrong_class(rng, out.truth[t], c.classes);
      labels.push_back({w, t, y});
    }
  }
  out.labels = LabelSet(c.workers, c.tasks, c.classes, std::move(labels));
  return out;
}

AdversaryInjection inject_adversaries(const LabelSet& labels, std::span<const int> truth, const AdversarySpec& spec,
                                      std::uint64_t seed) {
  const int W = labels.workers(), T = labels.tasks(), M = labels.classes();
  if (static_cast<int>(truth.size()) != T) throw InputError("truth length does not match task count");
  if (spec.count < 0 || spec.count > W)
    throw InputError("adversary count " + std::to_string(spec.count) + " exceeds worker count " + std::to_string(W));
  if (spec.count > 0 && (spec.groups < 1 || spec.groups > spec.count))
    throw InputError("adversary groups must lie in [1, count]");
  require_probability(spec.accuracy, "adversary accuracy");
  require_probability(spec.obs_sparsity, "adversary obs_sparsity");
  for (const auto& [src, dst] : spec.colluding_pairs)
    if (src < 0 || src >= spec.groups || dst < 0 || dst >= spec.groups || src == dst)
      throw InputError("colluding pair " + pair_text(src, dst) + " does not name two distinct groups");

  Rng rng(seed);
  std::vector<int> ids(W);
  std::iota(ids.begin(), ids.end(), 0);
  rng.shuffle(ids);
  ids.resize(spec.count);

  AdversaryInjection out;
  out.group.assign(W, -1);
  for (int k = 0; k < spec.count; ++k) out.group[ids[k]] = static_cast<int>(
      static_cast<long long>(k) * spec.groups / spec.count);

  const int groups = spec.count > 0 ? spec.groups : 0;
  const int correct = static_cast<int>(std::lround(spec.accuracy * T));
  std::vector<std::vector<int>> answers(groups, std::vector<int>(T));
  std::vector<int> order(T);
  for (auto& answer : answers) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (int r = 0; r < T; ++r) {
      const int t = order[r];
      answer[t] = r < correct ? truth[t] : wrong_class(rng, truth[t], M);
    }
  }
  for (const auto& [src, dst] : spec.colluding_pairs) answers[dst] = answers[src];

  std::vector<Label> kept;
  for (const auto& l : labels.labels())
    if (out.group[l.worker] < 0) kept.push_back(l);
  out.adversaries = ids;
  std::sort(out.adversaries.begin(), out.adversaries.end());
  for (int w : out.adversaries)
    for (int t = 0; t < T; ++t)
      if (rng.bernoulli(spec.obs_sparsity)) kept.push_back({w, t, answers[out.group[w]][t]});
  out.labels = LabelSet(W, T, M, std::move(kept));
  return out;
}

AgreementMatrix agreement_matrix(const LabelSet& labels, int n_min) {
  const int W = labels.workers();
  std::vector<std::vector<std::pair<int, int>>> by_task(labels.tasks());
  for (const auto& l : labels.labels()) by_task[l.task].push_back({l.worker, l.label});

  std::unordered_map<std::uint64_t, std::pair<int, int>> counts;  // key i*W+j -> (shared, agreed)
  for (const auto& votes : by_task)
    for (std::size_t a = 0; a < votes.size(); ++a)
      for (std::size_t b = a + 1; b < votes.size(); ++b) {
        auto [i, li] = votes[a];
        auto [j, lj] = votes[b];
        if (i > j) std::swap(i, j);
        auto& c = counts[static_cast<std::uint64_t>(i) * W + j];
        ++c.first;
        c.second += li == lj;
      }

  AgreementMatrix out;
  out.workers = W;
  const int need = std::max(n_min, 1);
  for (const auto& [key, c] : counts) {
    if (c.first < need) continue;
    out.pairs.push_back({static_cast<int>(key / W), static_cast<int>(key % W),
                         static_cast<double>(c.second) / c.first, c.first});
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const auto& a, const auto& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return out;
}

ObservedMatrixd c_hat(const AgreementMatrix& agree, int classes, double floor) {
  if (classes < 2) throw InputError("need at least two classes");
  const double scale = static_cast<double>(classes) / (classes - 1), shift = 1.0 / (classes - 1);
  std::vector<ObservedMatrixd::Entry> entries;
  for (const auto& e : agree.pairs) {
    const double v = scale * e.c_tilde - shift;
    if (std::abs(v) < floor) continue;
    entries.push_back({e.i, e.j, v});
    entries.push_back({e.j, e.i, v});
  }
  return ObservedMatrixd(agree.workers, agree.workers, std::move(entries));
}

SkillEstimate finalize_skills(std::vector<double> s, std::span<const int> answered, int classes) {
  if (s.size() != answered.size()) throw InputError("skill and answered-count lengths differ");
  SkillEstimate out;
  const auto W = s.size();
  out.flagged.assign(W, false);
  out.p.resize(W);
  out.weight.resize(W);
  for (std::size_t i = 0; i < W; ++i) {
    const int n = answered[i];
    const double lo = n > 0 ? -1.0 / (classes - 1) + 1.0 / std::sqrt(n) : 0.0;
    const double hi = n > 0 ? 1.0 - 1.0 / std::sqrt(n) : 0.0;
    if (n == 0 || lo > hi || !std::isfinite(s[i])) {
      s[i] = 0.0;
      out.flagged[i] = true;
    } else {
      s[i] = std::clamp(s[i], lo, hi);
    }
    out.p[i] = accuracy_from_skill(s[i], classes);
    out.weight[i] = std::log((classes - 1) * out.p[i] / (1.0 - out.p[i]));
  }
  out.s = std::move(s);
  return out;
}

SkillEstimate estimate_skills(const LabelSet& labels, const SkillOptions& options, SkillDiagnostics* diagnostics) {
  const auto answered = labels.answered();
  return estimate_skills(c_hat(agreement_matrix(labels, options.n_min), labels.classes()), answered,
                         labels.classes(), options, diagnostics);
}

SkillEstimate estimate_skills(const ObservedMatrixd& C, std::span<const int> answered, int classes,
                              const SkillOptions& options, SkillDiagnostics* diagnostics) {
  const int W = C.rows(), M = classes;
  if (C.cols() != W) throw InputError("centered agreement matrix must be square");
  if (static_cast<int>(answered.size()) != W) throw InputError("answered counts do not match workers");

  std::vector<ObservedMatrixd::Entry> magnitude_entries;
  std::vector<SignedEdge> sign_edges;
  for (const auto& e : C.entries()) {
    magnitude_entries.push_back({e.row, e.col, std::abs(e.value)});
    if (e.row < e.col) sign_edges.push_back({e.row, e.col, e.value > 0 ? 1 : -1});
  }
  const ObservedMatrixd magnitude(W, W, std::move(magnitude_entries));
  MmsrOptions mopts = options.mmsr;
  mopts.F = options.F;
  auto solved = run_mmsr(magnitude, mopts);
  auto signs = sign_determination(W, sign_edges, options.spectral);

  std::vector<double> s(W, 0.0), mag(W, 0.0);
  std::vector<bool> isolated(W, false);
  for (int i = 0; i < W; ++i) {
    if (magnitude.graph().left_degree(i) == 0) {
      isolated[i] = true;
      continue;
    }
    mag[i] = std::sqrt(solved.factors.u[i] * solved.factors.v[i]);
    s[i] = signs.sign[i] * mag[i];
  }
  std::vector<double> raw = s;
  auto out = finalize_skills(std::move(s), answered, M);
  for (int i = 0; i < W; ++i)
    if (isolated[i]) {
      out.s[i] = 0.0;
      out.p[i] = 1.0 / M;
      out.weight[i] = 0.0;
      out.flagged[i] = true;
    }
  out.sign_flip_applied = signs.flip_applied;
  if (diagnostics) {
    diagnostics->solve = std::move(solved.report);
    diagnostics->magnitude = std::move(mag);
    diagnostics->raw = std::move(raw);
    diagnostics->signs = std::move(signs);
  }
  return out;
}

Prediction predict_weighted(const LabelSet& labels, std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != labels.workers()) throw InputError("weight count does not match workers");
  for (double w : weights)
    if (!std::isfinite(w)) throw InputError("vote weights must be finite");
  const int T = labels.tasks(), M = labels.classes();
  std::vector<double> score(static_cast<std::size_t>(T) * M, 0.0);
  std::vector<bool> seen(T, false);
  for (const auto& l : labels.labels()) {
    score[static_cast<std::size_t>(l.task) * M + l.label] += weights[l.worker];
    seen[l.task] = true;
  }
  Prediction out;
  out.label.assign(T, 0);
  out.unlabeled.assign(T, false);
  for (int t = 0; t < T; ++t) {
    if (!seen[t]) {
      out.unlabeled[t] = true;
      continue;
    }
    const double* row = &score[static_cast<std::size_t>(t) * M];
    int best = 0;
    for (int c = 1; c < M; ++c)
      if (row[c] > row[best]) best = c;
    out.label[t] = best;
  }
  return out;
}

Prediction predict_weighted(const LabelSet& labels, const SkillEstimate& skills) {
  return predict_weighted(labels, skills.weight);
}

Prediction predict_majority(const LabelSet& labels) {
  const std::vector<double> ones(labels.workers(), 1.0);
  return predict_weighted(labels, ones);
}

double pgd_objective(const AgreementMatrix& agree, int classes, std::span<const double> x) {
  const double scale = static_cast<double>(classes) / (classes - 1), shift = 1.0 / (classes - 1);
  double f = 0.0;
  for (const auto& e : agree.pairs) {
    const double r = scale * e.c_tilde - shift - x[e.i] * x[e.j];
    f += 0.5 * e.shared * r * r;
  }
  return f;
}

std::vector<double> pgd_skills(const AgreementMatrix& agree, int classes, const PgdOptions& options) {
  if (classes < 2) throw InputError("need at least two classes");
  const int W = agree.workers;
  std::vector<double> x = options.x0.empty() ? std::vector<double>(W, 0.5) : options.x0;
  if (static_cast<int>(x.size()) != W) throw InputError("x0 length does not match worker count");
  if (options.iters < 0) throw InputError("iteration count must be non-negative");

  double step = options.step;
  if (step == 0.0) {
    std::vector<double> mass(W, 0.0);
    for (const auto& e : agree.pairs) {
      mass[e.i] += e.shared;
      mass[e.j] += e.shared;
    }
    const double peak = W > 0 ? *std::max_element(mass.begin(), mass.end()) : 0.0;
    step = peak > 0 ? 1.0 / (2.0 * peak) : 1.0;
  }
  if (!(step > 0)) throw InputError("step must be positive");

  const double scale = static_cast<double>(classes) / (classes - 1), shift = 1.0 / (classes - 1);
  std::vector<double> grad(W);
  for (int it = 0; it < options.iters; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& e : agree.pairs) {
      const double r = e.shared * (x[e.i] * x[e.j] - (scale * e.c_tilde - shift));
      grad[e.i] += r * x[e.j];
      grad[e.j] += r * x[e.i];
    }
    for (int i = 0; i < W; ++i) x[i] = std::clamp(x[i] - step * grad[i], -1.0, 1.0);
    const double f = pgd_objective(agree, classes, x);
    if (!(f <= 1e12)) throw NumericalError("pgd diverged at iteration " + std::to_string(it));
  }
  return x;
}

double prediction_error(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw InputError("prediction and truth lengths differ");
  if (truth.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) wrong += predicted[t] != truth[t];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

CrowdCorpus generate_crowd(const CrowdScenario& scenario, std::uint64_t seed) {
  auto sample = simulate_singlecoin(scenario.crowd, derive_seed(seed, 1));
  CrowdCorpus out{std::move(sample.labels), std::move(sample.truth), std::move(sample.skill), {}, {}};
  out.group.assign(out.labels.workers(), -1);
  if (scenario.adversary.count > 0) {
    auto injected = inject_adversaries(out.labels, out.truth, scenario.adversary, derive_seed(seed, 2));
    out.labels = std::move(injected.labels);
    out.adversaries = std::move(injected.adversaries);
    out.group = std::move(injected.group);
  }
  return out;
}

CrowdTrial run_crowd_trial(const CrowdScenario& scenario, std::uint64_t seed) {
  auto corpus = generate_crowd(scenario, seed);
  const LabelSet& labels = corpus.labels;
  const auto& truth = corpus.truth;
  CrowdTrial out;
  out.adversaries = std::move(corpus.adversaries);
  const int M = labels.classes();

  SkillDiagnostics diag;
  const auto skills = estimate_skills(labels, scenario.skills, &diag);
  out.mmsr_skill = skills.s;
  out.warnings = diag.solve.warnings;
  out.mmsr_error = prediction_error(predict_weighted(labels, skills).label, truth);
  out.majority_error = prediction_error(predict_majority(labels).label, truth);

  const auto agree = agreement_matrix(labels);
  const auto pgd = finalize_skills(pgd_skills(agree, M, scenario.pgd), labels.answered(), M);
  out.pgd_error = prediction_error(predict_weighted(labels, pgd).label, truth);
  return out;
}

}  // namespace mmsr
