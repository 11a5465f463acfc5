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

#include "mmsr/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "mmsr/errors.hpp"
#include "mmsr/io.hpp"
#include "mmsr/random.hpp"
#include "mmsr/solver.hpp"

namespace mmsr {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Writes <out>/<file> through `fill` and records it as an artifact.
template <typename Fill>
void emit(RunResult& result, const std::string& out, const std::string& file, Fill fill) {
  const auto path = std::filesystem::path(out) / file;
  auto stream = open_output(path);
  fill(stream);
  stream.close();
  if (!stream) throw InputError("failed writing '" + path.string() + "'");
  result.artifacts[std::filesystem::path(file).stem().string()] = path.string();
}

json mmsr_options_json(const MmsrOptions& o) {
  return {{"F", o.F}, {"max_iter", o.max_iter}, {"tol", o.tol}};
}

double sample_std(const std::vector<double>& x, double mean) {
  if (x.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

int as_int(const std::string& key, double value) {
  if (value != std::floor(value) || std::abs(value) > 1e9)
    throw InputError("sweep value " + format_double(value) + " for '" + key + "' is not an integer");
  return static_cast<int>(value);
}

}  // namespace

RunResult cmd_complete(const CompleteOptions& o) {
  const auto start = Clock::now();
  RunResult result;
  result.command = "complete";
  result.config = {{"matrix", o.matrix},     {"F", o.F},           {"max-iter", o.max_iter},
                   {"tol", o.tol},           {"init", o.init},     {"init-row", o.init_row},
                   {"init-fill", o.init_fill}, {"seed", o.seed},   {"out", o.out}};
  if (o.init != "ones" && o.init != "row") throw InputError("init must be 'ones' or 'row', got '" + o.init + "'");

  const auto X = read_matrix(std::filesystem::path(o.matrix));
  MmsrOptions options;
  options.F = o.F;
  options.max_iter = o.max_iter;
  options.tol = o.tol;
  std::optional<Vector<double>> v0;
  if (o.init == "row") v0 = init_row_completion(X, o.init_row, o.init_fill, o.seed);
  const auto solved = run_mmsr(X, options, v0);
  const auto& report = solved.report;

  result.metric("rows", X.rows());
  result.metric("cols", X.cols());
  result.metric("observed", static_cast<double>(X.entries().size()));
  result.metric("iterations", report.iterations);
  result.metric("converged", report.converged ? 1.0 : 0.0);
  result.metric("final_change", report.final_change);
  result.metric("over_trimmed", static_cast<double>(report.stats.over_trimmed));
  result.metric("single_retained", static_cast<double>(report.stats.single_retained));
  result.warnings = report.warnings;
  if (!report.converged)
    result.warnings.push_back("did not reach tol " + format_double(o.tol) + " in " + std::to_string(o.max_iter) +
                              " sweeps");

  if (!o.out.empty()) {
    emit(result, o.out, "u.txt", [&](std::ostream& s) { write_vector(s, solved.factors.u); });
    emit(result, o.out, "v.txt", [&](std::ostream& s) { write_vector(s, solved.factors.v); });
    emit(result, o.out, "reconstruction.txt",
         [&](std::ostream& s) { write_outer_product(s, solved.factors.u, solved.factors.v); });
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

RunResult cmd_robustness(const RobustnessOptions& o) {
  const auto start = Clock::now();
  RunResult result;
  result.command = "robustness";
  result.config = {{"graph", o.graph}, {"r", o.r}, {"vertex-limit", o.vertex_limit}, {"seed", o.seed}};
  if (o.r < 0) throw InputError("r must be non-negative");

  const auto g = read_graph(std::filesystem::path(o.graph));
  const auto witness = find_robustness_witness(g, o.r, o.vertex_limit);
  result.metric("vertices", g.vertex_count());
  result.metric("edges", static_cast<double>(g.edges().size()));
  result.metric("robust", witness ? 0.0 : 1.0);
  result.metric("vertex_connectivity", vertex_connectivity(g, o.vertex_limit));
  if (witness) {
    result.table.push_back({{"set", "first"}, {"left", witness->first.left}, {"right", witness->first.right}});
    result.table.push_back({{"set", "second"}, {"left", witness->second.left}, {"right", witness->second.right}});
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

const std::vector<std::string>& crowd_sweep_keys() {
  static const std::vector<std::string> keys{
      "workers",    "tasks",  "classes",           "skill-lo",           "skill-hi", "obs-sparsity",
      "adversaries", "groups", "adversary-accuracy", "adversary-sparsity", "F",        "n-min"};
  return keys;
}

void set_crowd_parameter(CrowdScenario& s, const std::string& key, double value) {
  if (key == "workers") s.crowd.workers = as_int(key, value);
  else if (key == "tasks") s.crowd.tasks = as_int(key, value);
  else if (key == "classes") s.crowd.classes = as_int(key, value);
  else if (key == "skill-lo") s.crowd.skill_lo = value;
  else if (key == "skill-hi") s.crowd.skill_hi = value;
  else if (key == "obs-sparsity") s.crowd.obs_sparsity = value;
  else if (key == "adversaries") s.adversary.count = as_int(key, value);
  else if (key == "groups") s.adversary.groups = as_int(key, value);
  else if (key == "adversary-accuracy") s.adversary.accuracy = value;
  else if (key == "adversary-sparsity") s.adversary.obs_sparsity = value;
  else if (key == "F") s.skills.F = as_int(key, value);
  else if (key == "n-min") s.skills.n_min = as_int(key, value);
  else throw InputError("unknown sweep key '" + key + "'");
}

RunResult cmd_crowd_sim(const CrowdSimOptions& o) {
  const auto start = Clock::now();
  const auto& sc = o.scenario;
  RunResult result;
  result.command = "crowd-sim";
  result.config = {{"workers", sc.crowd.workers},
                   {"tasks", sc.crowd.tasks},
                   {"classes", sc.crowd.classes},
                   {"skill-lo", sc.crowd.skill_lo},
                   {"skill-hi", sc.crowd.skill_hi},
                   {"obs-sparsity", sc.crowd.obs_sparsity},
                   {"adversaries", sc.adversary.count},
                   {"groups", sc.adversary.groups},
                   {"adversary-accuracy", sc.adversary.accuracy},
                   {"adversary-sparsity", sc.adversary.obs_sparsity},
                   {"F", sc.skills.F},
                   {"n-min", sc.skills.n_min},
                   {"repeats", o.repeats},
                   {"seed", o.seed},
                   {"sweep-key", o.sweep_key},
                   {"sweep-values", o.sweep_values},
                   {"out", o.out},
                   {"fixed",
                    {{"mmsr", mmsr_options_json(sc.skills.mmsr)},
                     {"spectral_tol", sc.skills.spectral.tol},
                     {"pgd_iters", sc.pgd.iters},
                     {"pgd_step", sc.pgd.step},
                     {"pgd_n_min", 1}}}};
  if (o.repeats < 1) throw InputError("repeats must be positive");
  if (o.sweep_key.empty() != o.sweep_values.empty())
    throw InputError("sweep-key and sweep-values must be given together");

  std::vector<std::optional<double>> settings;
  if (o.sweep_key.empty()) settings.push_back(std::nullopt);
  for (double v : o.sweep_values) settings.emplace_back(v);

  std::vector<std::vector<double>> per_method(3);
  bool first = true;
  for (const auto& value : settings) {
    CrowdScenario scenario = sc;
    if (value) set_crowd_parameter(scenario, o.sweep_key, *value);
    auto& adv = scenario.adversary;
    if (adv.count > 0 && adv.groups > adv.count) {
      result.warnings.push_back("adversaries " + std::to_string(adv.count) + " < groups " +
                                std::to_string(adv.groups) + "; using one group per adversary");
      adv.groups = adv.count;
    }
    for (auto& m : per_method) m.clear();
    for (int r = 0; r < o.repeats; ++r) {
      const auto trial = run_crowd_trial(scenario, derive_seed(o.seed, static_cast<std::uint64_t>(r)));
      per_method[0].push_back(trial.mmsr_error);
      per_method[1].push_back(trial.majority_error);
      per_method[2].push_back(trial.pgd_error);
      if (r == 0)
        for (const auto& w : trial.warnings)
          result.warnings.push_back((value ? o.sweep_key + "=" + format_double(*value) + ": " : "") + w);
    }
    static const char* names[] = {"mmsr", "mv", "pgd"};
    for (int m = 0; m < 3; ++m) {
      const auto& x = per_method[m];
      double mean = 0.0;
      for (double e : x) mean += e;
      mean /= static_cast<double>(x.size());
      const double sd = sample_std(x, mean);
      json row = {{"parameter", value ? o.sweep_key : "none"},
                  {"value", value ? json(*value) : json(nullptr)},
                  {"method", names[m]},
                  {"repeats", o.repeats},
                  {"mean_error", mean},
                  {"std_error", sd}};
      result.table.push_back(row);
      if (!value) {
        result.metric(std::string(names[m]) + "_error_mean", mean);
        result.metric(std::string(names[m]) + "_error_std", sd);
      }
    }
    if (first && !o.out.empty()) {
      const auto corpus = generate_crowd(scenario, derive_seed(o.seed, 0));
      emit(result, o.out, "labels.csv", [&](std::ostream& s) { write_labels(s, corpus.labels); });
      emit(result, o.out, "truth.csv", [&](std::ostream& s) { write_truth(s, corpus.truth); });
      emit(result, o.out, "adversaries.csv", [&](std::ostream& s) {
        s << "worker_id,group\n";
        for (int w : corpus.adversaries) s << w << ',' << corpus.group[w] << '\n';
      });
    }
    first = false;
  }
  result.metric("settings", static_cast<double>(settings.size()));
  if (!o.out.empty()) {
    emit(result, o.out, "sweep.csv", [&](std::ostream& s) {
      s << "parameter,value,method,repeats,mean_error,std_error\n";
      for (const auto& row : result.table)
        s << row["parameter"].get<std::string>() << ','
          << (row["value"].is_null() ? std::string() : format_double(row["value"].get<double>())) << ','
          << row["method"].get<std::string>() << ',' << row["repeats"].get<int>() << ','
          << format_double(row["mean_error"].get<double>()) << ',' << format_double(row["std_error"].get<double>())
          << '\n';
    });
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

RunResult cmd_crowd_predict(const CrowdPredictOptions& o) {
  const auto start = Clock::now();
  RunResult result;
  result.command = "crowd-predict";
  SkillOptions skills;
  skills.F = o.F;
  skills.n_min = o.n_min;
  result.config = {{"labels", o.labels}, {"truth", o.truth}, {"classes", o.classes}, {"F", o.F},
                   {"n-min", o.n_min},   {"seed", o.seed},   {"out", o.out},
                   {"fixed", {{"mmsr", mmsr_options_json(skills.mmsr)}, {"spectral_tol", skills.spectral.tol}}}};
  if (o.F < 0) throw InputError("F must be non-negative");
  if (o.n_min < 1) throw InputError("n-min must be positive");

  std::ifstream label_stream(o.labels);
  if (!label_stream) throw InputError("cannot open '" + o.labels + "'");
  const auto rows = read_label_rows(label_stream, o.classes);

  std::optional<std::vector<TruthRow>> truth_rows;
  if (!o.truth.empty()) {
    std::ifstream truth_stream(o.truth);
    if (truth_stream)
      truth_rows = read_truth_rows(truth_stream);
    else
      result.warnings.push_back("truth file '" + o.truth + "' not found; prediction_error omitted");
  }
  std::vector<std::string> truth_tasks;
  if (truth_rows)
    for (const auto& r : *truth_rows) truth_tasks.push_back(r.task);
  const auto file = assemble_labels(rows, o.classes, truth_tasks);
  const auto& labels = file.labels;

  SkillDiagnostics diag;
  const auto estimate = estimate_skills(labels, skills, &diag);
  const auto predicted = predict_weighted(labels, estimate);
  for (const auto& w : diag.solve.warnings) result.warnings.push_back(w);

  int flagged = 0;
  for (bool f : estimate.flagged) flagged += f;
  int unlabeled = 0;
  for (bool u : predicted.unlabeled) unlabeled += u;
  result.metric("workers", labels.workers());
  result.metric("tasks", labels.tasks());
  result.metric("classes", labels.classes());
  result.metric("labels", static_cast<double>(labels.size()));
  result.metric("flagged_workers", flagged);
  result.metric("unlabeled_tasks", unlabeled);
  result.metric("sign_flip_applied", estimate.sign_flip_applied ? 1.0 : 0.0);
  result.metric("mmsr_iterations", diag.solve.iterations);

  if (truth_rows) {
    const auto truth = truth_vector(*truth_rows, file.tasks);
    std::vector<int> got, want, majority_got;
    const auto majority = predict_majority(labels);
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (truth[t] < 0) continue;
      want.push_back(truth[t]);
      got.push_back(predicted.label[t]);
      majority_got.push_back(majority.label[t]);
    }
    result.metric("truth_tasks", static_cast<double>(want.size()));
    if (want.size() < truth.size())
      result.warnings.push_back(std::to_string(truth.size() - want.size()) + " tasks have no truth entry");
    result.metric("prediction_error", prediction_error(got, want));
    result.metric("majority_error", prediction_error(majority_got, want));
  }

  if (!o.out.empty()) {
    emit(result, o.out, "predictions.csv", [&](std::ostream& s) { write_predictions(s, predicted, file.tasks); });
    emit(result, o.out, "skills.csv", [&](std::ostream& s) { write_skills(s, estimate, file.workers); });
    if (!file.workers.numeric())
      emit(result, o.out, "workers.csv", [&](std::ostream& s) { write_id_map(s, file.workers, "worker_id"); });
    if (!file.tasks.numeric())
      emit(result, o.out, "tasks.csv", [&](std::ostream& s) { write_id_map(s, file.tasks, "task_id"); });
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

RunResult cmd_recovery_sweep(const RecoverySweepOptions& o) {
  const auto start = Clock::now();
  RunResult result;
  result.command = "recovery-sweep";
  RecoverySolverOptions solver;
  solver.F = o.F;
  result.config = {{"dims", o.dims},
                   {"noise-probs", o.noise_probs},
                   {"trials", o.trials},
                   {"methods", o.methods},
                   {"entry-lo", o.entry_lo},
                   {"entry-hi", o.entry_hi},
                   {"noise-value", o.noise_value},
                   {"criterion", o.criterion},
                   {"F", o.F ? json(*o.F) : json("auto")},
                   {"seed", o.seed},
                   {"out", o.out},
                   {"fixed",
                    {{"mmsr", mmsr_options_json(solver.mmsr)},
                     {"pca_step_scale", solver.pca.step_scale},
                     {"pca_iters", solver.pca.iters},
                     {"rpca_alpha", solver.rpca.alpha},
                     {"rpca_c_scale", solver.rpca.c_scale},
                     {"rpca_decay", solver.rpca.decay},
                     {"rpca_iters", solver.rpca.iters}}}};
  if (o.methods.empty()) throw InputError("methods must not be empty");
  std::vector<RecoveryMethod> methods;
  for (const auto& name : o.methods) methods.push_back(parse_method(name));
  std::sort(methods.begin(), methods.end(),
            [](RecoveryMethod a, RecoveryMethod b) { return method_name(a) < method_name(b); });
  if (std::adjacent_find(methods.begin(), methods.end()) != methods.end())
    throw InputError("a method is listed twice");

  std::vector<SweepCell> cells;
  for (auto method : methods) {
    SweepSpec spec;
    spec.dims = o.dims;
    spec.noise_probs = o.noise_probs;
    spec.method = method;
    spec.base.entry_lo = o.entry_lo;
    spec.base.entry_hi = o.entry_hi;
    spec.base.noise_value = o.noise_value;
    spec.base.trials = o.trials;
    spec.base.criterion = o.criterion;
    spec.base.seed = o.seed;
    spec.solver = solver;
    auto part = recovery_sweep(spec);
    std::sort(part.begin(), part.end(), [](const SweepCell& a, const SweepCell& b) {
      return a.n != b.n ? a.n < b.n : a.noise_prob < b.noise_prob;
    });
    double rate = 0.0;
    for (const auto& c : part) rate += c.recovery_rate;
    if (!part.empty()) result.metric(std::string(method_name(method)) + "_mean_rate", rate / part.size());
    cells.insert(cells.end(), part.begin(), part.end());
  }
  for (const auto& c : cells)
    result.table.push_back({{"method", method_name(c.method)},
                            {"n", c.n},
                            {"noise_prob", c.noise_prob},
                            {"trials", c.trials},
                            {"recovered", c.recovered},
                            {"recovery_rate", c.recovery_rate},
                            {"mean_seconds", c.mean_seconds}});
  result.metric("cells", static_cast<double>(cells.size()));
  if (!o.out.empty()) emit(result, o.out, "sweep.csv", [&](std::ostream& s) { write_sweep_csv(s, cells); });
  result.wall_seconds = seconds_since(start);
  return result;
}

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return 0;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const CapabilityError& e) {
    err << "capability error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mmsr
