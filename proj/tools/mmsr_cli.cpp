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
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmsr/commands.hpp"
#include "mmsr/errors.hpp"
#include "mmsr/io.hpp"

namespace {

using nlohmann::json;

// Per-subcommand state shared by every command.
struct Command {
  CLI::App* app = nullptr;
  std::string config;
  std::string result;
  std::function<mmsr::RunResult()> run;
};

std::string config_text(const json& value) { return value.is_string() ? value.get<std::string>() : value.dump(); }

// Applies a flat JSON config to options the command line left unset. A
// RunResult document is accepted too; its config object is used and the
// "fixed" block is ignored.
void apply_config(const Command& cmd) {
  std::ifstream in(cmd.config);
  if (!in) throw mmsr::InputError("cannot open config '" + cmd.config + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw mmsr::InputError("config '" + cmd.config + "': " + e.what());
  }
  if (doc.is_object() && doc.contains("schema_version") && doc.contains("config")) doc = doc["config"];
  if (!doc.is_object()) throw mmsr::InputError("config '" + cmd.config + "' must be a JSON object");
  for (const auto& [raw_key, value] : doc.items()) {
    if (raw_key == "fixed") continue;
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config" || key == "result") throw mmsr::InputError("config key '" + raw_key + "' is not allowed");
    auto* option = cmd.app->get_option_no_throw("--" + key);
    if (!option) throw mmsr::InputError("unknown config key '" + raw_key + "' for " + cmd.app->get_name());
    if (option->count() > 0) continue;  // the command line wins
    if (value.is_null() || (value.is_string() && value.get<std::string>().empty()) ||
        (value.is_array() && value.empty()))
      continue;
    option->clear();
    if (value.is_array())
      for (const auto& item : value) option->add_result(config_text(item));
    else
      option->add_result(config_text(value));
    try {
      option->run_callback();
    } catch (const CLI::ParseError& e) {
      throw mmsr::InputError("config key '" + raw_key + "': " + e.what());
    }
  }
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw mmsr::InputError(std::string("missing ") + flag);
}

Command& add_command(std::vector<std::unique_ptr<Command>>& all, CLI::App& app, const char* name,
                     const char* description) {
  auto cmd = std::make_unique<Command>();
  cmd->app = app.add_subcommand(name, description);
  cmd->app->add_option("--config", cmd->config, "JSON file of flag values; flags given here override it");
  cmd->app->add_option("--result", cmd->result, "Also write the result document to this file");
  all.push_back(std::move(cmd));
  return *all.back();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust rank-one matrix completion, graph robustness and crowdsourcing tools"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;

  mmsr::CompleteOptions complete;
  {
    auto& cmd = add_command(commands, app, "complete", "Complete a positive rank-one matrix with M-MSR");
    auto* a = cmd.app;
    a->add_option("--matrix", complete.matrix, "Matrix file: 'm n' then 'i j value' lines");
    a->add_option("--F", complete.F, "Trim parameter")->check(CLI::NonNegativeNumber);
    a->add_option("--max-iter", complete.max_iter, "Sweep cap")->check(CLI::NonNegativeNumber);
    a->add_option("--tol", complete.tol, "Stop when the largest relative change falls to this")
        ->check(CLI::PositiveNumber);
    a->add_option("--init", complete.init, "Starting v: ones or row")->check(CLI::IsMember({"ones", "row"}));
    a->add_option("--init-row", complete.init_row, "Row copied into v under --init row");
    a->add_option("--init-fill", complete.init_fill, "Upper bound of random v for unobserved columns")
        ->check(CLI::PositiveNumber);
    a->add_option("--seed", complete.seed, "Random seed");
    a->add_option("--out", complete.out, "Directory for u.txt, v.txt, reconstruction.txt");
    cmd.run = [&] {
      require(complete.matrix, "--matrix");
      return mmsr::cmd_complete(complete);
    };
  }

  mmsr::RobustnessOptions robust;
  {
    auto& cmd = add_command(commands, app, "robustness", "Exhaustive r-robustness and vertex connectivity");
    auto* a = cmd.app;
    a->add_option("--graph", robust.graph, "Graph file: 'm n' then 'i j' lines");
    a->add_option("--r", robust.r, "Robustness order")->check(CLI::NonNegativeNumber);
    a->add_option("--vertex-limit", robust.vertex_limit, "Largest m + n searched exhaustively")
        ->check(CLI::PositiveNumber);
    a->add_option("--seed", robust.seed, "Random seed (unused; echoed)");
    cmd.run = [&] {
      require(robust.graph, "--graph");
      return mmsr::cmd_robustness(robust);
    };
  }

  mmsr::CrowdSimOptions sim;
  {
    auto& cmd = add_command(commands, app, "crowd-sim", "Simulated crowdsourcing with adversaries");
    auto* a = cmd.app;
    auto& s = sim.scenario;
    a->add_option("--workers", s.crowd.workers, "Honest pool size")->check(CLI::PositiveNumber);
    a->add_option("--tasks", s.crowd.tasks, "Task count")->check(CLI::PositiveNumber);
    a->add_option("--classes", s.crowd.classes, "Label classes")->check(CLI::Range(2, 1000));
    a->add_option("--skill-lo", s.crowd.skill_lo, "Lower end of the skill interval");
    a->add_option("--skill-hi", s.crowd.skill_hi, "Upper end of the skill interval");
    a->add_option("--obs-sparsity", s.crowd.obs_sparsity, "Chance an honest worker answers a task")
        ->check(CLI::Range(0.0, 1.0));
    a->add_option("--adversaries", s.adversary.count, "Workers replaced by adversaries")
        ->check(CLI::NonNegativeNumber);
    a->add_option("--groups", s.adversary.groups, "Adversary groups")->check(CLI::PositiveNumber);
    a->add_option("--adversary-accuracy", s.adversary.accuracy, "Fraction of tasks a group answers correctly")
        ->check(CLI::Range(0.0, 1.0));
    a->add_option("--adversary-sparsity", s.adversary.obs_sparsity, "Chance an adversary answers a task")
        ->check(CLI::Range(0.0, 1.0));
    a->add_option("--F", s.skills.F, "Trim parameter of the skill solve")->check(CLI::NonNegativeNumber);
    a->add_option("--n-min", s.skills.n_min, "Shared tasks needed to observe a worker pair")
        ->check(CLI::PositiveNumber);
    a->add_option("--repeats", sim.repeats, "Seeds averaged per setting")->check(CLI::PositiveNumber);
    a->add_option("--seed", sim.seed, "Master seed");
    a->add_option("--sweep-key", sim.sweep_key, "Parameter to sweep")->check(CLI::IsMember(mmsr::crowd_sweep_keys()));
    a->add_option("--sweep-values", sim.sweep_values, "Values of the swept parameter");
    a->add_option("--out", sim.out, "Directory for sweep.csv and the first corpus");
    cmd.run = [&] { return mmsr::cmd_crowd_sim(sim); };
  }

  mmsr::CrowdPredictOptions predict;
  {
    auto& cmd = add_command(commands, app, "crowd-predict", "Aggregate a labels CSV");
    auto* a = cmd.app;
    a->add_option("--labels", predict.labels, "CSV with header worker_id,task_id,label");
    a->add_option("--truth", predict.truth, "Optional CSV with header task_id,label");
    a->add_option("--classes", predict.classes, "Label classes; 0 infers")->check(CLI::NonNegativeNumber);
    a->add_option("--F", predict.F, "Trim parameter")->check(CLI::NonNegativeNumber);
    a->add_option("--n-min", predict.n_min, "Shared tasks needed to observe a worker pair")
        ->check(CLI::PositiveNumber);
    a->add_option("--seed", predict.seed, "Random seed (the pipeline is deterministic; echoed)");
    a->add_option("--out", predict.out, "Directory for predictions.csv and skills.csv");
    cmd.run = [&] {
      require(predict.labels, "--labels");
      return mmsr::cmd_crowd_predict(predict);
    };
  }

  mmsr::RecoverySweepOptions sweep;
  std::string sweep_F = "auto";
  {
    auto& cmd = add_command(commands, app, "recovery-sweep", "Exact recovery rates under sparse large noise");
    auto* a = cmd.app;
    a->add_option("--dims", sweep.dims, "Matrix sizes n")->check(CLI::PositiveNumber);
    a->add_option("--noise-probs", sweep.noise_probs, "Noise probabilities")->check(CLI::Range(0.0, 1.0));
    a->add_option("--trials", sweep.trials, "Trials per cell")->check(CLI::PositiveNumber);
    a->add_option("--methods", sweep.methods, "Any of mmsr, pca, rpca")
        ->check(CLI::IsMember({"mmsr", "pca", "rpca"}));
    a->add_option("--entry-lo", sweep.entry_lo, "Factor entries are drawn from (lo, hi]");
    a->add_option("--entry-hi", sweep.entry_hi, "Factor entries are drawn from (lo, hi]");
    a->add_option("--noise-value", sweep.noise_value, "Value written into noisy entries");
    a->add_option("--criterion", sweep.criterion, "Relative Frobenius error counted as recovered")
        ->check(CLI::PositiveNumber);
    a->add_option("--F", sweep_F, "M-MSR trim parameter or 'auto' for the planted bound");
    a->add_option("--seed", sweep.seed, "Master seed");
    a->add_option("--out", sweep.out, "Directory for sweep.csv");
    cmd.run = [&] {
      if (sweep_F != "auto") {
        try {
          std::size_t used = 0;
          const int F = std::stoi(sweep_F, &used);
          if (used != sweep_F.size() || F < 0) throw std::invalid_argument("F");
          sweep.F = F;
        } catch (const std::logic_error&) {
          throw mmsr::InputError("--F must be 'auto' or a non-negative integer, got '" + sweep_F + "'");
        }
      }
      return mmsr::cmd_recovery_sweep(sweep);
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& cmd : commands) {
    if (!cmd->app->parsed()) continue;
    return mmsr::run_guarded(
        [&] {
          if (!cmd->config.empty()) apply_config(*cmd);
          const auto result = cmd->run();
          const auto text = mmsr::serialize(result);
          if (!cmd->result.empty()) {
            auto out = mmsr::open_output(cmd->result);
            out << text << '\n';
          }
          std::cout << text << '\n';
        },
        std::cerr);
  }
  return 2;
}
