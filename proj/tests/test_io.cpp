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

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mmsr/errors.hpp"
#include "mmsr/io.hpp"
#include "mmsr/run_result.hpp"

using namespace mmsr;

namespace {

std::string error_of(auto fn) {
  try {
    fn();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("doubles print shortest and round-trip") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(1e-300) == "1e-300");
  for (double x : {1.0 / 3.0, 2.0 / 7.0, 123456.789e10, 5e-324}) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
}

TEST_CASE("graph files round-trip and report bad lines") {
  std::istringstream in("# a comment\n2 3\n\n0 0\n1 2\n0 1\n");
  const auto g = read_graph(in);
  CHECK(g.left_size() == 2);
  CHECK(g.right_size() == 3);
  CHECK(g.edges().size() == 3);
  std::ostringstream out;
  write_graph(out, g);
  std::istringstream back(out.str());
  CHECK(read_graph(back).edges() == g.edges());

  CHECK(error_of([] {
          std::istringstream s("2 2\n0 0\n0 5\n");
          read_graph(s);
        }).find("line 3") != std::string::npos);
  CHECK(error_of([] {
          std::istringstream s("2 2 2\n");
          read_graph(s);
        }).find("line 1") != std::string::npos);
  CHECK_THROWS_AS(
      [] {
        std::istringstream s("");
        read_graph(s);
      }(),
      InputError);
}

TEST_CASE("matrix files round-trip and report bad lines") {
  std::istringstream in("2 2\n0 0 1.5\n1 1 0.25\n");
  const auto X = read_matrix(in);
  CHECK(X.entries().size() == 2);
  std::ostringstream out;
  write_matrix(out, X);
  CHECK(out.str() == "2 2\n0 0 1.5\n1 1 0.25\n");

  CHECK(error_of([] {
          std::istringstream s("2 2\n0 0 1\n0 0 2\n");
          read_matrix(s);
        }).find("line 3") != std::string::npos);
  CHECK(error_of([] {
          std::istringstream s("2 2\n0 0 abc\n");
          read_matrix(s);
        }).find("line 2") != std::string::npos);
  CHECK(error_of([] {
          std::istringstream s("2 2\n# skip\n0 0 1\n2 0 1\n");
          read_matrix(s);
        }).find("line 4") != std::string::npos);
  CHECK(error_of([] {
          std::istringstream s("1 1\n0 0 inf\n");
          read_matrix(s);
        }).find("line 2") != std::string::npos);
}

TEST_CASE("outer product and vectors") {
  Vector<double> u(2), v(2);
  u << 1, 2;
  v << 3, 0.5;
  std::ostringstream out;
  write_outer_product(out, u, v);
  CHECK(out.str() == "2 2\n0 0 3\n0 1 0.5\n1 0 6\n1 1 1\n");
  std::ostringstream vs;
  write_vector(vs, u);
  std::istringstream back(vs.str());
  CHECK(read_vector(back) == u);
}

TEST_CASE("id maps") {
  const auto numeric = IdMap::build({"3", "0", "1"});
  CHECK(numeric.numeric());
  CHECK(numeric.size() == 4);
  CHECK(numeric.find("2") == 2);
  CHECK(!numeric.find("4"));
  CHECK(!numeric.find("x"));
  CHECK(numeric.name(3) == "3");

  const auto named = IdMap::build({"bob", "alice", "bob", "7"});
  CHECK(!named.numeric());
  CHECK(named.size() == 3);
  CHECK(named.find("7") == 0);
  CHECK(named.find("alice") == 1);
  CHECK(named.name(2) == "bob");
  CHECK(!named.find("carol"));

  CHECK(!IdMap::build({"-1"}).numeric());
  CHECK(!IdMap::build({"+1"}).numeric());
}

TEST_CASE("labels CSV") {
  std::istringstream in("worker_id,task_id,label\n0,0,1\n1,0,0\n1,2,1\n");
  const auto file = read_labels(in);
  CHECK(file.labels.workers() == 2);
  CHECK(file.labels.tasks() == 3);
  CHECK(file.labels.classes() == 2);
  CHECK(file.labels.size() == 3);
  std::ostringstream out;
  write_labels(out, file.labels);
  CHECK(out.str() == "worker_id,task_id,label\n0,0,1\n1,0,0\n1,2,1\n");

  std::istringstream named("worker_id,task_id,label\r\nann, q1 ,2\r\nbo,q2,0\r\n");
  const auto n = read_labels(named);
  CHECK(n.labels.classes() == 3);
  CHECK(n.workers.name(0) == "ann");
  CHECK(n.tasks.find("q1") == 0);

  CHECK(error_of([] {
          std::istringstream s("worker,task,label\n");
          read_labels(s);
        }).find("line 1") != std::string::npos);
  CHECK(error_of([] {
          std::istringstream s("worker_id,task_id,label\n0,0,1\n0,1\n");
          read_labels(s);
        }).find("line 3") != std::string::npos);
  CHECK(error_of([] {
          std::istringstream s("worker_id,task_id,label\n0,0,1\n0,0,0\n");
          read_labels(s);
        }).find("line 3") != std::string::npos);
  CHECK(error_of([] {
          std::istringstream s("worker_id,task_id,label\n0,0,2\n");
          read_labels(s, 2);
        }).find("line 2") != std::string::npos);
  CHECK(error_of([] {
          std::istringstream s("worker_id,task_id,label\n0,0,-1\n");
          read_labels(s);
        }).find("line 2") != std::string::npos);
}

TEST_CASE("truth CSV and extra tasks") {
  std::istringstream in("worker_id,task_id,label\n0,0,1\n");
  const auto rows = read_label_rows(in);
  const auto file = assemble_labels(rows, 0, {"3"});
  CHECK(file.labels.tasks() == 4);
  std::istringstream truth_in("task_id,label\n3,1\n0,0\n");
  const auto truth = read_truth(truth_in, file.tasks);
  CHECK(truth == std::vector<int>{0, -1, -1, 1});
  std::ostringstream out;
  write_truth(out, truth);
  CHECK(out.str() == "task_id,label\n0,0\n1,-1\n2,-1\n3,1\n");

  CHECK(error_of([&] {
          std::istringstream s("task_id,label\n9,1\n");
          read_truth(s, file.tasks);
        }).find("line 2") != std::string::npos);
  CHECK(error_of([&] {
          std::istringstream s("task_id,label\n0,1\n0,1\n");
          read_truth(s, file.tasks);
        }).find("line 3") != std::string::npos);
}

TEST_CASE("report writers") {
  const auto tasks = IdMap::build({"a", "b"});
  Prediction p{{1, 0}, {false, true}};
  std::ostringstream out;
  write_predictions(out, p, tasks);
  CHECK(out.str() == "task_id,label\na,1\nb,0\n");

  SkillEstimate s{{0.5}, {0.75}, {1.0986122886681098}, {false}, false};
  std::ostringstream skills;
  write_skills(skills, s, IdMap::build({"0"}));
  CHECK(skills.str() == "worker_id,s,p,weight,flagged\n0,0.5,0.75,1.0986122886681098,0\n");

  std::ostringstream ids;
  write_id_map(ids, tasks, "task_id");
  CHECK(ids.str() == "index,task_id\n0,a\n1,b\n");

  std::ostringstream sweep;
  write_sweep_csv(sweep, {SweepCell{RecoveryMethod::pca, 10, 0.1, 5, 1, 0.2, 0.5}});
  CHECK(sweep.str() == "method,n,noise_prob,trials,recovery_rate,mean_seconds\npca,10,0.1,5,0.2,0.5\n");
}

TEST_CASE("result documents round-trip") {
  RunResult r;
  r.command = "complete";
  r.config = {{"F", 1}, {"seed", 7}, {"tol", 1e-10}};
  r.metric("final_change", 1.0 / 3.0);
  r.metric("bad", std::nan(""));
  r.warnings.push_back("w");
  r.artifacts["u"] = "out/u.txt";
  r.table.push_back({{"n", 10}});
  r.wall_seconds = 0.125;
  CHECK(r.metrics.count("bad") == 0);
  CHECK(r.warnings.size() == 2);

  const auto back = run_result_from_json(nlohmann::json::parse(serialize(r)));
  CHECK(back.schema_version == kRunResultSchema);
  CHECK(back.command == r.command);
  CHECK(back.config == r.config);
  CHECK(back.metrics == r.metrics);
  CHECK(back.warnings == r.warnings);
  CHECK(back.artifacts == r.artifacts);
  CHECK(back.table == r.table);
  CHECK(back.wall_seconds == r.wall_seconds);
  CHECK(serialize(back) == serialize(r));

  auto j = to_json(r);
  j["schema_version"] = 99;
  CHECK_THROWS_AS(run_result_from_json(j), InputError);
  j.erase("schema_version");
  CHECK_THROWS_AS(run_result_from_json(j), InputError);
}
