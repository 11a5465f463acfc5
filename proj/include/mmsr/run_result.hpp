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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

// Machine-readable record of one CLI run. Serialized as a JSON object:
//
//   schema_version  integer, currently 1
//   command         subcommand name
//   config          every resolved parameter, defaults and seed included
//   metrics         name -> finite number
//   warnings        list of strings
//   artifacts       name -> written file path
//   table           list of row objects (sweep cells, witness sets)
//   wall_seconds    elapsed time of the command
namespace mmsr {

inline constexpr int kRunResultSchema = 1;

struct RunResult {
  int schema_version = kRunResultSchema;
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, double> metrics;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> artifacts;
  nlohmann::json table = nlohmann::json::array();
  double wall_seconds = 0.0;

  // Records a metric; a non-finite value is replaced by a warning.
  void metric(std::string_view name, double value);
};

nlohmann::json to_json(const RunResult& r);
// Throws InputError on a missing field or an unsupported schema version.
RunResult run_result_from_json(const nlohmann::json& j);
std::string serialize(const RunResult& r);

}  // namespace mmsr
