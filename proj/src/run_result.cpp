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

#include "mmsr/run_result.hpp"

#include <cmath>

#include "mmsr/errors.hpp"

namespace mmsr {

void RunResult::metric(std::string_view name, double value) {
  if (std::isfinite(value))
    metrics[std::string(name)] = value;
  else
    warnings.push_back("metric " + std::string(name) + " is not finite and was omitted");
}

nlohmann::json to_json(const RunResult& r) {
  return {{"schema_version", r.schema_version}, {"command", r.command},     {"config", r.config},
          {"metrics", r.metrics},               {"warnings", r.warnings},   {"artifacts", r.artifacts},
          {"table", r.table},                   {"wall_seconds", r.wall_seconds}};
}

RunResult run_result_from_json(const nlohmann::json& j) {
  try {
    RunResult r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kRunResultSchema)
      throw InputError("unsupported result schema version " + std::to_string(r.schema_version));
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    r.table = j.at("table");
    r.wall_seconds = j.at("wall_seconds").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed result document: ") + e.what());
  }
}

std::string serialize(const RunResult& r) { return to_json(r).dump(2); }

}  // namespace mmsr
