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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmsr/crowd.hpp"
#include "mmsr/graph.hpp"
#include "mmsr/observed_matrix.hpp"
#include "mmsr/recovery.hpp"
#include "mmsr/solver.hpp"

// Text formats. Every reader throws InputError with a 1-based line number
// on malformed input. Blank lines and lines starting with '#' are skipped
// in the whitespace formats.
//
//   graph file:   "m n" then one "i j" per edge
//   matrix file:  "m n" then one "i j value" per observed entry
//   vector file:  one value per line
//   labels CSV:   header worker_id,task_id,label
//   truth CSV:    header task_id,label
namespace mmsr {

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

BipartiteGraph read_graph(std::istream& in);
BipartiteGraph read_graph(const std::filesystem::path& path);
void write_graph(std::ostream& out, const BipartiteGraph& g);

ObservedMatrixd read_matrix(std::istream& in);
ObservedMatrixd read_matrix(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const ObservedMatrixd& X);
// Every position of the m x n matrix u v^T.
void write_outer_product(std::ostream& out, const Vector<double>& u, const Vector<double>& v);

void write_vector(std::ostream& out, const Vector<double>& x);
Vector<double> read_vector(std::istream& in);

// Maps external ids to dense indices. If every id is a non-negative
// integer the id is the index; otherwise distinct ids are sorted and
// numbered in that order.
class IdMap {
 public:
  IdMap() = default;
  static IdMap build(const std::vector<std::string>& ids);
  // Index of `id`, or nullopt if unknown.
  std::optional<int> find(std::string_view id) const;
  std::string name(int index) const;
  int size() const { return size_; }
  bool numeric() const { return numeric_; }

 private:
  bool numeric_ = true;
  int size_ = 0;
  std::vector<std::string> names_;
  std::map<std::string, int, std::less<>> lookup_;
};

struct LabelFile {
  LabelSet labels;
  IdMap workers;
  IdMap tasks;
};

// One parsed labels CSV row with its 1-based line number.
struct LabelRow {
  std::string worker;
  std::string task;
  int label = 0;
  int line = 0;
};

// classes > 0 bounds the labels; 0 accepts any non-negative label.
std::vector<LabelRow> read_label_rows(std::istream& in, int classes = 0);
// Builds the id maps and the label set. `extra_tasks` are task ids known
// from elsewhere (a truth file) that get an index even without labels.
// classes = 0 infers max label + 1 (at least 2).
LabelFile assemble_labels(const std::vector<LabelRow>& rows, int classes = 0,
                          const std::vector<std::string>& extra_tasks = {});

LabelFile read_labels(std::istream& in, int classes = 0);
LabelFile read_labels(const std::filesystem::path& path, int classes = 0);
void write_labels(std::ostream& out, const LabelSet& labels);

struct TruthRow {
  std::string task;
  int label = 0;
  int line = 0;
};

std::vector<TruthRow> read_truth_rows(std::istream& in);
// Truth per task index, -1 where there is no entry. Unknown task ids and
// repeated tasks are errors.
std::vector<int> truth_vector(const std::vector<TruthRow>& rows, const IdMap& tasks);

std::vector<int> read_truth(std::istream& in, const IdMap& tasks);
std::vector<int> read_truth(const std::filesystem::path& path, const IdMap& tasks);
void write_truth(std::ostream& out, const std::vector<int>& truth);

void write_predictions(std::ostream& out, const Prediction& p, const IdMap& tasks);
void write_skills(std::ostream& out, const SkillEstimate& s, const IdMap& workers);
void write_id_map(std::ostream& out, const IdMap& ids, std::string_view header);
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

// Opens for writing, creating parent directories; throws InputError if the
// file cannot be opened.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace mmsr
