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

#include "mmsr/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "mmsr/errors.hpp"

namespace mmsr {
namespace {

constexpr long long kMaxNumericId = 1'000'000;

[[noreturn]] void fail(int line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    const std::size_t start = k;
    while (k < s.size() && !std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    if (k > start) out.push_back(s.substr(start, k - start));
  }
  return out;
}

std::vector<std::string_view> split_csv(std::string_view s) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view tok) {
  T value{};
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

int parse_int(std::string_view tok, int line, const char* what) {
  const auto v = parse_number<int>(tok);
  if (!v) fail(line, std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
  return *v;
}

double parse_real(std::string_view tok, int line, const char* what) {
  const auto v = parse_number<double>(tok);
  if (!v) fail(line, std::string("expected number ") + what + ", got '" + std::string(tok) + "'");
  return *v;
}

// Calls fn(line_number, tokens) for each non-blank, non-comment line.
template <typename Fn>
void for_each_record(std::istream& in, Fn fn) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    fn(number, split_ws(body));
  }
}

// Reads the leading "m n" line and hands the rest to fn.
template <typename Fn>
std::pair<int, int> read_sized(std::istream& in, const char* kind, Fn fn) {
  std::optional<std::pair<int, int>> size;
  for_each_record(in, [&](int line, const std::vector<std::string_view>& tok) {
    if (!size) {
      if (tok.size() != 2) fail(line, std::string("expected '<rows> <cols>' header of ") + kind + " file");
      const int m = parse_int(tok[0], line, "row count"), n = parse_int(tok[1], line, "column count");
      if (m < 0 || n < 0) fail(line, "negative dimension");
      size = {m, n};
      return;
    }
    fn(line, tok, *size);
  });
  if (!size) throw InputError(std::string(kind) + " file is empty");
  return *size;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

// Reads a CSV with an exact header; fn(line, fields) per data row.
template <typename Fn>
void read_csv(std::istream& in, std::string_view header, Fn fn) {
  std::string line;
  int number = 0;
  bool seen_header = false;
  const auto expected = split_csv(header);
  while (std::getline(in, line)) {
    ++number;
    const auto body = trim(line);
    if (body.empty()) continue;
    auto fields = split_csv(body);
    if (!seen_header) {
      if (fields != expected) fail(number, "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    if (fields.size() != expected.size())
      fail(number, "expected " + std::to_string(expected.size()) + " fields, got " + std::to_string(fields.size()));
    fn(number, fields);
  }
  if (!seen_header) throw InputError("missing header '" + std::string(header) + "'");
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

BipartiteGraph read_graph(std::istream& in) {
  std::vector<Edge> edges;
  const auto [m, n] = read_sized(in, "graph", [&](int line, const auto& tok, std::pair<int, int> size) {
    if (tok.size() != 2) fail(line, "expected '<i> <j>'");
    const int i = parse_int(tok[0], line, "row index"), j = parse_int(tok[1], line, "column index");
    if (i < 0 || i >= size.first || j < 0 || j >= size.second)
      fail(line, "edge (" + std::to_string(i) + ", " + std::to_string(j) + ") is out of range");
    edges.push_back({i, j});
  });
  return BipartiteGraph(m, n, edges);
}

BipartiteGraph read_graph(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const BipartiteGraph& g) {
  out << g.left_size() << ' ' << g.right_size() << '\n';
  for (const auto& e : g.edges()) out << e.left << ' ' << e.right << '\n';
}

ObservedMatrixd read_matrix(std::istream& in) {
  std::vector<ObservedMatrixd::Entry> entries;
  std::set<std::pair<int, int>> seen;
  const auto [m, n] = read_sized(in, "matrix", [&](int line, const auto& tok, std::pair<int, int> size) {
    if (tok.size() != 3) fail(line, "expected '<i> <j> <value>'");
    const int i = parse_int(tok[0], line, "row index"), j = parse_int(tok[1], line, "column index");
    const double v = parse_real(tok[2], line, "value");
    if (i < 0 || i >= size.first || j < 0 || j >= size.second)
      fail(line, "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is out of range");
    if (!std::isfinite(v)) fail(line, "value is not finite");
    if (!seen.insert({i, j}).second)
      fail(line, "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") appears twice");
    entries.push_back({i, j, v});
  });
  return ObservedMatrixd(m, n, std::move(entries));
}

ObservedMatrixd read_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const ObservedMatrixd& X) {
  out << X.rows() << ' ' << X.cols() << '\n';
  for (const auto& e : X.entries()) out << e.row << ' ' << e.col << ' ' << format_double(e.value) << '\n';
}

void write_outer_product(std::ostream& out, const Vector<double>& u, const Vector<double>& v) {
  out << u.size() << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = 0; j < v.size(); ++j) out << i << ' ' << j << ' ' << format_double(u[i] * v[j]) << '\n';
}

void write_vector(std::ostream& out, const Vector<double>& x) {
  for (Eigen::Index k = 0; k < x.size(); ++k) out << format_double(x[k]) << '\n';
}

Vector<double> read_vector(std::istream& in) {
  std::vector<double> values;
  for_each_record(in, [&](int line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 1) fail(line, "expected one value per line");
    values.push_back(parse_real(tok[0], line, "value"));
  });
  return Eigen::Map<const Vector<double>>(values.data(), static_cast<Eigen::Index>(values.size()));
}

IdMap IdMap::build(const std::vector<std::string>& ids) {
  IdMap map;
  long long top = -1;
  for (const auto& id : ids) {
    const auto v = id.empty() || id.front() == '+' ? std::nullopt : parse_number<long long>(id);
    if (!v || *v < 0 || *v > kMaxNumericId) {
      map.numeric_ = false;
      break;
    }
    top = std::max(top, *v);
  }
  if (map.numeric_) {
    map.size_ = static_cast<int>(top + 1);
    return map;
  }
  std::set<std::string> distinct(ids.begin(), ids.end());
  map.names_.assign(distinct.begin(), distinct.end());
  for (std::size_t k = 0; k < map.names_.size(); ++k) map.lookup_[map.names_[k]] = static_cast<int>(k);
  map.size_ = static_cast<int>(map.names_.size());
  return map;
}

std::optional<int> IdMap::find(std::string_view id) const {
  if (numeric_) {
    if (id.empty() || id.front() == '+') return std::nullopt;
    const auto v = parse_number<long long>(id);
    if (!v || *v < 0 || *v >= size_) return std::nullopt;
    return static_cast<int>(*v);
  }
  const auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::string IdMap::name(int index) const { return numeric_ ? std::to_string(index) : names_.at(index); }

std::vector<LabelRow> read_label_rows(std::istream& in, int classes) {
  std::vector<LabelRow> rows;
  read_csv(in, "worker_id,task_id,label", [&](int line, const std::vector<std::string_view>& f) {
    if (f[0].empty() || f[1].empty()) fail(line, "empty id");
    const int label = parse_int(f[2], line, "label");
    if (label < 0) fail(line, "label must be non-negative");
    if (classes > 0 && label >= classes)
      fail(line, "label " + std::to_string(label) + " is not below the class count " + std::to_string(classes));
    rows.push_back({std::string(f[0]), std::string(f[1]), label, line});
  });
  return rows;
}

LabelFile assemble_labels(const std::vector<LabelRow>& rows, int classes,
                          const std::vector<std::string>& extra_tasks) {
  std::vector<std::string> worker_ids, task_ids = extra_tasks;
  int top = 1;
  for (const auto& r : rows) {
    worker_ids.push_back(r.worker);
    task_ids.push_back(r.task);
    top = std::max(top, r.label);
  }
  if (classes > 0 && top >= classes && !rows.empty()) {
    for (const auto& r : rows)
      if (r.label >= classes) fail(r.line, "label " + std::to_string(r.label) + " is not below the class count");
  }
  LabelFile out;
  out.workers = IdMap::build(worker_ids);
  out.tasks = IdMap::build(task_ids);
  std::vector<Label> labels;
  std::map<std::pair<int, int>, int> first_line;
  for (const auto& r : rows) {
    const int w = *out.workers.find(r.worker), t = *out.tasks.find(r.task);
    const auto [it, fresh] = first_line.insert({{w, t}, r.line});
    if (!fresh)
      fail(r.line, "second label for worker '" + r.worker + "' on task '" + r.task + "' (first on line " +
                       std::to_string(it->second) + ")");
    labels.push_back({w, t, r.label});
  }
  out.labels = LabelSet(out.workers.size(), out.tasks.size(), classes > 0 ? classes : top + 1, std::move(labels));
  return out;
}

LabelFile read_labels(std::istream& in, int classes) { return assemble_labels(read_label_rows(in, classes), classes); }

LabelFile read_labels(const std::filesystem::path& path, int classes) {
  auto in = open_input(path);
  return read_labels(in, classes);
}

void write_labels(std::ostream& out, const LabelSet& labels) {
  out << "worker_id,task_id,label\n";
  for (const auto& l : labels.labels()) out << l.worker << ',' << l.task << ',' << l.label << '\n';
}

std::vector<TruthRow> read_truth_rows(std::istream& in) {
  std::vector<TruthRow> rows;
  read_csv(in, "task_id,label", [&](int line, const std::vector<std::string_view>& f) {
    if (f[0].empty()) fail(line, "empty id");
    const int label = parse_int(f[1], line, "label");
    if (label < 0) fail(line, "label must be non-negative");
    rows.push_back({std::string(f[0]), label, line});
  });
  return rows;
}

std::vector<int> truth_vector(const std::vector<TruthRow>& rows, const IdMap& tasks) {
  std::vector<int> truth(tasks.size(), -1);
  for (const auto& r : rows) {
    const auto t = tasks.find(r.task);
    if (!t) fail(r.line, "unknown task '" + r.task + "'");
    if (truth[*t] >= 0) fail(r.line, "second truth entry for task '" + r.task + "'");
    truth[*t] = r.label;
  }
  return truth;
}

std::vector<int> read_truth(std::istream& in, const IdMap& tasks) { return truth_vector(read_truth_rows(in), tasks); }

std::vector<int> read_truth(const std::filesystem::path& path, const IdMap& tasks) {
  auto in = open_input(path);
  return read_truth(in, tasks);
}

void write_truth(std::ostream& out, const std::vector<int>& truth) {
  out << "task_id,label\n";
  for (std::size_t t = 0; t < truth.size(); ++t) out << t << ',' << truth[t] << '\n';
}

void write_predictions(std::ostream& out, const Prediction& p, const IdMap& tasks) {
  out << "task_id,label\n";
  for (std::size_t t = 0; t < p.label.size(); ++t) out << tasks.name(static_cast<int>(t)) << ',' << p.label[t] << '\n';
}

void write_skills(std::ostream& out, const SkillEstimate& s, const IdMap& workers) {
  out << "worker_id,s,p,weight,flagged\n";
  for (std::size_t i = 0; i < s.s.size(); ++i)
    out << workers.name(static_cast<int>(i)) << ',' << format_double(s.s[i]) << ',' << format_double(s.p[i]) << ','
        << format_double(s.weight[i]) << ',' << (s.flagged[i] ? 1 : 0) << '\n';
}

void write_id_map(std::ostream& out, const IdMap& ids, std::string_view header) {
  out << "index," << header << '\n';
  for (int k = 0; k < ids.size(); ++k) out << k << ',' << ids.name(k) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "method,n,noise_prob,trials,recovery_rate,mean_seconds\n";
  for (const auto& c : cells)
    out << method_name(c.method) << ',' << c.n << ',' << format_double(c.noise_prob) << ',' << c.trials << ','
        << format_double(c.recovery_rate) << ',' << format_double(c.mean_seconds) << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace mmsr
