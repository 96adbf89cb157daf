// Copyright 2026 The LH-IQN Authors
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

#include "lhiqn/harness/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "lhiqn/errors.h"

namespace lhiqn::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string Cell(const std::optional<double>& v) { return v ? Cell(*v) : std::string(); }

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::vector<double> Ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

const std::vector<std::string>& MetricsColumns() {
  static const std::vector<std::string> columns = {
      "step", "train_return", "eval_return", "eval_length", "tdl_mean",
      "tdl_usage", "epsilon", "eta", "wall_seconds"};
  return columns;
}

MetricsWriter::MetricsWriter(const std::string& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "w");
  if (file_ == nullptr) throw InputError("metrics: cannot create " + path);
  std::string header = std::string(kMetricsVersion) + "\n";
  const auto& columns = MetricsColumns();
  for (std::size_t i = 0; i < columns.size(); ++i) header += (i ? "," : "") + columns[i];
  Emit(header + "\n");
}

MetricsWriter::~MetricsWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

void MetricsWriter::Emit(const std::string& line) {
  // One fwrite per row so a reader never sees half a line after a flush.
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
    throw InputError("metrics: write to " + path_ + " failed");
  }
}

void MetricsWriter::Write(const MetricsRow& row) {
  std::ostringstream line;
  line << row.step << "," << Cell(row.train_return) << "," << Cell(row.eval_return) << ","
       << Cell(row.eval_length) << "," << Cell(row.tdl_mean) << "," << Cell(row.tdl_usage) << ","
       << Cell(row.epsilon) << "," << Cell(row.eta) << "," << Cell(row.wall_seconds) << "\n";
  Emit(line.str());
}

void MetricsWriter::WriteError(long step, unsigned long long seed, const std::string& message) {
  std::string text = message;
  std::replace(text.begin(), text.end(), '\n', ' ');
  Emit(std::string(kErrorMarker) + " step=" + std::to_string(step) +
       " seed=" + std::to_string(seed) + ": " + text + "\n");
}

std::vector<double> MetricsTable::Column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InputError(path + ": no column '" + name + "'");
  const std::size_t c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

MetricsTable ReadMetrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  MetricsTable table;
  table.path = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind(kErrorMarker, 0) == 0) {
      table.failed = true;
      table.error = line;
      continue;
    }
    if (line[0] == '#') continue;
    const auto cells = SplitCsv(line);
    if (table.columns.empty()) {
      table.columns = cells;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw InputError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(table.columns.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const std::string& cell : cells) {
      if (cell.empty()) {
        row.push_back(kNaN);
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw InputError(path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw InputError(path + ": missing header");
  return table;
}

std::vector<SummaryRow> Aggregate(std::span<const std::string> paths) {
  std::vector<MetricsTable> tables;
  for (const std::string& path : paths) {
    MetricsTable table = ReadMetrics(path);
    if (!tables.empty() && table.columns != tables.front().columns) {
      throw InputError(path + ": columns differ from " + tables.front().path);
    }
    if (table.columns.empty() || table.columns.front() != "step") {
      throw InputError(path + ": first column must be 'step'");
    }
    tables.push_back(std::move(table));
  }
  std::vector<const MetricsTable*> done;
  for (const MetricsTable& t : tables) {
    if (!t.failed) done.push_back(&t);
  }
  if (done.empty()) throw InputError("aggregate: no completed run among the inputs");
  const std::vector<double> steps = done.front()->Column("step");
  for (const MetricsTable* t : done) {
    if (t->Column("step") != steps) {
      throw InputError(t->path + ": step grid differs from " + done.front()->path);
    }
  }
  std::vector<SummaryRow> out;
  const auto& columns = done.front()->columns;
  for (std::size_t r = 0; r < steps.size(); ++r) {
    for (std::size_t c = 1; c < columns.size(); ++c) {
      std::vector<double> values;
      for (const MetricsTable* t : done) {
        if (!std::isnan(t->rows[r][c])) values.push_back(t->rows[r][c]);
      }
      if (values.empty()) continue;
      // Sorted summation keeps the result independent of input order.
      std::sort(values.begin(), values.end());
      double sum = 0.0;
      for (double v : values) sum += v;
      const double mean = sum / values.size();
      double sq = 0.0;
      for (double v : values) sq += (v - mean) * (v - mean);
      out.push_back({static_cast<long>(steps[r]), columns[c], mean,
                     std::sqrt(sq / values.size()), static_cast<int>(values.size())});
    }
  }
  return out;
}

void WriteSummary(const std::string& path, std::span<const SummaryRow> rows) {
  std::ofstream out(path);
  if (!out) throw InputError("aggregate: cannot create " + path);
  out << kSummaryVersion << "\nstep,metric,mean,std,count\n";
  for (const SummaryRow& r : rows) {
    out << r.step << "," << r.metric << "," << Cell(r.mean) << "," << Cell(r.stddev) << ","
        << r.count << "\n";
  }
  if (!out) throw InputError("aggregate: write to " + path + " failed");
}

double SpearmanCorrelation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    a.push_back(x[i]);
    b.push_back(y[i]);
  }
  if (a.size() < 2) return kNaN;
  const auto ra = Ranks(a), rb = Ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return kNaN;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace lhiqn::harness
