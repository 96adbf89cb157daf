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

#ifndef LHIQN_HARNESS_METRICS_H_
#define LHIQN_HARNESS_METRICS_H_

#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lhiqn::harness {

inline constexpr char kMetricsVersion[] = "# lhiqn-metrics v1";
inline constexpr char kSummaryVersion[] = "# lhiqn-summary v1";
inline constexpr char kErrorMarker[] = "# error";

// Column order of the per-seed CSV.
const std::vector<std::string>& MetricsColumns();

// One row per evaluation. Unset optionals are written as empty cells.
struct MetricsRow {
  long step = 0;
  std::optional<double> train_return;  // mean over episodes finished since the last row
  double eval_return = 0.0;
  double eval_length = 0.0;
  std::optional<double> tdl_mean;   // L and LH variants only
  std::optional<double> tdl_usage;  // share of u <= 0 cells whose tdl > beta
  double epsilon = 0.0;
  double eta = 0.0;
  std::optional<double> wall_seconds;
};

// Writes the version comment and header on open and one flushed line per row.
// Throws InputError when the file cannot be created.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  ~MetricsWriter();
  MetricsWriter(const MetricsWriter&) = delete;
  MetricsWriter& operator=(const MetricsWriter&) = delete;

  void Write(const MetricsRow& row);
  // Appends "# error step=<step> seed=<seed>: <message>".
  void WriteError(long step, unsigned long long seed, const std::string& message);

 private:
  void Emit(const std::string& line);

  std::string path_;
  std::FILE* file_ = nullptr;
};

// A parsed metrics CSV. Empty cells are NaN.
struct MetricsTable {
  std::string path;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool failed = false;  // contains an error marker
  std::string error;

  // Throws InputError for an unknown column.
  std::vector<double> Column(const std::string& name) const;
};

// Throws InputError on unreadable files and malformed rows.
MetricsTable ReadMetrics(const std::string& path);

struct SummaryRow {
  long step = 0;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  int count = 0;     // seeds with a value at this step
};

// Per-step, per-metric mean and standard deviation over the completed seeds.
// Files with an error marker are skipped. Throws InputError naming the file
// on a column or step-grid mismatch, or when no completed file remains.
std::vector<SummaryRow> Aggregate(std::span<const std::string> paths);
void WriteSummary(const std::string& path, std::span<const SummaryRow> rows);

// Spearman rank correlation with average ranks for ties. NaN pairs are
// dropped; returns NaN when fewer than two pairs remain or a side is constant.
double SpearmanCorrelation(std::span<const double> x, std::span<const double> y);

}  // namespace lhiqn::harness

#endif  // LHIQN_HARNESS_METRICS_H_
