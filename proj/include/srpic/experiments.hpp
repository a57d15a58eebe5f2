// Copyright 2026 The SRPIC Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef SRPIC_EXPERIMENTS_HPP_
#define SRPIC_EXPERIMENTS_HPP_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "srpic/transfer.hpp"

namespace srpic {

// Scenario file problem. what() reads "<origin>:<line>:<col>: <message>";
// line and column are 1-based, 0 when no position applies.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "<input>");
ScenarioConfig load_scenario(const std::string& path);

// Replaces the seed list with 1..count.
void override_seed_count(ScenarioConfig& cfg, std::size_t count);

// Applies one sweep value. Known parameters: beta, alpha_ms, drop_rate (all on
// the forward path), rev_beta, rev_drop_rate, block_size, num_streams.
// Throws ConfigError for an unknown parameter or an invalid result.
ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& param, double value);

struct ResultRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t stream_id = 0;
  bool srpic = false;
  TransferMetrics metrics;
  HoldDelayAudit audit;  // run-wide, shared by the run's rows
};

// Runs every seed twice, SRPIC off then on, with identical randomness. Rows
// are ordered by (seed, stream_id, srpic).
std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg);

const std::vector<std::string>& csv_header();
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

// CSV as read back for comparison: the four key columns plus every numeric
// column in header order.
struct CsvTable {
  std::vector<std::string> metric_names;
  struct Record {
    std::string scenario;
    std::uint64_t seed = 0;
    std::size_t stream_id = 0;
    bool srpic = false;
    std::vector<double> values;
  };
  std::vector<Record> records;
};

class CompareError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CsvTable read_csv(std::istream& in);

struct SummaryRow {
  std::string scenario;
  std::string metric;
  std::size_t pairs = 0;
  double baseline_mean = 0.0;
  double srpic_mean = 0.0;
  // Paired difference srpic - baseline with a two-sided 95% t interval.
  double diff_mean = 0.0;
  double diff_ci_low = 0.0;
  double diff_ci_high = 0.0;
  // srpic_mean / baseline_mean; the interval is the difference interval
  // scaled by the baseline mean.
  double ratio = 0.0;
  double ratio_ci_low = 0.0;
  double ratio_ci_high = 0.0;
};

// Pairs rows on (scenario, seed, stream_id). Every key needs exactly one row
// per arm, otherwise CompareError. Output is sorted by scenario, then metric
// in column order.
std::vector<SummaryRow> compare(const CsvTable& table);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace srpic

#endif  // SRPIC_EXPERIMENTS_HPP_
