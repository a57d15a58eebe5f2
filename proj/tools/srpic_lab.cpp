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
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "srpic/experiments.hpp"

namespace {

constexpr int kConfigExit = 2;

// Writes to `path`, or stdout for "" or "-".
bool emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paired SRPIC experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::size_t seed_count = 0;

  auto* run = app.add_subcommand("run", "Run a scenario file in both arms and write CSV rows");
  run->add_option("config", config_path, "Scenario YAML file")->required();
  run->add_option("--out", out_path, "Output CSV (default stdout)");
  run->add_option("--seed-count", seed_count, "Use seeds 1..N instead of the file's list");

  std::string csv_path;
  auto* cmp = app.add_subcommand("compare", "Summarize paired rows with 95% intervals");
  cmp->add_option("csv", csv_path, "CSV produced by run or sweep")->required();
  cmp->add_option("--out", out_path, "Output CSV (default stdout)");

  std::string param;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sweep->add_option("config", config_path, "Scenario YAML file")->required();
  sweep->add_option("--param", param, "beta, alpha_ms, drop_rate, rev_beta, rev_drop_rate, "
                                      "block_size or num_streams")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--out", out_path, "Output CSV (default stdout)");
  sweep->add_option("--seed-count", seed_count, "Use seeds 1..N instead of the file's list");

  CLI11_PARSE(app, argc, argv);

  std::ostringstream text;
  try {
    if (*cmp) {
      std::ifstream in(csv_path, std::ios::binary);
      if (!in) {
        std::cerr << csv_path << ": cannot open file\n";
        return 1;
      }
      srpic::write_summary_csv(text, srpic::compare(srpic::read_csv(in)));
    } else {
      srpic::ScenarioConfig cfg = srpic::load_scenario(config_path);
      if (run->count("--seed-count") + sweep->count("--seed-count") > 0) {
        srpic::override_seed_count(cfg, seed_count);
      }
      std::vector<srpic::ResultRow> rows;
      if (*run) {
        rows = srpic::run_scenario(cfg);
      } else {
        for (double v : values) {
          auto part = srpic::run_scenario(srpic::with_parameter(cfg, param, v));
          rows.insert(rows.end(), part.begin(), part.end());
        }
      }
      srpic::write_csv(text, rows);
    }
  } catch (const srpic::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigExit;
  } catch (const srpic::CompareError& e) {
    std::cerr << csv_path << ": " << e.what() << '\n';
    return 1;
  }

  if (!emit(out_path, text.str())) {
    std::cerr << out_path << ": write failed\n";
    return 1;
  }
  return 0;
}
