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
#include "srpic/experiments.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

namespace srpic {
namespace {

[[noreturn]] void fail_at(const std::string& origin, const YAML::Node& node,
                          const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ConfigError(origin, 0, 0, message);
  throw ConfigError(origin, mark.line + 1, mark.column + 1, message);
}

class MapReader {
 public:
  MapReader(const std::string& origin, const YAML::Node& node, std::string prefix)
      : origin_(origin), node_(node), prefix_(std::move(prefix)) {
    if (!node.IsMap()) fail_at(origin_, node_, "'" + prefix_ + "' must be a mapping");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    const YAML::Node value = node_[key];
    if (!value) return;
    try {
      out = value.as<T>();
    } catch (const YAML::Exception&) {
      fail_at(origin_, value, "bad value for '" + qualified(key) + "'");
    }
  }

  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    return node_[key];
  }

  // Any key not requested so far is an error.
  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail_at(origin_, kv.first, "unknown key '" + qualified(key) + "'");
    }
  }

  std::string qualified(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

 private:
  const std::string& origin_;
  YAML::Node node_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void read_path(const std::string& origin, const YAML::Node& node, const std::string& name,
               PathConfig& path) {
  if (!node) return;
  MapReader r(origin, node, name);
  r.read("alpha_ms", path.alpha_ms);
  r.read("beta", path.beta);
  r.read("drop_rate", path.drop_rate);
  r.read("seed", path.seed);
  r.finish();
  try {
    path.validate();
  } catch (const std::invalid_argument& e) {
    fail_at(origin, node, name + ": " + e.what());
  }
}

ScenarioConfig build(const std::string& origin, const YAML::Node& root) {
  ScenarioConfig cfg;
  MapReader r(origin, root, "");
  r.read("name", cfg.name);
  if (cfg.name.find_first_of(",\"\r\n") != std::string::npos) {
    fail_at(origin, root["name"], "name must not contain commas, quotes or line breaks");
  }
  r.read("duration_s", cfg.duration_s);
  r.read("num_streams", cfg.num_streams);
  r.read("sack_enabled", cfg.sack_enabled);

  if (YAML::Node mode = r.child("sender_mode")) {
    const auto text = mode.IsScalar() ? mode.Scalar() : std::string();
    if (text == "static") {
      cfg.sender_mode = SenderMode::kStatic;
    } else if (text == "adaptive") {
      cfg.sender_mode = SenderMode::kAdaptive;
    } else {
      fail_at(origin, mode, "sender_mode must be 'static' or 'adaptive'");
    }
  }

  if (YAML::Node seeds = r.child("seeds")) {
    if (!seeds.IsSequence()) fail_at(origin, seeds, "seeds must be a list");
    cfg.seeds.clear();
    for (const auto& s : seeds) {
      try {
        cfg.seeds.push_back(s.as<std::uint64_t>());
      } catch (const YAML::Exception&) {
        fail_at(origin, s, "seed must be an unsigned integer");
      }
    }
    if (cfg.seeds.empty()) fail_at(origin, seeds, "seeds must not be empty");
  }

  read_path(origin, r.child("fwd"), "fwd", cfg.fwd);
  read_path(origin, r.child("rev"), "rev", cfg.rev);

  if (YAML::Node node = r.child("srpic")) {
    MapReader s(origin, node, "srpic");
    s.read("enabled", cfg.srpic.enabled);
    s.read("block_size", cfg.srpic.block_size);
    s.read("ringbuffer_size", cfg.srpic.ringbuffer_size);
    s.finish();
  }
  // The SRPIC hold bound and the ring size default to the same value.
  cfg.coalescing.ringbuffer_size = cfg.srpic.ringbuffer_size;
  if (YAML::Node node = r.child("coalescing")) {
    MapReader c(origin, node, "coalescing");
    c.read("t_intr_us", cfg.coalescing.t_intr);
    c.read("r_sn_pps", cfg.coalescing.r_sn);
    c.read("ringbuffer_size", cfg.coalescing.ringbuffer_size);
    c.finish();
  }
  if (YAML::Node node = r.child("sender")) {
    MapReader s(origin, node, "sender");
    double gbps = cfg.sender.link_rate_bps / 1e9;
    double min_rto_ms = cfg.sender.min_rto / 1e3;
    s.read("link_rate_gbps", gbps);
    s.read("header_bytes", cfg.sender.header_bytes);
    s.read("initial_cwnd", cfg.sender.initial_cwnd);
    s.read("max_cwnd", cfg.sender.max_cwnd);
    s.read("min_rto_ms", min_rto_ms);
    s.finish();
    cfg.sender.link_rate_bps = gbps * 1e9;
    cfg.sender.min_rto = min_rto_ms * 1e3;
  }
  r.finish();

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    fail_at(origin, root, e.what());
  }
  return cfg;
}

std::string format_double(double v) { return fmt::format("{:.6g}", v); }

double per_mbps(double count, double goodput) {
  return goodput > 0.0 ? count / goodput : std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

constexpr std::size_t kKeyColumns = 4;

}  // namespace

ConfigError::ConfigError(const std::string& origin, int line, int column,
                         const std::string& message)
    : std::runtime_error(fmt::format("{}:{}:{}: {}", origin, line, column, message)),
      line_(line),
      column_(column) {}

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin, e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  if (!root.IsDefined() || root.IsNull()) throw ConfigError(origin, 1, 1, "empty scenario");
  return build(origin, root);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, 0, "cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path);
}

void override_seed_count(ScenarioConfig& cfg, std::size_t count) {
  if (count == 0) throw ConfigError("--seed-count", 0, 0, "must be at least 1");
  cfg.seeds.clear();
  for (std::size_t s = 1; s <= count; ++s) cfg.seeds.push_back(s);
}

ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& param,
                              double value) {
  ScenarioConfig out = cfg;
  auto as_count = [&](std::size_t& field) {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw ConfigError("--values", 0, 0, param + " needs positive integers");
    }
    field = static_cast<std::size_t>(value);
  };
  if (param == "beta") {
    out.fwd.beta = value;
  } else if (param == "alpha_ms") {
    out.fwd.alpha_ms = value;
  } else if (param == "drop_rate") {
    out.fwd.drop_rate = value;
  } else if (param == "rev_beta") {
    out.rev.beta = value;
  } else if (param == "rev_drop_rate") {
    out.rev.drop_rate = value;
  } else if (param == "block_size") {
    as_count(out.srpic.block_size);
  } else if (param == "num_streams") {
    as_count(out.num_streams);
  } else {
    throw ConfigError("--param", 0, 0, "unknown sweep parameter '" + param + "'");
  }
  out.name = fmt::format("{}[{}={}]", cfg.name, param, format_double(value));
  try {
    out.validate();
  } catch (const std::exception& e) {
    throw ConfigError("--values", 0, 0, out.name + ": " + e.what());
  }
  return out;
}

std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  std::vector<ResultRow> rows;
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  for (std::uint64_t seed : seeds) {
    std::vector<TransferResult> arms;
    for (bool on : {false, true}) {
      ScenarioConfig arm = cfg;
      arm.srpic.enabled = on;
      arms.push_back(run_transfer(arm, seed));
    }
    for (std::size_t s = 0; s < cfg.num_streams; ++s) {
      for (bool on : {false, true}) {
        const TransferResult& res = arms[on ? 1 : 0];
        rows.push_back(ResultRow{cfg.name, seed, s, on, res.streams[s], res.audit});
      }
    }
  }
  return rows;
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header{
      "scenario",          "seed",
      "stream_id",         "srpic",
      "goodput_proxy",     "pkts_retrans",
      "dup_acks_in",       "sack_blocks_rcvd",
      "reorder_pre_count", "reorder_pre_ratio",
      "reorder_pre_max_extent", "reorder_post_count",
      "reorder_post_ratio", "reorder_post_max_extent",
      "mean_block_size",   "max_hold_delay_us",
      "dup_acks_in_per_mbps", "pkts_retrans_per_mbps"};
  return header;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  const auto& header = csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const ResultRow& row : rows) {
    const TransferMetrics& m = row.metrics;
    const auto dup = static_cast<double>(m.dup_acks_in);
    const auto ret = static_cast<double>(m.pkts_retrans);
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", row.scenario,
                       row.seed, row.stream_id, row.srpic ? 1 : 0,
                       format_double(m.goodput_proxy), m.pkts_retrans, m.dup_acks_in,
                       m.sack_blocks_rcvd, m.reorder_pre.reordered_count,
                       format_double(m.reorder_pre.ratio), m.reorder_pre.max_extent,
                       m.reorder_post.reordered_count, format_double(m.reorder_post.ratio),
                       m.reorder_post.max_extent, format_double(m.mean_block_size),
                       format_double(m.max_hold_delay),
                       format_double(per_mbps(dup, m.goodput_proxy)),
                       format_double(per_mbps(ret, m.goodput_proxy)));
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  const std::vector<std::string> keys{"scenario", "seed", "stream_id", "srpic"};
  if (header.size() <= kKeyColumns || !std::equal(keys.begin(), keys.end(), header.begin())) {
    throw CompareError("header must start with scenario,seed,stream_id,srpic");
  }
  table.metric_names.assign(header.begin() + kKeyColumns, header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw CompareError(fmt::format("line {}: expected {} fields, got {}", line_no,
                                     header.size(), fields.size()));
    }
    CsvTable::Record rec;
    try {
      rec.scenario = fields[0];
      rec.seed = std::stoull(fields[1]);
      rec.stream_id = std::stoull(fields[2]);
      if (fields[3] != "0" && fields[3] != "1") throw std::invalid_argument("srpic");
      rec.srpic = fields[3] == "1";
      for (std::size_t i = kKeyColumns; i < fields.size(); ++i) {
        rec.values.push_back(std::stod(fields[i]));
      }
    } catch (const std::exception&) {
      throw CompareError(fmt::format("line {}: malformed field", line_no));
    }
    table.records.push_back(std::move(rec));
  }
  return table;
}

std::vector<SummaryRow> compare(const CsvTable& table) {
  using Key = std::tuple<std::string, std::uint64_t, std::size_t>;
  std::map<Key, std::array<const CsvTable::Record*, 2>> pairs;
  for (const auto& rec : table.records) {
    auto& slot = pairs[{rec.scenario, rec.seed, rec.stream_id}][rec.srpic ? 1 : 0];
    if (slot != nullptr) {
      throw CompareError(fmt::format("duplicate row for scenario {} seed {} stream {} srpic {}",
                                     rec.scenario, rec.seed, rec.stream_id, rec.srpic ? 1 : 0));
    }
    slot = &rec;
  }
  std::map<std::string, std::vector<std::array<const CsvTable::Record*, 2>>> by_scenario;
  for (const auto& [key, arms] : pairs) {
    if (arms[0] == nullptr || arms[1] == nullptr) {
      throw CompareError(fmt::format("unpaired row for scenario {} seed {} stream {}",
                                     std::get<0>(key), std::get<1>(key), std::get<2>(key)));
    }
    by_scenario[std::get<0>(key)].push_back(arms);
  }

  std::vector<SummaryRow> out;
  for (const auto& [scenario, arms] : by_scenario) {
    const std::size_t n = arms.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double t_crit = nan;
    if (n >= 2) {
      boost::math::students_t dist(static_cast<double>(n - 1));
      t_crit = boost::math::quantile(boost::math::complement(dist, 0.025));
    }
    for (std::size_t k = 0; k < table.metric_names.size(); ++k) {
      SummaryRow row;
      row.scenario = scenario;
      row.metric = table.metric_names[k];
      row.pairs = n;
      double sum_diff = 0.0;
      for (const auto& a : arms) {
        row.baseline_mean += a[0]->values[k];
        row.srpic_mean += a[1]->values[k];
        sum_diff += a[1]->values[k] - a[0]->values[k];
      }
      row.baseline_mean /= static_cast<double>(n);
      row.srpic_mean /= static_cast<double>(n);
      row.diff_mean = sum_diff / static_cast<double>(n);
      double half = nan;
      if (n >= 2) {
        double ss = 0.0;
        for (const auto& a : arms) {
          const double d = a[1]->values[k] - a[0]->values[k] - row.diff_mean;
          ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        half = t_crit * sd / std::sqrt(static_cast<double>(n));
      }
      row.diff_ci_low = row.diff_mean - half;
      row.diff_ci_high = row.diff_mean + half;
      if (row.baseline_mean != 0.0) {
        row.ratio = row.srpic_mean / row.baseline_mean;
        const double lo = 1.0 + row.diff_ci_low / row.baseline_mean;
        const double hi = 1.0 + row.diff_ci_high / row.baseline_mean;
        row.ratio_ci_low = std::min(lo, hi);
        row.ratio_ci_high = std::max(lo, hi);
      } else {
        row.ratio = row.ratio_ci_low = row.ratio_ci_high = nan;
      }
      out.push_back(row);
    }
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "scenario,metric,pairs,baseline_mean,srpic_mean,diff_mean,diff_ci_low,"
         "diff_ci_high,ratio,ratio_ci_low,ratio_ci_high\n";
  for (const SummaryRow& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario, r.metric, r.pairs,
                       format_double(r.baseline_mean), format_double(r.srpic_mean),
                       format_double(r.diff_mean), format_double(r.diff_ci_low),
                       format_double(r.diff_ci_high), format_double(r.ratio),
                       format_double(r.ratio_ci_low), format_double(r.ratio_ci_high));
  }
}

}  // namespace srpic
