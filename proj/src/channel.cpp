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

#include "srpic/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace srpic {

void PathConfig::validate() const {
  if (!(alpha_ms >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) {
    throw std::invalid_argument("drop_rate must be within [0, 1]");
  }
}

PathEmulator::PathEmulator(const PathConfig& cfg)
    : cfg_(cfg), drop_rng_(mix_seed(cfg.seed, 1)), delay_rng_(mix_seed(cfg.seed, 2)) {
  cfg_.validate();
}

std::optional<Micros> PathEmulator::transit(Micros send_time) {
  const bool drop = drop_rng_.uniform() < cfg_.drop_rate;
  const double mean_us = cfg_.alpha_ms * 1e3;
  const double delay = std::max(0.0, mean_us + cfg_.beta * mean_us * delay_rng_.normal());
  if (drop) {
    ++dropped_;
    return std::nullopt;
  }
  ++forwarded_;
  return send_time + delay;
}

Trace apply_path(const Trace& trace, const PathConfig& cfg) {
  PathEmulator path(cfg);
  Trace out;
  out.reserve(trace.size());
  for (const Packet& p : trace) {
    if (auto arrival = path.transit(p.send_time)) {
      Packet q = p;
      q.arrival_time = *arrival;
      out.push_back(q);
    }
  }
  std::sort(out.begin(), out.end(), [](const Packet& a, const Packet& b) {
    if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
    return a.send_index < b.send_index;
  });
  return out;
}

}  // namespace srpic
