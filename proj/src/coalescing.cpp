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

#include "srpic/coalescing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace srpic {
namespace {

// ceil() that ignores floating-point noise just above an integer.
std::size_t tolerant_ceil(double x) {
  return static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

}  // namespace

void CoalescingParams::validate() const {
  if (!(r_sn > 0.0)) throw std::invalid_argument("r_sn must be positive");
  if (!(t_intr >= 0.0)) throw std::invalid_argument("t_intr must be >= 0");
}

std::size_t block_size_closed_form(double p_rate, const CoalescingParams& params) {
  params.validate();
  if (!(p_rate >= 0.0)) throw std::invalid_argument("p_rate must be >= 0");
  if (p_rate >= params.r_sn) {
    throw SaturationError("arrival rate " + std::to_string(p_rate) +
                          " pps reaches service rate " +
                          std::to_string(params.r_sn) +
                          " pps; the sender overruns the receiver");
  }
  const double t_intr_s = params.t_intr * 1e-6;
  const double block =
      (1.0 + t_intr_s * p_rate) * params.r_sn / (params.r_sn - p_rate);
  return std::max<std::size_t>(1, tolerant_ceil(block));
}

std::vector<CycleRecord> simulate_coalescing(std::span<const Micros> arrival_times,
                                             const CoalescingParams& params) {
  params.validate();
  const Micros quantum = params.service_quantum();
  std::vector<CycleRecord> cycles;
  std::size_t i = 0;
  while (i < arrival_times.size()) {
    const Micros start = arrival_times[i];
    std::size_t block = 1;
    // Packet i + block is serviced in this cycle if it is already waiting
    // when packet i + block - 1 finishes.
    while (i + block < arrival_times.size() &&
           arrival_times[i + block] < start + params.t_intr + block * quantum) {
      ++block;
    }
    cycles.push_back(CycleRecord{cycles.size(), start, block * quantum, block});
    i += block;
  }
  return cycles;
}

Micros hold_delay_bound(std::size_t packets, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("service rate must be positive");
  return static_cast<double>(packets) / rate * 1e6;
}

ReceiveRing::ReceiveRing(const CoalescingParams& params) : params_(params) {
  params_.validate();
}

std::optional<Micros> ReceiveRing::on_arrival(const Packet& p, Micros now) {
  ring_.push_back(p);
  if (busy_) return std::nullopt;
  busy_ = true;
  cycle_start_ = now;
  served_in_cycle_ = 0;
  return now + params_.t_intr + params_.service_quantum();
}

ReceiveRing::Service ReceiveRing::on_service_complete() {
  Service result{ring_.front(), std::nullopt, std::nullopt};
  ring_.pop_front();
  ++served_in_cycle_;
  if (!ring_.empty()) {
    result.next_completion = cycle_start_ + params_.t_intr +
                             (served_in_cycle_ + 1) * params_.service_quantum();
  } else {
    busy_ = false;
    CycleRecord record{cycles_.size(), cycle_start_,
                       served_in_cycle_ * params_.service_quantum(),
                       served_in_cycle_};
    cycles_.push_back(record);
    result.finished_cycle = record;
  }
  return result;
}

}  // namespace srpic
