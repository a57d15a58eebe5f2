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

#ifndef SRPIC_COALESCING_HPP_
#define SRPIC_COALESCING_HPP_

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "srpic/packet.hpp"

namespace srpic {

// Receive-path timing: hardware interrupt delay and softirq service rate.
struct CoalescingParams {
  Micros t_intr = 30.0;
  double r_sn = 1.2e6;  // packets per second
  std::size_t ringbuffer_size = 512;

  // Duration of one softirq service step.
  Micros service_quantum() const { return 1e6 / r_sn; }
  void validate() const;
};

struct CycleRecord {
  std::size_t cycle_index = 0;
  Micros start_time = 0.0;
  Micros emptying_duration = 0.0;
  std::size_t block_packets = 0;
};

// Arrival rate at or above the service rate: the ring never empties.
class SaturationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ceil((1 + t_intr * p) * r_sn / (r_sn - p)), the expected packets per
// interrupt-coalescing cycle at a stationary arrival rate p (pps).
std::size_t block_size_closed_form(double p_rate, const CoalescingParams& params);

// Discrete-event emptying of the ring. A cycle starts at the first arrival
// into an empty ring, draining begins t_intr later at one packet per service
// quantum, and the cycle ends when no packet is waiting at a service
// boundary. Arrivals exactly on that boundary open the next cycle.
std::vector<CycleRecord> simulate_coalescing(std::span<const Micros> arrival_times,
                                             const CoalescingParams& params);

// Longest time a packet can be held when at most `packets` are serviced
// ahead of its release at `rate` pps.
Micros hold_delay_bound(std::size_t packets, double rate);

// Online form of simulate_coalescing for event-driven simulations. The owner
// schedules service completions at the times this class returns and must
// deliver completions before arrivals that carry the same timestamp.
class ReceiveRing {
 public:
  explicit ReceiveRing(const CoalescingParams& params);

  // Queues an arrival. Returns the first service completion time when the
  // arrival opens a new cycle.
  std::optional<Micros> on_arrival(const Packet& p, Micros now);

  struct Service {
    Packet packet;
    // Next service completion, or nullopt when this one emptied the ring.
    std::optional<Micros> next_completion;
    // Set when the cycle ended with this service step.
    std::optional<CycleRecord> finished_cycle;
  };
  Service on_service_complete();

  bool busy() const { return busy_; }
  std::size_t queued() const { return ring_.size(); }
  const std::vector<CycleRecord>& cycles() const { return cycles_; }

 private:
  CoalescingParams params_;
  std::deque<Packet> ring_;
  bool busy_ = false;
  Micros cycle_start_ = 0.0;
  std::size_t served_in_cycle_ = 0;
  std::vector<CycleRecord> cycles_;
};

}  // namespace srpic

#endif  // SRPIC_COALESCING_HPP_
