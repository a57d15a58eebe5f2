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

#ifndef SRPIC_CHANNEL_HPP_
#define SRPIC_CHANNEL_HPP_

#include <cstdint>
#include <optional>

#include "srpic/packet.hpp"
#include "srpic/random.hpp"

namespace srpic {

// One direction of the emulated path: normal per-packet delay with mean
// alpha and standard deviation beta * alpha, plus uniform random drop.
struct PathConfig {
  double alpha_ms = 2.5;
  double beta = 0.0;
  double drop_rate = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// Stateful path used by event-driven simulations. Every packet consumes one
// drop draw and one delay draw from separate streams, so the delay applied
// to the k-th packet does not depend on the drop rate.
class PathEmulator {
 public:
  explicit PathEmulator(const PathConfig& cfg);

  // Arrival time for a packet leaving at `send_time`, or nullopt if dropped.
  std::optional<Micros> transit(Micros send_time);

  const PathConfig& config() const { return cfg_; }
  std::uint64_t forwarded() const { return forwarded_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  PathConfig cfg_;
  Rng drop_rng_;
  Rng delay_rng_;
  std::uint64_t forwarded_ = 0;
  std::uint64_t dropped_ = 0;
};

// Batch form: `trace` in send order in, surviving packets in arrival order
// out (ties broken by send_index).
Trace apply_path(const Trace& trace, const PathConfig& cfg);

}  // namespace srpic

#endif  // SRPIC_CHANNEL_HPP_
