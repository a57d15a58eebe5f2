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

#ifndef SRPIC_TRANSFER_HPP_
#define SRPIC_TRANSFER_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "srpic/channel.hpp"
#include "srpic/coalescing.hpp"
#include "srpic/reorder_metrics.hpp"
#include "srpic/srpic_engine.hpp"
#include "srpic/tcp.hpp"

namespace srpic {

struct SrpicSettings {
  bool enabled = true;
  std::size_t block_size = kDefaultBlockSize;
  std::size_t ringbuffer_size = kDefaultRingbufferSize;
};

// Sender host: NIC serialization and window limits.
struct SenderHostSettings {
  double link_rate_bps = 2.5e9;
  // Per-segment wire overhead: IP + TCP with timestamps + Ethernet framing.
  std::uint32_t header_bytes = 90;
  double initial_cwnd = 10.0;
  double max_cwnd = 512.0;
  Micros min_rto = 200'000.0;

  Micros wire_time() const {
    return static_cast<double>(kMss + header_bytes) * 8.0 / link_rate_bps * 1e6;
  }
  double packet_rate() const { return 1e6 / wire_time(); }
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration_s = 5.0;
  std::size_t num_streams = 1;
  PathConfig fwd;
  PathConfig rev;
  SenderMode sender_mode = SenderMode::kStatic;
  bool sack_enabled = false;
  SrpicSettings srpic;
  CoalescingParams coalescing;
  SenderHostSettings sender;
  std::vector<std::uint64_t> seeds{1};

  // Throws std::invalid_argument (or SaturationError) describing the first
  // problem found.
  void validate() const;
};

struct TransferMetrics {
  std::size_t stream_id = 0;
  double goodput_proxy = 0.0;  // Mbps of cumulatively acknowledged data
  std::uint64_t bytes_acked = 0;
  std::uint64_t pkts_retrans = 0;
  std::uint64_t dup_acks_in = 0;
  std::uint64_t sack_blocks_rcvd = 0;
  std::uint64_t segments_sent = 0;
  std::uint64_t fast_retransmits = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t dup_acks_sent = 0;
  std::uint64_t dup_acks_lost = 0;
  std::uint32_t final_dupthresh = kStaticDupthresh;
  ReorderReport reorder_pre;
  ReorderReport reorder_post;
  // Mean packets of this stream per coalescing cycle it appears in.
  double mean_block_size = 0.0;
  Micros max_hold_delay = 0.0;
};

// Receive-path delay checks gathered over a run.
struct HoldDelayAudit {
  Micros per_flow_bound = 0.0;  // block_size / r_sn
  Micros global_bound = 0.0;    // ringbuffer_size / r_sn
  Micros max_hold = 0.0;
  std::uint64_t held_packets = 0;
  // Holds longer than per_flow_bound (only possible when several flows
  // share the ring).
  std::uint64_t per_flow_bound_exceeded = 0;
  std::uint64_t global_bound_violations = 0;
  // Packets whose hold spanned block_size or more fetches of their own flow.
  std::uint64_t own_flow_fetch_violations = 0;
  // Largest number of packets held by SRPIC at once.
  std::size_t max_total_held = 0;
};

struct TransferResult {
  std::vector<TransferMetrics> streams;
  TransferMetrics aggregate;
  HoldDelayAudit audit;
  std::vector<CycleRecord> cycles;
  std::uint64_t events = 0;
};

// Event-driven bulk transfer of `num_streams` flows from one sender to one
// receiver over emulated forward and reverse paths. Uses `cfg.srpic.enabled`
// to choose the receiver arm. Identical (cfg, seed) yields identical output.
TransferResult run_transfer(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace srpic

#endif  // SRPIC_TRANSFER_HPP_
