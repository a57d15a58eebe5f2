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

#ifndef SRPIC_REORDER_METRICS_HPP_
#define SRPIC_REORDER_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "srpic/packet.hpp"

namespace srpic {

// Raised when a trace cannot be measured (overlapping or empty segments,
// or a partition that does not cover the trace).
class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Consecutive blocks of an arrival trace, given as block lengths.
struct BlockPartition {
  std::vector<std::size_t> sizes;

  // Blocks of `block` packets, the last one possibly shorter.
  static BlockPartition uniform(std::size_t total, std::size_t block);
};

struct ReorderReport {
  std::size_t total_packets = 0;
  std::size_t reordered_count = 0;
  double ratio = 0.0;
  std::size_t max_extent = 0;
  // Only meaningful when `partitioned` is set.
  bool partitioned = false;
  std::size_t intra_block = 0;
  std::size_t inter_block = 0;
};

struct ReorderCount {
  std::size_t count = 0;
  double ratio = 0.0;
};

// All functions below take a single-flow trace in arrival order whose
// segments are non-empty and pairwise disjoint in sequence space.

// A packet is reordered when its first byte lies below the next expected
// sequence number, which only in-order packets advance.
ReorderCount reordered_count(const Trace& trace);

// Largest number of earlier-arriving packets with a greater sequence number
// over all reordered packets.
std::size_t max_reordering_extent(const Trace& trace);

struct BlockClassification {
  std::size_t intra = 0;
  std::size_t inter = 0;
};

// A reordered packet is intra-block when every earlier-arriving packet with
// a greater sequence number sits in its own block.
BlockClassification classify_block_reordering(const Trace& trace,
                                              const BlockPartition& partition);

ReorderReport analyze_reordering(const Trace& trace,
                                 const std::optional<BlockPartition>& partition = {});

// Keeps the first arrival of each segment start; later copies of the same
// segment (retransmissions) are dropped. Order is preserved.
Trace first_arrivals(const Trace& trace);

}  // namespace srpic

#endif  // SRPIC_REORDER_METRICS_HPP_
