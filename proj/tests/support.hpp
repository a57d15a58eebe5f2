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
#ifndef SRPIC_TESTS_SUPPORT_HPP_
#define SRPIC_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "srpic/packet.hpp"
#include "srpic/reorder_metrics.hpp"

namespace srpic::testing {

inline constexpr FlowKey kFlowA{0x0A000001, 0x0A000002, 40000, 5001};
inline constexpr FlowKey kFlowB{0x0A000003, 0x0A000002, 40001, 5001};

inline Packet segment(SeqNum seq, std::uint32_t len = 1, FlowKey flow = kFlowA) {
  Packet p;
  p.flow = flow;
  p.seq = seq;
  p.payload_len = len;
  return p;
}

inline Trace unit_trace(std::initializer_list<SeqNum> seqs, FlowKey flow = kFlowA) {
  Trace t;
  std::uint64_t index = 0;
  for (SeqNum s : seqs) {
    t.push_back(segment(s, 1, flow));
    t.back().send_index = index++;
  }
  return t;
}

inline Trace unit_trace(const std::vector<SeqNum>& seqs, FlowKey flow = kFlowA) {
  Trace t;
  for (SeqNum s : seqs) t.push_back(segment(s, 1, flow));
  return t;
}

inline std::vector<SeqNum> seqs_of(const Trace& t) {
  std::vector<SeqNum> out;
  out.reserve(t.size());
  for (const Packet& p : t) out.push_back(p.seq);
  return out;
}

// Quadratic reference metrics written straight from the definitions.
// Positions are measured from the first packet's sequence number, so the
// trace may straddle the 2^32 wrap.
struct BruteForce {
  std::vector<std::int64_t> pos;

  explicit BruteForce(const Trace& t) {
    for (const Packet& p : t) pos.push_back(seq_diff(t.front().seq, p.seq));
  }

  bool reordered(std::size_t i) const {
    for (std::size_t j = 0; j < i; ++j) {
      if (pos[j] > pos[i]) return true;
    }
    return false;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) n += reordered(i) ? 1 : 0;
    return n;
  }

  std::size_t extent(std::size_t i) const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < i; ++j) n += pos[j] > pos[i] ? 1 : 0;
    return n;
  }

  std::size_t max_extent() const {
    std::size_t best = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) best = std::max(best, extent(i));
    return best;
  }

  BlockClassification classify(const std::vector<std::size_t>& sizes) const {
    std::vector<std::size_t> block_of;
    for (std::size_t b = 0; b < sizes.size(); ++b) block_of.insert(block_of.end(), sizes[b], b);
    BlockClassification out;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (!reordered(i)) continue;
      bool same = true;
      for (std::size_t j = 0; j < i; ++j) {
        if (pos[j] > pos[i] && block_of[j] != block_of[i]) same = false;
      }
      ++(same ? out.intra : out.inter);
    }
    return out;
  }
};

}  // namespace srpic::testing

#endif  // SRPIC_TESTS_SUPPORT_HPP_
