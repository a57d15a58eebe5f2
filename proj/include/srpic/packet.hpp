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

#ifndef SRPIC_PACKET_HPP_
#define SRPIC_PACKET_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace srpic {

// 32-bit TCP sequence number. Arithmetic wraps mod 2^32.
using SeqNum = std::uint32_t;

// Simulated time in microseconds.
using Micros = double;

struct FlowKey {
  std::uint32_t src_addr = 0;
  std::uint32_t dst_addr = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;

  friend bool operator==(const FlowKey&, const FlowKey&) = default;
};

struct FlowKeyHash {
  std::size_t operator()(const FlowKey& key) const noexcept {
    std::uint64_t h = (std::uint64_t{key.src_addr} << 32) | key.dst_addr;
    h ^= (std::uint64_t{key.src_port} << 16 | key.dst_port) *
         0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
  }
};

// TCP control bits carried by a simulated segment.
enum class TcpFlag : std::uint8_t {
  kFin = 1 << 0,
  kSyn = 1 << 1,
  kRst = 1 << 2,
  kPsh = 1 << 3,
  kAck = 1 << 4,
  kUrg = 1 << 5,
  kEce = 1 << 6,
  kCwr = 1 << 7,
};

class TcpFlags {
 public:
  constexpr TcpFlags() = default;
  constexpr TcpFlags(std::initializer_list<TcpFlag> flags) {
    for (TcpFlag f : flags) bits_ |= static_cast<std::uint8_t>(f);
  }

  constexpr bool has(TcpFlag f) const {
    return (bits_ & static_cast<std::uint8_t>(f)) != 0;
  }
  constexpr void set(TcpFlag f) { bits_ |= static_cast<std::uint8_t>(f); }
  constexpr std::uint8_t bits() const { return bits_; }

  friend constexpr bool operator==(TcpFlags, TcpFlags) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct Packet {
  FlowKey flow;
  SeqNum seq = 0;
  std::uint32_t payload_len = 0;
  TcpFlags flags{TcpFlag::kAck};
  bool is_fragment = false;
  // Any IP option, or any TCP option other than timestamps.
  bool has_disallowed_options = false;
  std::uint64_t send_index = 0;
  Micros send_time = 0.0;
  Micros arrival_time = 0.0;
  // When the receive path fetched the packet from the ring buffer.
  Micros fetch_time = 0.0;
};

using Trace = std::vector<Packet>;

// Whether a packet may be held back for sorting. Fragments, packets with
// options other than timestamps, and segments carrying ECE, CWR, URG, RST,
// SYN or FIN must be delivered immediately.
bool is_suitable(const Packet& p);

// Serial-number comparison (RFC 1982 style) over 32-bit sequence space.
// Valid when the two values are less than 2^31 apart.
constexpr std::strong_ordering seq_cmp(SeqNum a, SeqNum b) {
  if (a == b) return std::strong_ordering::equal;
  return static_cast<SeqNum>(a - b) > 0x80000000U
             ? std::strong_ordering::less
             : std::strong_ordering::greater;
}

constexpr bool seq_lt(SeqNum a, SeqNum b) { return seq_cmp(a, b) < 0; }
constexpr bool seq_leq(SeqNum a, SeqNum b) { return seq_cmp(a, b) <= 0; }
constexpr bool seq_gt(SeqNum a, SeqNum b) { return seq_cmp(a, b) > 0; }
constexpr bool seq_geq(SeqNum a, SeqNum b) { return seq_cmp(a, b) >= 0; }

// Signed distance from `from` to `to` in sequence space.
constexpr std::int64_t seq_diff(SeqNum from, SeqNum to) {
  return static_cast<std::int32_t>(to - from);
}

constexpr SeqNum payload_end(const Packet& p) {
  return static_cast<SeqNum>(p.seq + p.payload_len);
}

}  // namespace srpic

#endif  // SRPIC_PACKET_HPP_
