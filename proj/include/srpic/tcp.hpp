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

#ifndef SRPIC_TCP_HPP_
#define SRPIC_TCP_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "srpic/packet.hpp"

namespace srpic {

inline constexpr std::uint32_t kMss = 1448;
inline constexpr std::size_t kMaxSackBlocks = 3;
inline constexpr std::uint32_t kStaticDupthresh = 3;
inline constexpr std::uint32_t kMaxDupthresh = 127;

struct SackBlock {
  SeqNum start = 0;
  SeqNum end = 0;

  friend bool operator==(const SackBlock&, const SackBlock&) = default;
};

struct AckRecord {
  FlowKey flow;
  SeqNum ack_seq = 0;
  std::array<SackBlock, kMaxSackBlocks> sack{};
  std::uint8_t sack_count = 0;
  bool is_duplicate = false;
  Micros send_time = 0.0;
  Micros arrival_time = 0.0;
  // Timestamp echo: send time of the segment that triggered this ACK.
  Micros echo_send_time = 0.0;

  std::vector<SackBlock> sack_blocks() const {
    return {sack.begin(), sack.begin() + sack_count};
  }
};

// Cumulative-ACK receiver with an out-of-order queue and optional SACK.
// Every segment is acknowledged immediately.
class TcpReceiver {
 public:
  TcpReceiver(FlowKey flow, SeqNum initial_seq, bool sack_enabled);

  AckRecord on_segment(const Packet& seg, Micros now);

  SeqNum rcv_nxt() const { return rcv_nxt_; }
  const std::vector<SackBlock>& out_of_order() const { return ooo_; }
  std::uint64_t dup_acks_sent() const { return dup_acks_sent_; }
  std::uint64_t sack_blocks_sent() const { return sack_blocks_sent_; }
  // Bytes handed to the application in order.
  std::uint64_t bytes_delivered() const { return bytes_delivered_; }

 private:
  void insert_out_of_order(SeqNum start, SeqNum end);
  void advance_from_queue();
  void fill_sack(AckRecord& ack) const;

  FlowKey flow_;
  SeqNum rcv_nxt_;
  bool sack_enabled_;
  std::vector<SackBlock> ooo_;
  // Start of each queued block, most recently changed first.
  std::vector<SeqNum> recency_;
  std::uint64_t dup_acks_sent_ = 0;
  std::uint64_t sack_blocks_sent_ = 0;
  std::uint64_t bytes_delivered_ = 0;
};

enum class SenderMode { kStatic, kAdaptive };

struct SenderConfig {
  SenderMode mode = SenderMode::kStatic;
  std::uint32_t mss = kMss;
  double initial_cwnd = 10.0;
  double max_cwnd = 512.0;
  Micros min_rto = 200'000.0;
  Micros initial_rtt = 5'000.0;
};

struct SenderCounters {
  std::uint64_t pkts_retrans = 0;
  std::uint64_t dup_acks_in = 0;
  std::uint64_t sack_blocks_rcvd = 0;
  std::uint64_t segments_sent = 0;
  std::uint64_t fast_retransmits = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t spurious_retransmits = 0;
};

struct SenderAction {
  enum class Kind { kTransmit, kRetransmit, kCwndUpdate };
  Kind kind = Kind::kTransmit;
  SeqNum seq = 0;
  std::uint32_t len = 0;
  double cwnd = 0.0;
};

// Bulk-data sender with Reno-style AIMD, fast retransmit on `dupthresh`
// duplicate ACKs, and a retransmission timeout. In adaptive mode the
// threshold follows observed reordering, up to kMaxDupthresh.
class TcpSender {
 public:
  TcpSender(SeqNum initial_seq, SenderConfig config);

  // Opens the initial window.
  std::vector<SenderAction> start(Micros now);
  std::vector<SenderAction> on_ack(const AckRecord& ack, Micros now);
  std::vector<SenderAction> on_timeout(Micros now);

  // Pending retransmission timer, if any data is outstanding.
  std::optional<Micros> rto_deadline() const { return rto_deadline_; }

  SeqNum snd_una() const { return snd_una_; }
  SeqNum snd_nxt() const { return snd_nxt_; }
  SeqNum snd_max() const { return snd_max_; }
  double cwnd() const { return cwnd_; }
  double ssthresh() const { return ssthresh_; }
  std::uint32_t dupthresh() const { return dupthresh_; }
  std::uint32_t dup_ack_count() const { return dup_ack_count_; }
  Micros rtt_estimate() const { return srtt_; }
  Micros rto() const;
  std::uint64_t bytes_acked() const { return bytes_acked_; }
  const SenderCounters& counters() const { return counters_; }

  struct Segment {
    SeqNum seq = 0;
    std::uint32_t len = 0;
    bool sacked = false;
    bool retransmitted = false;
    Micros last_send_time = 0.0;
  };
  const std::deque<Segment>& retransmit_queue() const { return queue_; }

 private:
  std::size_t in_flight() const;
  Segment* segment_at(SeqNum seq);
  void send_allowed(Micros now, std::vector<SenderAction>& actions);
  void note_reordering(std::uint32_t degree, Micros now);
  void decay_dupthresh(Micros now);
  void arm_timer(Micros now);

  SenderConfig config_;
  SeqNum iss_;
  SeqNum snd_una_;
  SeqNum snd_nxt_;
  SeqNum snd_max_;
  double cwnd_;
  double ssthresh_;
  std::uint32_t dupthresh_ = kStaticDupthresh;
  std::uint32_t dup_ack_count_ = 0;
  Micros srtt_;
  std::uint32_t backoff_ = 0;
  std::optional<Micros> rto_deadline_;
  Micros last_reorder_evidence_ = 0.0;
  std::uint64_t bytes_acked_ = 0;
  std::deque<Segment> queue_;  // covers [snd_una, snd_max)
  std::size_t sacked_ = 0;     // SACKed entries in queue_
  SenderCounters counters_;
};

}  // namespace srpic

#endif  // SRPIC_TCP_HPP_
