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
#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "srpic/tcp.hpp"
#include "support.hpp"

namespace srpic {
namespace {

using testing::kFlowA;
using testing::segment;
using Kind = SenderAction::Kind;

std::size_t count_kind(const std::vector<SenderAction>& actions, Kind kind) {
  return static_cast<std::size_t>(std::count_if(
      actions.begin(), actions.end(), [&](const SenderAction& a) { return a.kind == kind; }));
}

TEST(Receiver, InOrderAdvances) {
  TcpReceiver rx(kFlowA, 100, false);
  const AckRecord ack = rx.on_segment(segment(100, 10), 1.0);
  EXPECT_EQ(ack.ack_seq, 110U);
  EXPECT_FALSE(ack.is_duplicate);
  EXPECT_EQ(rx.dup_acks_sent(), 0U);
}

TEST(Receiver, GapThenFill) {
  TcpReceiver rx(kFlowA, 100, true);
  const AckRecord dup = rx.on_segment(segment(120, 10), 1.0);
  EXPECT_EQ(dup.ack_seq, 100U);
  EXPECT_TRUE(dup.is_duplicate);
  EXPECT_EQ(dup.sack_blocks(), (std::vector<SackBlock>{{120, 130}}));

  const AckRecord fill = rx.on_segment(segment(100, 10), 2.0);
  EXPECT_EQ(fill.ack_seq, 110U);
  EXPECT_FALSE(fill.is_duplicate);
  EXPECT_EQ(fill.sack_blocks(), (std::vector<SackBlock>{{120, 130}}));

  const AckRecord close = rx.on_segment(segment(110, 10), 3.0);
  EXPECT_EQ(close.ack_seq, 130U);
  EXPECT_EQ(close.sack_count, 0U);
  EXPECT_TRUE(rx.out_of_order().empty());
  EXPECT_EQ(rx.bytes_delivered(), 30U);
}

TEST(Receiver, SackMostRecentFirstCappedAtThree) {
  TcpReceiver rx(kFlowA, 0, true);
  rx.on_segment(segment(10, 5), 0);
  rx.on_segment(segment(30, 5), 0);
  rx.on_segment(segment(50, 5), 0);
  const AckRecord a = rx.on_segment(segment(70, 5), 0);
  EXPECT_EQ(a.sack_blocks(), (std::vector<SackBlock>{{70, 75}, {50, 55}, {30, 35}}));
  // Extending an older block moves it to the front; adjacent ranges merge.
  const AckRecord b = rx.on_segment(segment(15, 5), 0);
  EXPECT_EQ(b.sack_blocks(), (std::vector<SackBlock>{{10, 20}, {70, 75}, {50, 55}}));
  EXPECT_EQ(rx.out_of_order().size(), 4U);
  const AckRecord c = rx.on_segment(segment(20, 10), 0);
  EXPECT_EQ(c.sack_blocks()[0], (SackBlock{10, 35}));
  EXPECT_EQ(rx.out_of_order().size(), 3U);
}

TEST(Receiver, NoSackWhenDisabled) {
  TcpReceiver rx(kFlowA, 0, false);
  const AckRecord a = rx.on_segment(segment(10, 5), 0);
  EXPECT_TRUE(a.is_duplicate);
  EXPECT_EQ(a.sack_count, 0U);
  EXPECT_EQ(rx.sack_blocks_sent(), 0U);
}

TEST(Receiver, StaleCopyIsDuplicate) {
  TcpReceiver rx(kFlowA, 0, true);
  rx.on_segment(segment(0, 10), 0);
  const AckRecord a = rx.on_segment(segment(0, 10), 1);
  EXPECT_TRUE(a.is_duplicate);
  EXPECT_EQ(a.ack_seq, 10U);
  EXPECT_EQ(rx.dup_acks_sent(), 1U);
}

TEST(Receiver, InOrderStreamHasNoDuplicates) {
  TcpReceiver rx(kFlowA, 0xFFFFFF00U, true);
  SeqNum s = 0xFFFFFF00U;
  for (int i = 0; i < 1000; ++i, s += 100) EXPECT_FALSE(rx.on_segment(segment(s, 100), i).is_duplicate);
  EXPECT_EQ(rx.dup_acks_sent(), 0U);
  EXPECT_EQ(rx.bytes_delivered(), 100000U);
}

SenderConfig small_config(SenderMode mode) {
  SenderConfig cfg;
  cfg.mode = mode;
  cfg.mss = 100;
  cfg.initial_cwnd = 20;
  cfg.max_cwnd = 20;
  return cfg;
}

AckRecord ack_for(SeqNum ack_seq, bool dup, Micros echo) {
  AckRecord a;
  a.flow = kFlowA;
  a.ack_seq = ack_seq;
  a.is_duplicate = dup;
  a.echo_send_time = echo;
  return a;
}

TEST(Sender, StartFillsInitialWindow) {
  TcpSender tx(1000, small_config(SenderMode::kStatic));
  const auto actions = tx.start(0.0);
  EXPECT_EQ(count_kind(actions, Kind::kTransmit), 20U);
  EXPECT_EQ(actions.front().seq, 1000U);
  EXPECT_EQ(tx.snd_nxt(), 3000U);
  EXPECT_EQ(tx.retransmit_queue().size(), 20U);
  ASSERT_TRUE(tx.rto_deadline().has_value());
  EXPECT_DOUBLE_EQ(*tx.rto_deadline(), 200000.0);
}

TEST(Sender, ThirdDuplicateTriggersOneRetransmit) {
  TcpSender tx(1000, small_config(SenderMode::kStatic));
  tx.start(0.0);
  std::size_t retrans = 0;
  for (int i = 1; i <= 5; ++i) {
    const auto actions = tx.on_ack(ack_for(1000, true, 0.0), 5000.0 + i);
    const std::size_t n = count_kind(actions, Kind::kRetransmit);
    EXPECT_EQ(n, i == 3 ? 1U : 0U) << "dup " << i;
    retrans += n;
  }
  EXPECT_EQ(retrans, 1U);
  EXPECT_EQ(tx.counters().pkts_retrans, 1U);
  EXPECT_EQ(tx.counters().dup_acks_in, 5U);
  EXPECT_DOUBLE_EQ(tx.ssthresh(), 10.0);
  EXPECT_DOUBLE_EQ(tx.cwnd(), 10.0);
}

TEST(Sender, TwoDuplicatesThenCoverNoRetransmit) {
  TcpSender tx(1000, small_config(SenderMode::kStatic));
  tx.start(0.0);
  tx.on_ack(ack_for(1000, true, 0.0), 5000.0);
  tx.on_ack(ack_for(1000, true, 0.0), 5001.0);
  const auto actions = tx.on_ack(ack_for(1400, false, 0.0), 5002.0);
  EXPECT_EQ(count_kind(actions, Kind::kRetransmit), 0U);
  EXPECT_EQ(tx.counters().pkts_retrans, 0U);
  EXPECT_EQ(tx.dup_ack_count(), 0U);
  EXPECT_EQ(tx.snd_una(), 1400U);
  EXPECT_EQ(tx.dupthresh(), kStaticDupthresh);
}

// Ten segments overtake the first one; the late original then covers them.
void reorder_episode(TcpSender& tx, SeqNum hole, int dups, Micros now, Micros echo) {
  for (int i = 0; i < dups; ++i) tx.on_ack(ack_for(hole, true, echo), now + i);
  tx.on_ack(ack_for(hole + static_cast<SeqNum>(dups + 1) * 100, false, echo), now + dups);
}

TEST(Sender, AdaptiveThresholdFollowsReordering) {
  TcpSender tx(1000, small_config(SenderMode::kAdaptive));
  tx.start(0.0);
  reorder_episode(tx, 1000, 10, 5000.0, 0.0);
  EXPECT_EQ(tx.counters().pkts_retrans, 1U);
  EXPECT_EQ(tx.counters().spurious_retransmits, 1U);
  EXPECT_GE(tx.dupthresh(), 11U);
  EXPECT_LE(tx.dupthresh(), kMaxDupthresh);

  const SeqNum una = tx.snd_una();
  reorder_episode(tx, una, 10, 6000.0, 5500.0);
  EXPECT_EQ(tx.counters().pkts_retrans, 1U);
}

TEST(Sender, StaticThresholdNeverMoves) {
  TcpSender tx(1000, small_config(SenderMode::kStatic));
  tx.start(0.0);
  reorder_episode(tx, 1000, 10, 5000.0, 0.0);
  EXPECT_EQ(tx.dupthresh(), kStaticDupthresh);
  const SeqNum una = tx.snd_una();
  reorder_episode(tx, una, 10, 6000.0, 5500.0);
  EXPECT_EQ(tx.counters().pkts_retrans, 2U);
}

TEST(Sender, AdaptiveThresholdCappedAndDecays) {
  SenderConfig cfg = small_config(SenderMode::kAdaptive);
  cfg.initial_cwnd = cfg.max_cwnd = 300;
  TcpSender tx(0, cfg);
  tx.start(0.0);
  reorder_episode(tx, 0, 200, 5000.0, 0.0);
  EXPECT_EQ(tx.dupthresh(), kMaxDupthresh);
  // No evidence for five RTO periods: one step down per period.
  tx.on_ack(ack_for(tx.snd_una() + 100, false, 1e6), 5000.0 + 5 * 200000.0 + 300.0);
  EXPECT_EQ(tx.dupthresh(), kMaxDupthresh - 5);
}

TEST(Sender, SackMarksSegmentsAndTimeoutSkipsThem) {
  TcpSender tx(0, small_config(SenderMode::kStatic));
  tx.start(0.0);
  AckRecord a = ack_for(0, true, 0.0);
  a.sack[0] = SackBlock{100, 400};
  a.sack[1] = SackBlock{600, 700};
  a.sack_count = 2;
  tx.on_ack(a, 10.0);
  EXPECT_EQ(tx.counters().sack_blocks_rcvd, 2U);
  const auto& q = tx.retransmit_queue();
  EXPECT_FALSE(q[0].sacked);
  EXPECT_TRUE(q[1].sacked && q[2].sacked && q[3].sacked);
  EXPECT_FALSE(q[4].sacked);
  EXPECT_TRUE(q[6].sacked);

  const auto actions = tx.on_timeout(*tx.rto_deadline());
  EXPECT_EQ(tx.counters().timeouts, 1U);
  EXPECT_DOUBLE_EQ(tx.cwnd(), 1.0);
  ASSERT_EQ(count_kind(actions, Kind::kRetransmit), 1U);
  EXPECT_EQ(actions.back().seq, 0U);
  // Window of one: the next ACK opens two, skipping the SACKed run.
  const auto more = tx.on_ack(ack_for(100, false, 0.0), 300000.0);
  std::vector<SeqNum> resent;
  for (const auto& act : more)
    if (act.kind == Kind::kRetransmit) resent.push_back(act.seq);
  EXPECT_EQ(resent, (std::vector<SeqNum>{400, 500}));
}

TEST(Sender, TimeoutBacksOffAndResetsOnAck) {
  TcpSender tx(0, small_config(SenderMode::kStatic));
  tx.start(0.0);
  EXPECT_DOUBLE_EQ(tx.rto(), 200000.0);
  tx.on_timeout(200000.0);
  EXPECT_DOUBLE_EQ(tx.rto(), 400000.0);
  tx.on_timeout(600000.0);
  EXPECT_DOUBLE_EQ(tx.rto(), 800000.0);
  tx.on_ack(ack_for(100, false, 600000.0), 605000.0);
  EXPECT_DOUBLE_EQ(tx.rto(), 200000.0);
}

TEST(Sender, SlowStartThenLinearGrowth) {
  SenderConfig cfg = small_config(SenderMode::kStatic);
  cfg.initial_cwnd = 2;
  cfg.max_cwnd = 1000;
  TcpSender tx(0, cfg);
  tx.start(0.0);
  tx.on_ack(ack_for(100, false, 0.0), 5000.0);
  EXPECT_DOUBLE_EQ(tx.cwnd(), 3.0);
  for (int i = 0; i < 3; ++i) tx.on_ack(ack_for(100, true, 0.0), 5001.0 + i);
  EXPECT_DOUBLE_EQ(tx.cwnd(), 2.0);  // max(3 / 2, 2)
  tx.on_ack(ack_for(tx.snd_max(), false, 0.0), 6000.0);
  EXPECT_DOUBLE_EQ(tx.cwnd(), 2.5);
}

// Sender and receiver joined back to back, with every `period`-th segment
// held back by `lag` positions.
struct Loopback {
  TcpSender tx;
  TcpReceiver rx;
  std::vector<Packet> wire;
  Micros now = 0.0;

  explicit Loopback(SenderMode mode) : tx(500, small_config(mode)), rx(kFlowA, 500, true) {}

  void send(const std::vector<SenderAction>& actions) {
    for (const auto& a : actions) {
      if (a.kind == Kind::kCwndUpdate) continue;
      Packet p = segment(a.seq, a.len);
      p.send_time = now;
      wire.push_back(p);
    }
  }

  void run(int rounds, std::size_t period, std::size_t lag) {
    send(tx.start(now));
    std::size_t sent = 0;
    for (int r = 0; r < rounds && !wire.empty(); ++r) {
      std::vector<Packet> batch;
      batch.swap(wire);
      for (std::size_t i = 0; i + lag < batch.size(); ++i) {
        if ((sent + i) % period == 0) std::rotate(batch.begin() + i, batch.begin() + i + 1,
                                                  batch.begin() + i + lag + 1);
      }
      sent += batch.size();
      for (const Packet& p : batch) {
        now += 10.0;
        send(tx.on_ack(rx.on_segment(p, now), now));
      }
    }
  }
};

TEST(Loopback, CumulativeAckSoundness) {
  for (SenderMode mode : {SenderMode::kStatic, SenderMode::kAdaptive}) {
    Loopback lb(mode);
    lb.run(200, 7, 4);
    EXPECT_EQ(lb.tx.snd_una(), lb.rx.rcv_nxt());
    EXPECT_EQ(lb.tx.bytes_acked(), lb.rx.bytes_delivered());
    EXPECT_GT(lb.tx.bytes_acked(), 50000U);
    EXPECT_GE(lb.tx.counters().pkts_retrans, lb.tx.counters().fast_retransmits);
  }
}

TEST(Loopback, AdaptiveRetransmitsLessUnderReordering) {
  Loopback fixed(SenderMode::kStatic);
  Loopback adaptive(SenderMode::kAdaptive);
  fixed.run(200, 9, 6);
  adaptive.run(200, 9, 6);
  EXPECT_GT(fixed.tx.counters().pkts_retrans, 0U);
  EXPECT_LT(adaptive.tx.counters().pkts_retrans, fixed.tx.counters().pkts_retrans);
}

}  // namespace
}  // namespace srpic
