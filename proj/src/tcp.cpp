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

#include "srpic/tcp.hpp"

#include <algorithm>
#include <cmath>

namespace srpic {

TcpReceiver::TcpReceiver(FlowKey flow, SeqNum initial_seq, bool sack_enabled)
    : flow_(flow), rcv_nxt_(initial_seq), sack_enabled_(sack_enabled) {}

AckRecord TcpReceiver::on_segment(const Packet& seg, Micros now) {
  const SeqNum start = seg.seq;
  const SeqNum end = payload_end(seg);
  bool advanced = false;
  if (seq_leq(start, rcv_nxt_) && seq_gt(end, rcv_nxt_)) {
    bytes_delivered_ += static_cast<std::uint64_t>(seq_diff(rcv_nxt_, end));
    rcv_nxt_ = end;
    advance_from_queue();
    advanced = true;
  } else if (seq_gt(start, rcv_nxt_)) {
    insert_out_of_order(start, end);
  }
  // Otherwise the segment lies entirely below rcv_nxt: a stale copy.

  AckRecord ack;
  ack.flow = flow_;
  ack.ack_seq = rcv_nxt_;
  ack.is_duplicate = !advanced;
  ack.send_time = now;
  ack.echo_send_time = seg.send_time;
  if (ack.is_duplicate) ++dup_acks_sent_;
  if (sack_enabled_) fill_sack(ack);
  sack_blocks_sent_ += ack.sack_count;
  return ack;
}

void TcpReceiver::insert_out_of_order(SeqNum start, SeqNum end) {
  // First block that ends at or after `start` (adjacent blocks merge).
  auto first = std::find_if(ooo_.begin(), ooo_.end(), [&](const SackBlock& b) {
    return seq_geq(b.end, start);
  });
  auto last = first;
  SackBlock merged{start, end};
  while (last != ooo_.end() && seq_leq(last->start, end)) {
    if (seq_lt(last->start, merged.start)) merged.start = last->start;
    if (seq_gt(last->end, merged.end)) merged.end = last->end;
    std::erase(recency_, last->start);
    ++last;
  }
  auto pos = ooo_.erase(first, last);
  ooo_.insert(pos, merged);
  recency_.insert(recency_.begin(), merged.start);
}

void TcpReceiver::advance_from_queue() {
  while (!ooo_.empty() && seq_leq(ooo_.front().start, rcv_nxt_)) {
    const SackBlock block = ooo_.front();
    if (seq_gt(block.end, rcv_nxt_)) {
      bytes_delivered_ += static_cast<std::uint64_t>(seq_diff(rcv_nxt_, block.end));
      rcv_nxt_ = block.end;
    }
    std::erase(recency_, block.start);
    ooo_.erase(ooo_.begin());
  }
}

void TcpReceiver::fill_sack(AckRecord& ack) const {
  for (SeqNum start : recency_) {
    if (ack.sack_count == kMaxSackBlocks) break;
    auto it = std::find_if(ooo_.begin(), ooo_.end(),
                           [&](const SackBlock& b) { return b.start == start; });
    if (it != ooo_.end()) ack.sack[ack.sack_count++] = *it;
  }
}

TcpSender::TcpSender(SeqNum initial_seq, SenderConfig config)
    : config_(config),
      iss_(initial_seq),
      snd_una_(initial_seq),
      snd_nxt_(initial_seq),
      snd_max_(initial_seq),
      cwnd_(config.initial_cwnd),
      ssthresh_(config.max_cwnd),
      srtt_(config.initial_rtt) {}

Micros TcpSender::rto() const {
  return std::max(config_.min_rto, 2.0 * srtt_) * static_cast<double>(1U << backoff_);
}

// Segments sent and neither acknowledged nor SACKed.
std::size_t TcpSender::in_flight() const {
  if (snd_nxt_ == snd_max_) return queue_.size() - sacked_;
  std::size_t n = 0;
  for (const Segment& seg : queue_) {
    if (!seq_lt(seg.seq, snd_nxt_)) break;
    if (!seg.sacked) ++n;
  }
  return n;
}

TcpSender::Segment* TcpSender::segment_at(SeqNum seq) {
  const std::int64_t offset = seq_diff(snd_una_, seq);
  if (offset < 0) return nullptr;
  const auto idx = static_cast<std::size_t>(offset / config_.mss);
  if (idx >= queue_.size() || queue_[idx].seq != seq) return nullptr;
  return &queue_[idx];
}

void TcpSender::arm_timer(Micros now) {
  if (snd_una_ == snd_max_) {
    rto_deadline_.reset();
  } else if (!rto_deadline_) {
    rto_deadline_ = now + rto();
  }
}

void TcpSender::send_allowed(Micros now, std::vector<SenderAction>& actions) {
  const auto window = static_cast<std::size_t>(
      std::max(1.0, std::floor(std::min(cwnd_, config_.max_cwnd))));
  std::size_t flight = in_flight();
  while (flight < window) {
    if (snd_nxt_ == snd_max_) {
      queue_.push_back(Segment{snd_nxt_, config_.mss, false, false, now});
      actions.push_back({SenderAction::Kind::kTransmit, snd_nxt_, config_.mss, cwnd_});
      snd_nxt_ += config_.mss;
      snd_max_ = snd_nxt_;
      ++counters_.segments_sent;
      ++flight;
      continue;
    }
    Segment* seg = segment_at(snd_nxt_);
    if (seg == nullptr) break;
    if (!seg->sacked) {
      seg->retransmitted = true;
      seg->last_send_time = now;
      actions.push_back({SenderAction::Kind::kRetransmit, seg->seq, seg->len, cwnd_});
      ++counters_.pkts_retrans;
      ++counters_.segments_sent;
      ++flight;
    }
    snd_nxt_ += seg->len;
  }
  arm_timer(now);
}

std::vector<SenderAction> TcpSender::start(Micros now) {
  std::vector<SenderAction> actions;
  send_allowed(now, actions);
  return actions;
}

void TcpSender::note_reordering(std::uint32_t degree, Micros now) {
  if (config_.mode != SenderMode::kAdaptive) return;
  dupthresh_ = std::min(kMaxDupthresh, std::max(dupthresh_, degree + 1));
  last_reorder_evidence_ = now;
}

void TcpSender::decay_dupthresh(Micros now) {
  if (config_.mode != SenderMode::kAdaptive || dupthresh_ <= kStaticDupthresh) return;
  const Micros period = std::max(config_.min_rto, 2.0 * srtt_);
  const auto quiet = static_cast<std::uint64_t>((now - last_reorder_evidence_) / period);
  if (quiet == 0) return;
  const std::uint64_t above = dupthresh_ - kStaticDupthresh;
  dupthresh_ -= static_cast<std::uint32_t>(std::min(quiet, above));
  last_reorder_evidence_ += static_cast<double>(quiet) * period;
}

std::vector<SenderAction> TcpSender::on_ack(const AckRecord& ack, Micros now) {
  std::vector<SenderAction> actions;
  decay_dupthresh(now);
  counters_.sack_blocks_rcvd += ack.sack_count;
  for (std::size_t b = 0; b < ack.sack_count; ++b) {
    const std::int64_t lo = seq_diff(snd_una_, ack.sack[b].start);
    const std::int64_t hi = seq_diff(snd_una_, ack.sack[b].end);
    const std::int64_t mss = config_.mss;
    const std::int64_t first = std::max<std::int64_t>(0, (lo + mss - 1) / mss);
    const std::int64_t last =
        std::min<std::int64_t>(static_cast<std::int64_t>(queue_.size()), hi / mss);
    for (std::int64_t i = first; i < last; ++i) {
      Segment& seg = queue_[static_cast<std::size_t>(i)];
      if (!seg.sacked) ++sacked_;
      seg.sacked = true;
    }
  }

  const SeqNum a = ack.ack_seq;
  if (seq_gt(a, snd_una_) && seq_leq(a, snd_max_)) {
    if (dup_ack_count_ > 0 && !queue_.empty()) {
      const Segment& hole = queue_.front();
      const bool spurious =
          hole.retransmitted && ack.echo_send_time < hole.last_send_time;
      if (spurious) ++counters_.spurious_retransmits;
      if (!hole.retransmitted || spurious) note_reordering(dup_ack_count_, now);
    }
    if (const Micros sample = now - ack.echo_send_time; sample > 0.0) {
      srtt_ += (sample - srtt_) / 8.0;
    }
    const auto acked = static_cast<std::uint64_t>(seq_diff(snd_una_, a));
    bytes_acked_ += acked;
    while (!queue_.empty() && seq_leq(queue_.front().seq + queue_.front().len, a)) {
      if (queue_.front().sacked) --sacked_;
      queue_.pop_front();
    }
    snd_una_ = a;
    if (seq_lt(snd_nxt_, snd_una_)) snd_nxt_ = snd_una_;
    dup_ack_count_ = 0;
    backoff_ = 0;
    cwnd_ += cwnd_ < ssthresh_ ? 1.0 : 1.0 / cwnd_;
    cwnd_ = std::min(cwnd_, config_.max_cwnd);
    actions.push_back({SenderAction::Kind::kCwndUpdate, 0, 0, cwnd_});
    rto_deadline_.reset();
  } else if (a == snd_una_ && snd_una_ != snd_max_) {
    ++counters_.dup_acks_in;
    if (++dup_ack_count_ == dupthresh_ && !queue_.empty()) {
      Segment& hole = queue_.front();
      ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
      cwnd_ = ssthresh_;
      hole.retransmitted = true;
      hole.last_send_time = now;
      actions.push_back({SenderAction::Kind::kRetransmit, hole.seq, hole.len, cwnd_});
      actions.push_back({SenderAction::Kind::kCwndUpdate, 0, 0, cwnd_});
      ++counters_.pkts_retrans;
      ++counters_.fast_retransmits;
      ++counters_.segments_sent;
      rto_deadline_ = now + rto();
    }
  }
  send_allowed(now, actions);
  return actions;
}

std::vector<SenderAction> TcpSender::on_timeout(Micros now) {
  std::vector<SenderAction> actions;
  if (snd_una_ == snd_max_) {
    rto_deadline_.reset();
    return actions;
  }
  ++counters_.timeouts;
  ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
  cwnd_ = 1.0;
  dup_ack_count_ = 0;
  snd_nxt_ = snd_una_;
  backoff_ = std::min<std::uint32_t>(backoff_ + 1, 6);
  rto_deadline_.reset();
  actions.push_back({SenderAction::Kind::kCwndUpdate, 0, 0, cwnd_});
  send_allowed(now, actions);
  return actions;
}

}  // namespace srpic
