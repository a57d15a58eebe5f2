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

#include "srpic/transfer.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "srpic/random.hpp"

namespace srpic {
namespace {

constexpr std::uint32_t kSenderAddr = 0x0A000001;
constexpr std::uint32_t kReceiverAddr = 0x0A000002;
constexpr std::uint16_t kBasePort = 40000;
constexpr std::uint16_t kServerPort = 5001;

// Same-time events are handled in this order; ring service steps precede
// arrivals so that an arrival on a service boundary opens the next cycle.
enum class EventKind : std::uint8_t { kService = 0, kDataArrival, kAckArrival, kTimer };

struct Event {
  Micros time;
  EventKind kind;
  std::uint64_t order;
  std::uint32_t index;  // packet/ack pool slot or stream id

  bool operator>(const Event& other) const {
    if (time != other.time) return time > other.time;
    if (kind != other.kind) return kind > other.kind;
    return order > other.order;
  }
};

template <typename T>
class Pool {
 public:
  std::uint32_t put(const T& value) {
    if (!free_.empty()) {
      const std::uint32_t slot = free_.back();
      free_.pop_back();
      items_[slot] = value;
      return slot;
    }
    items_.push_back(value);
    return static_cast<std::uint32_t>(items_.size() - 1);
  }
  T take(std::uint32_t slot) {
    free_.push_back(slot);
    return items_[slot];
  }

 private:
  std::vector<T> items_;
  std::vector<std::uint32_t> free_;
};

struct StreamState {
  StreamState(FlowKey f, TcpSender s, TcpReceiver r)
      : flow(f), sender(std::move(s)), receiver(std::move(r)) {}

  FlowKey flow;
  TcpSender sender;
  TcpReceiver receiver;
  std::uint64_t next_send_index = 0;
  Trace arrivals;
  Trace deliveries;
  // Ordinal of each packet's fetch from the ring, indexed by send_index.
  std::vector<std::uint64_t> fetch_ordinal;
  std::uint64_t fetched = 0;
  std::size_t in_cycle = 0;
  std::uint64_t blocks = 0;
  std::uint64_t block_packets = 0;
  Micros max_hold = 0.0;
  std::uint64_t dup_acks_lost = 0;
  std::optional<Micros> timer_event;
};

class TransferSimulation {
 public:
  TransferSimulation(const ScenarioConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        fwd_(with_seed(cfg.fwd, mix_seed(seed, 0xF0D0 + cfg.fwd.seed))),
        rev_(with_seed(cfg.rev, mix_seed(seed, 0x5EE0 + cfg.rev.seed))),
        ring_(cfg.coalescing),
        engine_(SrpicOptions{cfg.srpic.block_size, cfg.srpic.ringbuffer_size, 0}),
        end_time_(cfg.duration_s * 1e6),
        wire_time_(cfg.sender.wire_time()) {
    SenderConfig sender_cfg;
    sender_cfg.mode = cfg.sender_mode;
    sender_cfg.initial_cwnd = cfg.sender.initial_cwnd;
    sender_cfg.max_cwnd = cfg.sender.max_cwnd;
    sender_cfg.min_rto = cfg.sender.min_rto;
    sender_cfg.initial_rtt = 2e3 * (cfg.fwd.alpha_ms + cfg.rev.alpha_ms) / 2.0;
    streams_.reserve(cfg.num_streams);
    for (std::size_t i = 0; i < cfg.num_streams; ++i) {
      const FlowKey flow{kSenderAddr, kReceiverAddr,
                         static_cast<std::uint16_t>(kBasePort + i), kServerPort};
      const auto iss = static_cast<SeqNum>(mix_seed(seed, 0x1550 + i));
      streams_.emplace_back(flow, TcpSender(iss, sender_cfg),
                            TcpReceiver(flow, iss, cfg.sack_enabled));
    }
    audit_.per_flow_bound = hold_delay_bound(cfg.srpic.block_size, cfg.coalescing.r_sn);
    audit_.global_bound =
        hold_delay_bound(cfg.srpic.ringbuffer_size, cfg.coalescing.r_sn);
  }

  TransferResult run() {
    for (std::uint32_t s = 0; s < streams_.size(); ++s) {
      apply(s, streams_[s].sender.start(0.0), 0.0);
    }
    std::uint64_t events = 0;
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      if (ev.time > end_time_) break;
      queue_.pop();
      ++events;
      switch (ev.kind) {
        case EventKind::kService:
          on_service(ev.time);
          break;
        case EventKind::kDataArrival:
          on_data_arrival(packets_.take(ev.index), ev.time);
          break;
        case EventKind::kAckArrival:
          on_ack_arrival(acks_.take(ev.index), ev.time);
          break;
        case EventKind::kTimer:
          on_timer(ev.index, ev.time);
          break;
      }
    }
    return finish(events);
  }

 private:
  static PathConfig with_seed(PathConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    return cfg;
  }

  void push(Micros time, EventKind kind, std::uint32_t index) {
    queue_.push(Event{time, kind, next_order_++, index});
  }

  std::uint32_t stream_of(const FlowKey& flow) const {
    return static_cast<std::uint32_t>(flow.src_port - kBasePort);
  }

  void apply(std::uint32_t s, const std::vector<SenderAction>& actions, Micros now) {
    for (const SenderAction& action : actions) {
      if (action.kind == SenderAction::Kind::kCwndUpdate) continue;
      transmit(s, action, now);
    }
    schedule_timer(s);
  }

  void transmit(std::uint32_t s, const SenderAction& action, Micros now) {
    StreamState& st = streams_[s];
    const Micros depart = std::max(now, link_free_) + wire_time_;
    link_free_ = depart;
    Packet p;
    p.flow = st.flow;
    p.seq = action.seq;
    p.payload_len = action.len;
    p.send_index = st.next_send_index++;
    p.send_time = depart;
    if (auto arrival = fwd_.transit(depart)) {
      p.arrival_time = *arrival;
      push(*arrival, EventKind::kDataArrival, packets_.put(p));
    }
  }

  void schedule_timer(std::uint32_t s) {
    StreamState& st = streams_[s];
    const auto deadline = st.sender.rto_deadline();
    if (deadline && (!st.timer_event || *deadline < *st.timer_event)) {
      st.timer_event = *deadline;
      push(*deadline, EventKind::kTimer, s);
    }
  }

  void on_timer(std::uint32_t s, Micros now) {
    StreamState& st = streams_[s];
    if (st.timer_event != now) return;  // superseded by an earlier event
    st.timer_event.reset();
    const auto deadline = st.sender.rto_deadline();
    if (deadline && now >= *deadline) {
      apply(s, st.sender.on_timeout(now), now);
    } else {
      schedule_timer(s);
    }
  }

  void on_data_arrival(const Packet& p, Micros now) {
    streams_[stream_of(p.flow)].arrivals.push_back(p);
    if (auto first = ring_.on_arrival(p, now)) push(*first, EventKind::kService, 0);
  }

  void on_service(Micros now) {
    ReceiveRing::Service svc = ring_.on_service_complete();
    Packet p = svc.packet;
    p.fetch_time = now;
    StreamState& st = streams_[stream_of(p.flow)];
    if (st.fetch_ordinal.size() <= p.send_index) {
      st.fetch_ordinal.resize(p.send_index + 1, 0);
    }
    st.fetch_ordinal[p.send_index] = st.fetched++;
    ++st.in_cycle;

    if (cfg_.srpic.enabled) {
      delivered_.clear();
      engine_.process_packet(p, delivered_);
      audit_.max_total_held = std::max(audit_.max_total_held, engine_.total_held());
      if (svc.finished_cycle) engine_.end_cycle(delivered_);
      for (const Packet& q : delivered_) deliver(q, now);
    } else {
      deliver(p, now);
    }

    if (svc.finished_cycle) {
      for (StreamState& stream : streams_) {
        if (stream.in_cycle == 0) continue;
        ++stream.blocks;
        stream.block_packets += stream.in_cycle;
        stream.in_cycle = 0;
      }
    }
    if (svc.next_completion) push(*svc.next_completion, EventKind::kService, 0);
  }

  void audit_hold(StreamState& st, const Packet& q, Micros now) {
    const Micros hold = now - q.fetch_time;
    st.max_hold = std::max(st.max_hold, hold);
    audit_.max_hold = std::max(audit_.max_hold, hold);
    ++audit_.held_packets;
    // Tolerance covers rounding in the service-step timestamps.
    constexpr Micros kSlack = 1e-6;
    if (hold > audit_.per_flow_bound + kSlack) ++audit_.per_flow_bound_exceeded;
    if (hold > audit_.global_bound + kSlack) ++audit_.global_bound_violations;
    const std::uint64_t own_fetches = st.fetched - 1 - st.fetch_ordinal[q.send_index];
    if (own_fetches >= cfg_.srpic.block_size) ++audit_.own_flow_fetch_violations;
  }

  void deliver(const Packet& q, Micros now) {
    StreamState& st = streams_[stream_of(q.flow)];
    if (cfg_.srpic.enabled) audit_hold(st, q, now);
    st.deliveries.push_back(q);
    AckRecord ack = st.receiver.on_segment(q, now);
    if (auto arrival = rev_.transit(now)) {
      ack.arrival_time = *arrival;
      push(*arrival, EventKind::kAckArrival, acks_.put(ack));
    } else if (ack.is_duplicate) {
      ++st.dup_acks_lost;
    }
  }

  void on_ack_arrival(const AckRecord& ack, Micros now) {
    const std::uint32_t s = stream_of(ack.flow);
    apply(s, streams_[s].sender.on_ack(ack, now), now);
  }

  TransferResult finish(std::uint64_t events) {
    TransferResult result;
    result.events = events;
    result.audit = audit_;
    result.cycles = ring_.cycles();
    TransferMetrics& agg = result.aggregate;
    agg.stream_id = streams_.size();
    std::uint64_t all_blocks = 0;
    std::uint64_t all_block_packets = 0;
    for (std::size_t i = 0; i < streams_.size(); ++i) {
      const StreamState& st = streams_[i];
      const SenderCounters& c = st.sender.counters();
      TransferMetrics m;
      m.stream_id = i;
      m.bytes_acked = st.sender.bytes_acked();
      m.goodput_proxy = static_cast<double>(m.bytes_acked) * 8.0 / cfg_.duration_s / 1e6;
      m.pkts_retrans = c.pkts_retrans;
      m.dup_acks_in = c.dup_acks_in;
      m.sack_blocks_rcvd = c.sack_blocks_rcvd;
      m.segments_sent = c.segments_sent;
      m.fast_retransmits = c.fast_retransmits;
      m.timeouts = c.timeouts;
      m.dup_acks_sent = st.receiver.dup_acks_sent();
      m.dup_acks_lost = st.dup_acks_lost;
      m.final_dupthresh = st.sender.dupthresh();
      m.reorder_pre = analyze_reordering(first_arrivals(st.arrivals));
      m.reorder_post = analyze_reordering(first_arrivals(st.deliveries));
      m.mean_block_size = st.blocks == 0 ? 0.0
                                         : static_cast<double>(st.block_packets) /
                                               static_cast<double>(st.blocks);
      m.max_hold_delay = st.max_hold;
      all_blocks += st.blocks;
      all_block_packets += st.block_packets;

      agg.bytes_acked += m.bytes_acked;
      agg.goodput_proxy += m.goodput_proxy;
      agg.pkts_retrans += m.pkts_retrans;
      agg.dup_acks_in += m.dup_acks_in;
      agg.sack_blocks_rcvd += m.sack_blocks_rcvd;
      agg.segments_sent += m.segments_sent;
      agg.fast_retransmits += m.fast_retransmits;
      agg.timeouts += m.timeouts;
      agg.dup_acks_sent += m.dup_acks_sent;
      agg.dup_acks_lost += m.dup_acks_lost;
      agg.final_dupthresh = std::max(agg.final_dupthresh, m.final_dupthresh);
      for (auto [dst, src] : {std::pair{&agg.reorder_pre, &m.reorder_pre},
                              std::pair{&agg.reorder_post, &m.reorder_post}}) {
        dst->total_packets += src->total_packets;
        dst->reordered_count += src->reordered_count;
        dst->max_extent = std::max(dst->max_extent, src->max_extent);
      }
      agg.max_hold_delay = std::max(agg.max_hold_delay, m.max_hold_delay);
      result.streams.push_back(m);
    }
    for (ReorderReport* r : {&agg.reorder_pre, &agg.reorder_post}) {
      r->ratio = r->total_packets == 0 ? 0.0
                                       : static_cast<double>(r->reordered_count) /
                                             static_cast<double>(r->total_packets);
    }
    agg.mean_block_size = all_blocks == 0 ? 0.0
                                          : static_cast<double>(all_block_packets) /
                                                static_cast<double>(all_blocks);
    return result;
  }

  const ScenarioConfig& cfg_;
  PathEmulator fwd_;
  PathEmulator rev_;
  ReceiveRing ring_;
  SrpicEngine engine_;
  Micros end_time_;
  Micros wire_time_;
  Micros link_free_ = 0.0;
  std::vector<StreamState> streams_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_order_ = 0;
  Pool<Packet> packets_;
  Pool<AckRecord> acks_;
  Trace delivered_;
  HoldDelayAudit audit_;
};

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (name.empty()) fail("name must not be empty");
  if (!(duration_s > 0.0)) fail("duration must be positive");
  if (num_streams == 0) fail("num_streams must be at least 1");
  if (num_streams > 1000) fail("num_streams must be at most 1000");
  if (seeds.empty()) fail("seeds must not be empty");
  fwd.validate();
  rev.validate();
  coalescing.validate();
  if (srpic.block_size == 0) fail("srpic.block_size must be at least 1");
  if (srpic.ringbuffer_size == 0) fail("srpic.ringbuffer_size must be at least 1");
  if (!(sender.link_rate_bps > 0.0)) fail("sender.link_rate_bps must be positive");
  if (!(sender.max_cwnd >= 1.0)) fail("sender.max_cwnd must be at least 1");
  if (!(sender.initial_cwnd >= 1.0)) fail("sender.initial_cwnd must be at least 1");
  if (!(sender.min_rto > 0.0)) fail("sender.min_rto_ms must be positive");
  // The sender NIC's line rate bounds the arrival rate at the receiver ring.
  (void)block_size_closed_form(sender.packet_rate(), coalescing);
}

TransferResult run_transfer(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return TransferSimulation(cfg, seed).run();
}

}  // namespace srpic
