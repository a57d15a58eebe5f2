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

#ifndef SRPIC_SRPIC_ENGINE_HPP_
#define SRPIC_SRPIC_ENGINE_HPP_

#include <cstddef>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "srpic/packet.hpp"

namespace srpic {

inline constexpr std::size_t kDefaultBlockSize = 32;
inline constexpr std::size_t kDefaultRingbufferSize = 512;

// Per-flow sorting state. Packets of one flow are split into three lists
// relative to the next expected sequence number and delivered as
// prev ++ curr ++ after when the manager is flushed.
class SrpicManager {
 public:
  explicit SrpicManager(std::size_t block_size = kDefaultBlockSize);

  // Adds a suitable packet. Returns the flushed block when the packet count
  // reaches the block size.
  std::optional<Trace> accept(const Packet& p);

  // Delivers everything held and reinitializes the manager.
  Trace flush();

  std::size_t block_size() const { return block_size_; }
  std::size_t packet_count() const { return packet_cnt_; }
  SeqNum next_exp() const { return next_exp_; }
  const Trace& prev_list() const { return prev_list_; }
  const Trace& curr_list() const { return curr_list_; }
  const Trace& after_list() const { return after_list_; }

 private:
  static void sorted_insert(Trace& list, const Packet& p);

  std::size_t block_size_;
  std::size_t packet_cnt_ = 0;
  SeqNum next_exp_ = 0;
  Trace prev_list_;
  Trace curr_list_;
  Trace after_list_;
};

struct SrpicOptions {
  std::size_t block_size = kDefaultBlockSize;
  std::size_t ringbuffer_size = kDefaultRingbufferSize;
  // Drop managers that saw no packets for this many consecutive cycles.
  // 0 disables eviction.
  std::size_t idle_eviction_cycles = 0;
};

// Driver-level sorter for all flows sharing one receive ring.
class SrpicEngine {
 public:
  explicit SrpicEngine(SrpicOptions options = {});

  // The returned reference stays valid until the manager is evicted.
  SrpicManager& find_or_create_manager(const FlowKey& key);
  const SrpicManager* find_manager(const FlowKey& key) const;

  // Handles one packet fetched from the ring, appending anything delivered
  // upward to `out`.
  void process_packet(const Packet& p, Trace& out);

  // End of interrupt coalescing: flushes every manager into `out`.
  void end_cycle(Trace& out);

  // One full ring-buffer emptying: every fetched packet, then end_cycle.
  Trace process_cycle(const Trace& fetched);

  // Flushes managers in creation order and resets the global counter.
  Trace flush_all();
  void flush_all(Trace& out);

  const SrpicOptions& options() const { return options_; }
  std::size_t global_packet_count() const { return global_packet_cnt_; }
  std::size_t manager_count() const { return slots_.size(); }
  std::vector<FlowKey> manager_order() const;
  std::size_t total_held() const;

 private:
  struct Slot {
    FlowKey key;
    SrpicManager manager;
    std::size_t idle_cycles = 0;
    bool active = false;
  };

  SrpicOptions options_;
  std::list<Slot> slots_;
  std::unordered_map<FlowKey, std::list<Slot>::iterator, FlowKeyHash> index_;
  std::size_t global_packet_cnt_ = 0;
};

}  // namespace srpic

#endif  // SRPIC_SRPIC_ENGINE_HPP_
