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

#include "srpic/srpic_engine.hpp"

#include <algorithm>
#include <utility>

namespace srpic {

SrpicManager::SrpicManager(std::size_t block_size) : block_size_(block_size) {}

void SrpicManager::sorted_insert(Trace& list, const Packet& p) {
  // Equal sequence numbers keep arrival order.
  auto pos = std::upper_bound(
      list.begin(), list.end(), p.seq,
      [](SeqNum seq, const Packet& q) { return seq_lt(seq, q.seq); });
  list.insert(pos, p);
}

std::optional<Trace> SrpicManager::accept(const Packet& p) {
  if (packet_cnt_ == 0) {
    next_exp_ = payload_end(p);
    packet_cnt_ = 1;
    curr_list_.push_back(p);
  } else {
    const auto order = seq_cmp(p.seq, next_exp_);
    if (order < 0) {
      sorted_insert(prev_list_, p);
    } else if (order == 0) {
      curr_list_.push_back(p);
      next_exp_ = payload_end(p);
    } else {
      sorted_insert(after_list_, p);
    }
    ++packet_cnt_;
  }
  if (packet_cnt_ >= block_size_) return flush();
  return std::nullopt;
}

Trace SrpicManager::flush() {
  Trace block;
  block.reserve(packet_cnt_);
  block.insert(block.end(), prev_list_.begin(), prev_list_.end());
  block.insert(block.end(), curr_list_.begin(), curr_list_.end());
  block.insert(block.end(), after_list_.begin(), after_list_.end());
  prev_list_.clear();
  curr_list_.clear();
  after_list_.clear();
  packet_cnt_ = 0;
  next_exp_ = 0;
  return block;
}

SrpicEngine::SrpicEngine(SrpicOptions options) : options_(options) {}

SrpicManager& SrpicEngine::find_or_create_manager(const FlowKey& key) {
  if (auto it = index_.find(key); it != index_.end()) return it->second->manager;
  slots_.push_back(Slot{key, SrpicManager(options_.block_size)});
  index_.emplace(key, std::prev(slots_.end()));
  return slots_.back().manager;
}

const SrpicManager* SrpicEngine::find_manager(const FlowKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &it->second->manager;
}

void SrpicEngine::process_packet(const Packet& p, Trace& out) {
  if (!is_suitable(p)) {
    out.push_back(p);
    return;
  }
  auto it = index_.find(p.flow);
  if (it == index_.end()) {
    find_or_create_manager(p.flow);
    it = index_.find(p.flow);
  }
  Slot& slot = *it->second;
  slot.active = true;
  if (auto block = slot.manager.accept(p)) {
    out.insert(out.end(), block->begin(), block->end());
  }
  if (++global_packet_cnt_ >= options_.ringbuffer_size) flush_all(out);
}

void SrpicEngine::flush_all(Trace& out) {
  for (Slot& slot : slots_) {
    if (slot.manager.packet_count() == 0) continue;
    Trace block = slot.manager.flush();
    out.insert(out.end(), block.begin(), block.end());
  }
  global_packet_cnt_ = 0;
}

Trace SrpicEngine::flush_all() {
  Trace out;
  flush_all(out);
  return out;
}

void SrpicEngine::end_cycle(Trace& out) {
  flush_all(out);
  for (auto it = slots_.begin(); it != slots_.end();) {
    it->idle_cycles = it->active ? 0 : it->idle_cycles + 1;
    it->active = false;
    if (options_.idle_eviction_cycles > 0 &&
        it->idle_cycles >= options_.idle_eviction_cycles) {
      index_.erase(it->key);
      it = slots_.erase(it);
    } else {
      ++it;
    }
  }
}

Trace SrpicEngine::process_cycle(const Trace& fetched) {
  Trace out;
  out.reserve(fetched.size());
  for (const Packet& p : fetched) process_packet(p, out);
  end_cycle(out);
  return out;
}

std::vector<FlowKey> SrpicEngine::manager_order() const {
  std::vector<FlowKey> order;
  order.reserve(slots_.size());
  for (const Slot& slot : slots_) order.push_back(slot.key);
  return order;
}

std::size_t SrpicEngine::total_held() const {
  std::size_t held = 0;
  for (const Slot& slot : slots_) held += slot.manager.packet_count();
  return held;
}

}  // namespace srpic
