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

#include "srpic/reorder_metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_set>

namespace srpic {
namespace {

struct Span {
  std::int64_t start;
  std::int64_t end;
};

// Maps the trace onto a linear sequence axis. Each packet is unwrapped
// relative to its predecessor, so only consecutive arrivals need to be
// within 2^31 of each other. Throws on empty or overlapping segments.
std::vector<Span> unwrap_and_validate(const Trace& trace) {
  std::vector<Span> spans;
  spans.reserve(trace.size());
  std::int64_t base = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].payload_len == 0) {
      throw MetricError("packet " + std::to_string(i) +
                        " has no payload; reordering is defined on data segments");
    }
    if (i > 0) base += seq_diff(trace[i - 1].seq, trace[i].seq);
    spans.push_back({base, base + trace[i].payload_len});
  }
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spans[a].start < spans[b].start;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const Span& prev = spans[order[k - 1]];
    const Span& cur = spans[order[k]];
    if (cur.start < prev.end) {
      throw MetricError("packets " + std::to_string(order[k - 1]) + " and " +
                        std::to_string(order[k]) + " overlap in sequence space");
    }
  }
  return spans;
}

std::vector<bool> reordered_flags(const std::vector<Span>& spans) {
  std::vector<bool> flags(spans.size(), false);
  if (spans.empty()) return flags;
  std::int64_t next_exp = spans[0].end;
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start >= next_exp) {
      next_exp = spans[i].end;
    } else {
      flags[i] = true;
    }
  }
  return flags;
}

// Fenwick tree counting inserted ranks.
class RankCounter {
 public:
  explicit RankCounter(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t rank) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Number of inserted ranks < rank.
  std::size_t below(std::size_t rank) const {
    std::size_t sum = 0;
    for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

 private:
  std::vector<std::size_t> tree_;
};

std::size_t max_extent_of(const std::vector<Span>& spans,
                          const std::vector<bool>& reordered) {
  std::vector<std::int64_t> starts(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) starts[i] = spans[i].start;
  std::sort(starts.begin(), starts.end());
  RankCounter counter(spans.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto rank = static_cast<std::size_t>(
        std::lower_bound(starts.begin(), starts.end(), spans[i].start) - starts.begin());
    if (reordered[i]) {
      // Earlier packets with a strictly greater start.
      best = std::max(best, i - counter.below(rank + 1));
    }
    counter.add(rank);
  }
  return best;
}

BlockClassification classify(const std::vector<Span>& spans,
                             const std::vector<bool>& reordered,
                             const BlockPartition& partition) {
  const std::size_t covered =
      std::accumulate(partition.sizes.begin(), partition.sizes.end(), std::size_t{0});
  if (covered != spans.size()) {
    throw MetricError("partition covers " + std::to_string(covered) +
                      " packets but the trace has " + std::to_string(spans.size()));
  }
  BlockClassification result;
  std::size_t i = 0;
  bool any_before = false;
  std::int64_t max_start_before = 0;
  for (std::size_t size : partition.sizes) {
    if (size == 0) throw MetricError("partition contains an empty block");
    const std::size_t block_end = i + size;
    std::int64_t block_max = spans[i].start;
    for (; i < block_end; ++i) {
      if (reordered[i]) {
        if (any_before && max_start_before > spans[i].start) {
          ++result.inter;
        } else {
          ++result.intra;
        }
      }
      block_max = std::max(block_max, spans[i].start);
    }
    max_start_before = any_before ? std::max(max_start_before, block_max) : block_max;
    any_before = true;
  }
  return result;
}

}  // namespace

BlockPartition BlockPartition::uniform(std::size_t total, std::size_t block) {
  if (block == 0) throw MetricError("block size must be positive");
  BlockPartition partition;
  for (std::size_t done = 0; done < total; done += block) {
    partition.sizes.push_back(std::min(block, total - done));
  }
  return partition;
}

ReorderCount reordered_count(const Trace& trace) {
  const auto spans = unwrap_and_validate(trace);
  const auto flags = reordered_flags(spans);
  ReorderCount result;
  result.count = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  result.ratio = trace.empty() ? 0.0
                               : static_cast<double>(result.count) /
                                     static_cast<double>(trace.size());
  return result;
}

std::size_t max_reordering_extent(const Trace& trace) {
  const auto spans = unwrap_and_validate(trace);
  return max_extent_of(spans, reordered_flags(spans));
}

BlockClassification classify_block_reordering(const Trace& trace,
                                              const BlockPartition& partition) {
  const auto spans = unwrap_and_validate(trace);
  return classify(spans, reordered_flags(spans), partition);
}

ReorderReport analyze_reordering(const Trace& trace,
                                 const std::optional<BlockPartition>& partition) {
  const auto spans = unwrap_and_validate(trace);
  const auto flags = reordered_flags(spans);
  ReorderReport report;
  report.total_packets = trace.size();
  report.reordered_count =
      static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  report.ratio = trace.empty() ? 0.0
                               : static_cast<double>(report.reordered_count) /
                                     static_cast<double>(trace.size());
  report.max_extent = max_extent_of(spans, flags);
  if (partition) {
    const auto blocks = classify(spans, flags, *partition);
    report.partitioned = true;
    report.intra_block = blocks.intra;
    report.inter_block = blocks.inter;
  }
  return report;
}

Trace first_arrivals(const Trace& trace) {
  Trace out;
  out.reserve(trace.size());
  std::unordered_set<SeqNum> seen;
  seen.reserve(trace.size());
  for (const Packet& p : trace) {
    if (seen.insert(p.seq).second) out.push_back(p);
  }
  return out;
}

}  // namespace srpic
