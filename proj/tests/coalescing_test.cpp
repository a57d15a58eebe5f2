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

#include <cmath>
#include <random>
#include <vector>

#include "srpic/coalescing.hpp"

namespace srpic {
namespace {

CoalescingParams params(Micros t_intr, double r_sn) {
  CoalescingParams p;
  p.t_intr = t_intr;
  p.r_sn = r_sn;
  return p;
}

// Queue walk: admit every arrival strictly before each service completion,
// serve one, stop when the ring is empty.
std::vector<std::size_t> reference_blocks(const std::vector<Micros>& arrivals,
                                          const CoalescingParams& cp) {
  const Micros q = 1e6 / cp.r_sn;
  std::vector<std::size_t> blocks;
  std::size_t i = 0;
  while (i < arrivals.size()) {
    const Micros start = arrivals[i++];
    std::size_t waiting = 1;
    std::size_t served = 0;
    for (;;) {
      const Micros done = start + cp.t_intr + static_cast<double>(served + 1) * q;
      while (i < arrivals.size() && arrivals[i] < done) {
        ++waiting;
        ++i;
      }
      --waiting;
      ++served;
      if (waiting == 0) break;
    }
    blocks.push_back(served);
  }
  return blocks;
}

std::vector<Micros> poisson_arrivals(std::mt19937_64& rng, double pps, std::size_t n) {
  std::exponential_distribution<double> gap(pps / 1e6);
  std::vector<Micros> out;
  Micros t = 0.0;
  for (std::size_t k = 0; k < n; ++k) out.push_back(t += gap(rng));
  return out;
}

TEST(ClosedForm, Examples) {
  const CoalescingParams cp = params(30.0, 1.2e6);
  EXPECT_EQ(block_size_closed_form(0.0, cp), 1U);
  EXPECT_EQ(block_size_closed_form(1e-3, cp), 2U);  // any load adds a fraction
  EXPECT_EQ(block_size_closed_form(5e5, params(0.0, 1e6)), 2U);
  // t_intr of one service quantum at half load: ceil(1.5 * 2).
  EXPECT_EQ(block_size_closed_form(5e5, params(1.0, 1e6)), 3U);
}

TEST(ClosedForm, SaturationRejected) {
  const CoalescingParams cp = params(30.0, 1.2e6);
  EXPECT_THROW(block_size_closed_form(1.2e6, cp), SaturationError);
  EXPECT_THROW(block_size_closed_form(2e6, cp), SaturationError);
  EXPECT_THROW(block_size_closed_form(-1.0, cp), std::invalid_argument);
}

TEST(ClosedForm, MonotoneInRateAndDelay) {
  std::size_t last = 0;
  for (double p = 0.0; p < 1.19e6; p += 7919.0) {
    const std::size_t b = block_size_closed_form(p, params(30.0, 1.2e6));
    EXPECT_GE(b, last);
    last = b;
  }
  last = 0;
  for (double t = 0.0; t < 500.0; t += 3.7) {
    const std::size_t b = block_size_closed_form(4e5, params(t, 1.2e6));
    EXPECT_GE(b, last);
    last = b;
  }
}

TEST(HoldDelayBound, Examples) {
  EXPECT_DOUBLE_EQ(hold_delay_bound(32, 1e6), 32.0);
  EXPECT_DOUBLE_EQ(hold_delay_bound(0, 1e6), 0.0);
  EXPECT_DOUBLE_EQ(hold_delay_bound(512, 1e6), 512.0);
  EXPECT_THROW(hold_delay_bound(1, 0.0), std::invalid_argument);
}

TEST(SimulateCoalescing, HandWalkedBoundary) {
  // Quantum 10 us, drain starts 10 us after the first arrival. Completions
  // at 20, 30, 40; the arrival at exactly 40 opens the next cycle.
  const std::vector<Micros> arrivals{0.0, 5.0, 15.0, 40.0};
  const auto cycles = simulate_coalescing(arrivals, params(10.0, 1e5));
  ASSERT_EQ(cycles.size(), 2U);
  EXPECT_EQ(cycles[0].block_packets, 3U);
  EXPECT_DOUBLE_EQ(cycles[0].start_time, 0.0);
  EXPECT_DOUBLE_EQ(cycles[0].emptying_duration, 30.0);
  EXPECT_EQ(cycles[1].block_packets, 1U);
  EXPECT_DOUBLE_EQ(cycles[1].start_time, 40.0);
}

TEST(SimulateCoalescing, SparseArrivalsGiveSingletons) {
  std::vector<Micros> arrivals;
  for (int i = 0; i < 100; ++i) arrivals.push_back(i * 1000.0);
  for (const CycleRecord& c : simulate_coalescing(arrivals, params(30.0, 1.2e6))) {
    EXPECT_EQ(c.block_packets, 1U);
  }
}

TEST(SimulateCoalescing, EmptyInput) {
  EXPECT_TRUE(simulate_coalescing({}, params(30.0, 1.2e6)).empty());
}

TEST(SimulateCoalescing, MatchesQueueWalkAndConserves) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const CoalescingParams cp = params(static_cast<double>(rng() % 60), 2e5 + rng() % 1000000);
    const double load = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    const auto arrivals = poisson_arrivals(rng, load * cp.r_sn, 2000);
    const auto cycles = simulate_coalescing(arrivals, cp);
    const auto want = reference_blocks(arrivals, cp);
    ASSERT_EQ(cycles.size(), want.size());
    std::size_t total = 0;
    for (std::size_t j = 0; j < cycles.size(); ++j) {
      EXPECT_EQ(cycles[j].block_packets, want[j]);
      EXPECT_EQ(cycles[j].cycle_index, j);
      // Emptying time is the block drained at r_sn.
      EXPECT_NEAR(cycles[j].emptying_duration * cp.r_sn / 1e6,
                  static_cast<double>(cycles[j].block_packets), 1e-6);
      total += cycles[j].block_packets;
    }
    EXPECT_EQ(total, arrivals.size());
  }
}

TEST(SimulateCoalescing, PoissonMeanNearClosedFormAtModerateLoad) {
  std::mt19937_64 rng(5);
  const CoalescingParams cp = params(30.0, 1.2e6);
  for (double u : {0.1, 0.3, 0.5}) {
    const double p = u * cp.r_sn;
    const auto cycles = simulate_coalescing(poisson_arrivals(rng, p, 400000), cp);
    const double mean = 400000.0 / static_cast<double>(cycles.size());
    EXPECT_LE(std::abs(mean - static_cast<double>(block_size_closed_form(p, cp))), 1.0)
        << "u=" << u;
  }
}

TEST(SimulateCoalescing, CbrMeanNondecreasingInRate) {
  const CoalescingParams cp = params(30.0, 1.2e6);
  double last = 0.0;
  for (double u = 0.01; u < 0.95; u += 0.02) {
    const double gap = 1e6 / (u * cp.r_sn);
    std::vector<Micros> arrivals;
    for (int i = 0; i < 20000; ++i) arrivals.push_back(i * gap);
    const auto cycles = simulate_coalescing(arrivals, cp);
    const double mean = 20000.0 / static_cast<double>(cycles.size());
    EXPECT_GE(mean, last - 1e-9) << "u=" << u;
    last = mean;
  }
}

// With constant spacing g and quantum q, packet k of a cycle joins while
// k * (g - q) < t_intr, so every cycle holds ceil(t_intr * p / (1 - u))
// packets; loads are chosen away from integer boundaries.
TEST(SimulateCoalescing, CbrBlockIsExact) {
  const CoalescingParams cp = params(30.0, 1.2e6);
  for (double u : {0.33, 0.62, 0.83}) {
    const double p = u * cp.r_sn;
    const double gap = 1e6 / p;
    std::vector<Micros> arrivals;
    for (int i = 0; i < 50000; ++i) arrivals.push_back(i * gap);
    const auto cycles = simulate_coalescing(arrivals, cp);
    const auto want = static_cast<std::size_t>(std::ceil(cp.t_intr * 1e-6 * p / (1.0 - u)));
    for (std::size_t j = 0; j + 1 < cycles.size(); ++j) {
      ASSERT_EQ(cycles[j].block_packets, want) << "u=" << u << " cycle " << j;
    }
    EXPECT_LT(want, block_size_closed_form(p, cp)) << "u=" << u;
  }
}

// Drives ReceiveRing through a tiny event loop with service steps ahead of
// arrivals at equal times.
TEST(ReceiveRing, AgreesWithBatchSimulation) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const CoalescingParams cp = params(static_cast<double>(rng() % 50), 1e6);
    auto arrivals = poisson_arrivals(rng, (0.1 + 0.8 * (rng() % 100) / 100.0) * 1e6, 3000);
    // Snap a few arrivals onto the microsecond grid so ties with service
    // completions occur.
    for (auto& a : arrivals)
      if (rng() % 4 == 0) a = std::ceil(a);
    std::sort(arrivals.begin(), arrivals.end());

    ReceiveRing ring(cp);
    std::optional<Micros> next_service;
    std::size_t i = 0;
    std::uint64_t served = 0;
    std::uint64_t last_index = 0;
    while (i < arrivals.size() || next_service) {
      if (next_service && (i == arrivals.size() || *next_service <= arrivals[i])) {
        auto svc = ring.on_service_complete();
        EXPECT_EQ(svc.packet.send_index, served);
        ++served;
        next_service = svc.next_completion;
        EXPECT_EQ(svc.finished_cycle.has_value(), !ring.busy());
      } else {
        Packet p;
        p.send_index = last_index++;
        if (auto first = ring.on_arrival(p, arrivals[i])) next_service = *first;
        ++i;
      }
    }
    const auto batch = simulate_coalescing(arrivals, cp);
    ASSERT_EQ(ring.cycles().size(), batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) {
      EXPECT_EQ(ring.cycles()[j].block_packets, batch[j].block_packets);
      EXPECT_DOUBLE_EQ(ring.cycles()[j].start_time, batch[j].start_time);
    }
    EXPECT_EQ(ring.queued(), 0U);
  }
}

}  // namespace
}  // namespace srpic
