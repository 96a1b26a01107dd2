#pragma once

#include <cstdint>

#include "probesched/instance.hpp"
#include "probesched/schedule.hpp"

namespace probesched {

// Exhaustive ground truth for tiny instances.

struct DetOptimum {
  double value;
  CyclicSchedule schedule;
  std::uint64_t cycles_evaluated = 0;
};

/// Minimum of `objective` (family-normalized weights) over every cycle of
/// length 1..max_len, one representative per rotation class. Throws when
/// sum_len m^len exceeds `node_cap`.
DetOptimum det_optimum(const Instance& instance, Objective objective, int max_len,
                       std::uint64_t node_cap = 2'000'000);

/// 2 * (minimum cover size), the default search depth.
int default_search_length(const Instance& instance);

/// Smallest number of tests covering every element (exhaustive, m <= 20).
int minimum_cover_size(const Instance& instance);

/// Minimum of the closed-form memoryless objective over the simplex grid with
/// spacing `resolution` (m <= 4).
double memoryless_grid(const Instance& instance, WeightMode family, double resolution);

}  // namespace probesched
