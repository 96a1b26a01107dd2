#pragma once

#include <vector>

#include "probesched/instance.hpp"
#include "probesched/schedule.hpp"

namespace probesched {

/// Greedy cover: repeatedly the test covering the most still-uncovered
/// elements, lowest index on ties.
std::vector<Index> greedy_set_cover(const Instance& instance);

/// Cycles through the greedy cover in selection order.
CyclicSchedule set_cover_schedule(const Instance& instance);

}  // namespace probesched
