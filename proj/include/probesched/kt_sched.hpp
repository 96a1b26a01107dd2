#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "probesched/instance.hpp"
#include "probesched/schedule.hpp"

namespace probesched {

// Greedy state: x[e] >= 1 counts probes since e was last covered, including
// the upcoming one.
struct KTState {
  std::vector<std::int64_t> x;
  std::int64_t steps = 0;

  static KTState initial(Index num_elements) { return {std::vector<std::int64_t>(static_cast<std::size_t>(num_elements), 1), 0}; }
  friend bool operator==(const KTState&, const KTState&) = default;
};

/// argmax_i sum_{e in s_i} p_e x[e]^2 over the given weights (lowest index on
/// ties). Weights are passed separately so on-line callers can change them
/// between steps.
Index kt_best_test(const Instance& instance, const Eigen::VectorXd& weights, const std::vector<std::int64_t>& x);

/// Advances x after probing `test`: every counter +1, then covered ones reset to 1.
void kt_advance(const Instance& instance, Index test, KTState& state);

struct KTStep {
  Index test;
  KTState state;
};

/// One greedy step with the instance's own weights.
KTStep kt_step(const Instance& instance, const KTState& state);

struct KTOptions {
  std::int64_t max_steps = 1'000'000;
  std::size_t max_states = 1'000'000;
};

/// Runs the greedy from x = 1 until a state repeats and returns the cycle
/// between the two visits. Without a repeat inside the budget it returns the
/// last half of the run with `approximate` set.
CyclicSchedule kt_schedule(const Instance& instance, const KTOptions& options = {});

}  // namespace probesched
