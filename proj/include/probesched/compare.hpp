#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "probesched/instance.hpp"
#include "probesched/memoryless.hpp"

namespace probesched {

struct CompareRow {
  std::string scheduler;
  bool memoryless = false;
  std::array<double, 6> values{};  // in kAllObjectives order
};

struct CompareOptions {
  int trials = 32;
  std::uint64_t seed = 0;
  bool subset_rows = true;  // RT-S rows seeded from the greedy cover subset
  SolveConfig solve{};
};

/// Every scheduler against all six objectives (family-normalized weights).
/// Memoryless rows: Convex, LP, Uniform, SAMP SC, SAMP KT. Deterministic
/// rows: SC, KT, RT CON, RT LP, and RT-S CON / RT-S LP. An R-Tree cell is the
/// best of its trials for that column's objective.
std::vector<CompareRow> compare(const Instance& instance, const CompareOptions& options = {});

std::string compare_csv(const std::vector<CompareRow>& rows);

/// Empirical test frequencies of a cycle (idle slots ignored).
Eigen::VectorXd cycle_frequencies(const Instance& instance, const std::vector<Index>& cycle);

/// Solves on the listed tests only and scatters q back (other tests get 0).
Frequencies solve_on_subset(const Instance& instance, std::span<const Index> subset, WeightMode family,
                            const SolveConfig& config);

}  // namespace probesched
