#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "probesched/instance.hpp"
#include "probesched/schedule.hpp"

namespace probesched {

/// Level of a test that was dropped (q_i = 0, or removed to restore Kraft).
inline constexpr int kDroppedLevel = -1;

struct TreeLevels {
  std::vector<int> level;  // per test; kDroppedLevel when dropped
  std::vector<std::string> warnings;

  int max_level() const;
  /// sum over kept tests of 2^-L_i
  double kraft_sum() const;
};

struct TreeNode {
  int level = kDroppedLevel;
  std::int64_t offset = 0;  // in [0, 2^level)
};

// Tests placed on binary-tree nodes. Test i owns every slot t of a level-N
// schedule with t mod 2^level == offset.
struct TreeMapping {
  std::vector<TreeNode> nodes;  // per test

  int max_level() const;
  /// No mapped test sits at or below another mapped test's node.
  bool prefix_free() const;
};

inline constexpr int kDefaultLevelCap = 20;

/// L_i = ceil(log2(1/q_i)), clamped at `level_cap`; q_i = 0 drops the test.
/// If clamping breaks Kraft feasibility, the smallest-q tests are dropped.
TreeLevels round_frequencies(const Eigen::VectorXd& q, int level_cap = kDefaultLevelCap);

/// Level by level (ascending), each level's tests take uniformly random free
/// nodes; a taken node's subtree is no longer available.
TreeMapping map_random(std::span<const int> levels, std::uint64_t seed);

/// Same construction with free nodes taken in ascending offset order.
TreeMapping map_canonical(std::span<const int> levels);

enum class FillPolicy { KtStep, Idle };

/// Level-N schedule of length 2^N. Slots no test owns are filled per `fill`;
/// KtStep needs the instance (its weights drive the greedy choice).
CyclicSchedule schedule_from_mapping(const TreeMapping& mapping, int N, FillPolicy fill = FillPolicy::Idle,
                                     const Instance* instance = nullptr);

struct RTreeOptions {
  int trials = 32;
  std::uint64_t seed = 0;
  int level_cap = kDefaultLevelCap;
  FillPolicy fill = FillPolicy::KtStep;
};

struct RTreeResult {
  CyclicSchedule schedule;
  TreeMapping mapping;
  int best_trial = 0;
  double best_value = 0;
  std::vector<double> trial_values;  // requested objective per trial
  std::vector<std::string> warnings;
};

struct RTreeCandidates {
  std::vector<TreeMapping> mappings;
  std::vector<CyclicSchedule> schedules;  // level-L_max schedule per trial
  std::vector<std::string> warnings;
};

/// The K random tree schedules r_tree chooses from; trial k is seeded from
/// (options.seed, k) only. `instance` weights drive the KT filler.
RTreeCandidates r_tree_candidates(const Instance& instance, const Eigen::VectorXd& q, const RTreeOptions& options);

/// Best of K random tree schedules for `objective` (family-normalized
/// weights). Ties go to the lowest trial index.
RTreeResult r_tree(const Instance& instance, const Eigen::VectorXd& q, Objective objective,
                   const RTreeOptions& options = {});

}  // namespace probesched
