#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "probesched/instance.hpp"
#include "probesched/schedule.hpp"

namespace probesched {

// All six objectives of one schedule, plus the per-element time aggregates.
//
// Values are the correctly rounded doubles of the exact objective values for
// the weights used, so the orderings EeMt >= MtEe >= EeEt and
// MeMt >= EtMe >= MeEt hold exactly. Undetectable elements show up as +inf.
struct ObjectiveReport {
  double EeEt = 0, MtEe = 0, EeMt = 0;
  double MeEt = 0, EtMe = 0, MeMt = 0;
  Eigen::VectorXd Mt;  // per element: worst detection time over failure epochs
  Eigen::VectorXd Et;  // per element: mean detection time over failure epochs
  // per failure epoch, only filled when requested
  std::vector<double> Me_t, Ee_t;
  bool infinite = false;

  double get(Objective o) const;
};

/// Detection time counting the detecting probe: 1 + offset to the first slot
/// at or after t whose test covers e. nullopt if the cycle never covers e.
std::optional<std::int64_t> detection_time(const Instance& instance, const CyclicSchedule& schedule, Index element,
                                           Index t);

/// Exact objectives of a deterministic cycle under the instance's weights.
ObjectiveReport evaluate(const Instance& instance, const CyclicSchedule& schedule, bool keep_per_time = false);

/// As evaluate, but SUM objectives use sum-normalized weights and MAX
/// objectives max-normalized weights (the reporting convention).
ObjectiveReport evaluate_normalized(const Instance& instance, const CyclicSchedule& schedule);

/// Expected detection times when probe k of a covering test succeeds with
/// probability pi_ek independently.
ObjectiveReport evaluate_probabilistic(const Instance& instance, const CyclicSchedule& schedule,
                                       bool keep_per_time = false);

/// Per-element p-quantile (nearest rank) of T(e, t) over the cycle.
Eigen::VectorXd detection_quantiles(const Instance& instance, const CyclicSchedule& schedule, double quantile);

struct DetectionStats {
  double mean = 0;
  double stddev = 0;
  double p50 = 0, p90 = 0, p99 = 0;
  double max = 0;
};

/// Monte-Carlo detection times of a memoryless schedule, one independent
/// stream per element. Every sample counts probes until a covering probe
/// succeeds.
std::vector<DetectionStats> simulate_memoryless(const Instance& instance, const Eigen::VectorXd& q,
                                                std::int64_t samples, std::uint64_t seed);

/// Geometric tail: smallest k with P(T <= k) >= quantile, for rate Q.
double geometric_quantile(double rate, double quantile);

struct CdfRow {
  double value;
  double fraction_at_least;
};

/// Reverse CDF: one row per distinct value, descending, with the fraction of
/// inputs >= value.
std::vector<CdfRow> reverse_cdf(std::span<const double> values);

void export_cdf(std::span<const double> values, const std::filesystem::path& path);

}  // namespace probesched
