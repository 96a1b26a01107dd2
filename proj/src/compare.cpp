#include "probesched/compare.hpp"

#include <algorithm>
#include <sstream>

#include "probesched/cover_sched.hpp"
#include "probesched/evaluator.hpp"
#include "probesched/io.hpp"
#include "probesched/kt_sched.hpp"
#include "probesched/tree_sched.hpp"

namespace probesched {

Eigen::VectorXd cycle_frequencies(const Instance& instance, const std::vector<Index>& cycle) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(instance.num_tests());
  for (Index test : cycle)
    if (test != kIdle) q[test] += 1.0;
  return q / q.sum();
}

Frequencies solve_on_subset(const Instance& instance, std::span<const Index> subset, WeightMode family,
                            const SolveConfig& config) {
  const Instance reduced = restrict_tests(instance, subset);
  Frequencies f = family == WeightMode::Sum ? solve_sum(reduced, config) : solve_max(reduced, config);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(instance.num_tests());
  for (std::size_t k = 0; k < subset.size(); ++k) full[subset[k]] = f.q[static_cast<Index>(k)];
  f.q = std::move(full);
  return f;
}

namespace {

CompareRow memoryless_row(const Instance& instance, std::string name, const Eigen::VectorXd& q) {
  CompareRow row{std::move(name), true, {}};
  const Eigen::VectorXd rates = coverage_rates<double>(instance.coverage(), q);
  const double sum = memoryless_sum<double>(normalized_weights(instance.weights(), WeightMode::Sum), rates);
  const double max = memoryless_max<double>(normalized_weights(instance.weights(), WeightMode::Max), rates);
  for (std::size_t k = 0; k < kAllObjectives.size(); ++k)
    row.values[k] = family(kAllObjectives[k]) == WeightMode::Sum ? sum : max;
  return row;
}

CompareRow deterministic_row(const Instance& instance, std::string name, const CyclicSchedule& schedule) {
  CompareRow row{std::move(name), false, {}};
  const ObjectiveReport r = evaluate_normalized(instance, schedule);
  for (std::size_t k = 0; k < kAllObjectives.size(); ++k) row.values[k] = r.get(kAllObjectives[k]);
  return row;
}

CompareRow rtree_row(const Instance& instance, std::string name, const Eigen::VectorXd& q, const CompareOptions& options) {
  RTreeOptions ro;
  ro.trials = options.trials;
  ro.seed = options.seed;
  // the filler follows SUM-normalized weights for every column
  const RTreeCandidates candidates = r_tree_candidates(normalize(instance, WeightMode::Sum), q, ro);
  CompareRow row{std::move(name), false, {}};
  row.values.fill(std::numeric_limits<double>::infinity());
  for (const auto& schedule : candidates.schedules) {
    const ObjectiveReport r = evaluate_normalized(instance, schedule);
    for (std::size_t k = 0; k < kAllObjectives.size(); ++k)
      row.values[k] = std::min(row.values[k], r.get(kAllObjectives[k]));
  }
  return row;
}

}  // namespace

std::vector<CompareRow> compare(const Instance& instance, const CompareOptions& options) {
  require_valid(instance);
  const Frequencies convex = solve_sum(instance, options.solve);
  const Frequencies lp = solve_max(instance, options.solve);
  const CyclicSchedule sc = set_cover_schedule(instance);
  const CyclicSchedule kt = kt_schedule(normalize(instance, WeightMode::Sum));

  std::vector<CompareRow> rows;
  rows.push_back(memoryless_row(instance, "Convex", convex.q));
  rows.push_back(memoryless_row(instance, "LP", lp.q));
  rows.push_back(memoryless_row(instance, "Uniform", uniform_frequencies(instance)));
  rows.push_back(memoryless_row(instance, "SAMP SC", cycle_frequencies(instance, sc.cycle)));
  rows.push_back(memoryless_row(instance, "SAMP KT", cycle_frequencies(instance, kt.cycle)));

  rows.push_back(deterministic_row(instance, "SC", sc));
  rows.push_back(deterministic_row(instance, "KT", kt));
  rows.push_back(rtree_row(instance, "RT CON", convex.q, options));
  rows.push_back(rtree_row(instance, "RT LP", lp.q, options));
  if (options.subset_rows) {
    const std::vector<Index> cover = greedy_set_cover(instance);
    rows.push_back(rtree_row(instance, "RT-S CON", solve_on_subset(instance, cover, WeightMode::Sum, options.solve).q, options));
    rows.push_back(rtree_row(instance, "RT-S LP", solve_on_subset(instance, cover, WeightMode::Max, options.solve).q, options));
  }
  return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "scheduler,kind";
  for (Objective o : kAllObjectives) out << ',' << to_string(o);
  out << '\n';
  for (const auto& row : rows) {
    out << row.scheduler << ',' << (row.memoryless ? "memoryless" : "deterministic");
    for (double v : row.values) out << ',' << format_number(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace probesched
