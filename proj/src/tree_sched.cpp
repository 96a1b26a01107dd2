#include "probesched/tree_sched.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "probesched/errors.hpp"
#include "probesched/evaluator.hpp"
#include "probesched/kt_sched.hpp"
#include "probesched/random.hpp"

namespace probesched {

int TreeLevels::max_level() const {
  int m = kDroppedLevel;
  for (int l : level) m = std::max(m, l);
  return m;
}

double TreeLevels::kraft_sum() const {
  double s = 0;
  for (int l : level)
    if (l != kDroppedLevel) s += std::ldexp(1.0, -l);
  return s;
}

int TreeMapping::max_level() const {
  int m = kDroppedLevel;
  for (const auto& node : nodes) m = std::max(m, node.level);
  return m;
}

bool TreeMapping::prefix_free() const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].level == kDroppedLevel) continue;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i == j || nodes[j].level == kDroppedLevel || nodes[i].level > nodes[j].level) continue;
      const std::int64_t period = std::int64_t{1} << nodes[i].level;
      if (nodes[j].offset % period == nodes[i].offset) return false;
    }
  }
  return true;
}

TreeLevels round_frequencies(const Eigen::VectorXd& q, int level_cap) {
  if (level_cap < 0 || level_cap > 40) throw ValidationError("level cap must lie in [0, 40]");
  TreeLevels out;
  out.level.assign(static_cast<std::size_t>(q.size()), kDroppedLevel);
  for (Index i = 0; i < q.size(); ++i) {
    if (!(q[i] > 0.0)) {
      out.warnings.push_back("test " + std::to_string(i) + " has zero frequency and is dropped");
      continue;
    }
    // smallest L with 2^-L <= q_i
    int L = 0;
    while (L < level_cap && std::ldexp(1.0, -L) > q[i]) ++L;
    if (std::ldexp(1.0, -L) > q[i])
      out.warnings.push_back("test " + std::to_string(i) + " clamped to level " + std::to_string(level_cap));
    out.level[i] = L;
  }
  if (out.kraft_sum() > 1.0) {
    std::vector<Index> order;
    for (Index i = 0; i < q.size(); ++i)
      if (out.level[i] != kDroppedLevel) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return q[a] < q[b]; });
    for (Index i : order) {
      if (out.kraft_sum() <= 1.0) break;
      out.level[i] = kDroppedLevel;
      out.warnings.push_back("test " + std::to_string(i) + " dropped to restore Kraft feasibility");
    }
  }
  return out;
}

namespace {

template <class Pick>
TreeMapping map_levels(std::span<const int> levels, Pick&& pick) {
  TreeMapping mapping;
  mapping.nodes.assign(levels.size(), TreeNode{});
  double kraft = 0;
  int top = kDroppedLevel;
  for (int l : levels) {
    if (l == kDroppedLevel) continue;
    if (l < 0 || l > 40) throw ValidationError("tree level out of range");
    kraft += std::ldexp(1.0, -l);
    top = std::max(top, l);
  }
  if (kraft > 1.0) throw ValidationError("levels violate Kraft's inequality; no prefix-free mapping exists");

  std::vector<std::int64_t> free{0};  // free nodes at the current level
  for (int level = 0; level <= top; ++level) {
    if (level > 0) {
      std::vector<std::int64_t> children;
      children.reserve(free.size() * 2);
      const std::int64_t half = std::int64_t{1} << (level - 1);
      for (auto o : free) {
        children.push_back(o);
        children.push_back(o + half);
      }
      free = std::move(children);
    }
    std::vector<std::size_t> here;
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (levels[i] == level) here.push_back(i);
    if (here.empty()) continue;
    pick(free, here.size());
    for (std::size_t j = 0; j < here.size(); ++j) mapping.nodes[here[j]] = {level, free[j]};
    free.erase(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(here.size()));
  }
  return mapping;
}

}  // namespace

TreeMapping map_random(std::span<const int> levels, std::uint64_t seed) {
  Rng rng(seed);
  // partial Fisher-Yates: the first k entries become a uniform random k-subset in random order
  return map_levels(levels, [&](std::vector<std::int64_t>& free, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) std::swap(free[j], free[j + rng.below(free.size() - j)]);
  });
}

TreeMapping map_canonical(std::span<const int> levels) {
  return map_levels(levels, [](std::vector<std::int64_t>& free, std::size_t) { std::sort(free.begin(), free.end()); });
}

CyclicSchedule schedule_from_mapping(const TreeMapping& mapping, int N, FillPolicy fill, const Instance* instance) {
  const int top = mapping.max_level();
  if (top == kDroppedLevel) throw ValidationError("mapping has no tests");
  if (N < top) throw ValidationError("schedule level " + std::to_string(N) + " is below the deepest mapped level " + std::to_string(top));
  if (N > 30) throw ValidationError("schedule level too large to materialize");

  const std::int64_t length = std::int64_t{1} << N;
  CyclicSchedule out;
  out.provenance = Provenance::RTree;
  out.cycle.assign(static_cast<std::size_t>(length), kIdle);
  for (std::size_t i = 0; i < mapping.nodes.size(); ++i) {
    const auto& node = mapping.nodes[i];
    if (node.level == kDroppedLevel) continue;
    const std::int64_t period = std::int64_t{1} << node.level;
    if (node.offset < 0 || node.offset >= period) throw ValidationError("mapping offset outside its level");
    for (std::int64_t t = node.offset; t < length; t += period) {
      if (out.cycle[t] != kIdle) throw ValidationError("mapping is not prefix-free");
      out.cycle[t] = static_cast<Index>(i);
    }
  }

  if (fill == FillPolicy::KtStep && std::find(out.cycle.begin(), out.cycle.end(), kIdle) != out.cycle.end()) {
    if (instance == nullptr) throw ValidationError("KT filler needs the instance");
    // one pass to settle the counters on the fixed slots, then fill in order
    KTState state = KTState::initial(instance->num_elements());
    for (Index test : out.cycle) kt_advance(*instance, test, state);
    for (auto& slot : out.cycle) {
      if (slot == kIdle) slot = kt_best_test(*instance, instance->weights(), state.x);
      kt_advance(*instance, slot, state);
    }
  }
  return out;
}

RTreeCandidates r_tree_candidates(const Instance& instance, const Eigen::VectorXd& q, const RTreeOptions& options) {
  require_valid(instance);
  if (q.size() != instance.num_tests()) throw ValidationError("frequency vector does not match the test count");
  if (options.trials < 1) throw ValidationError("r_tree needs at least one trial");

  RTreeCandidates out;
  TreeLevels levels = round_frequencies(q, options.level_cap);
  out.warnings = levels.warnings;
  const int top = levels.max_level();
  if (top == kDroppedLevel) throw ValidationError("no test has positive frequency");
  for (int k = 0; k < options.trials; ++k) {
    const std::uint64_t trial_seed = Rng::derived(options.seed, static_cast<std::uint64_t>(k)).next();
    out.mappings.push_back(map_random(levels.level, trial_seed));
    out.schedules.push_back(schedule_from_mapping(out.mappings.back(), top, options.fill, &instance));
  }
  return out;
}

RTreeResult r_tree(const Instance& instance, const Eigen::VectorXd& q, Objective objective,
                   const RTreeOptions& options) {
  const Instance weighted = normalize(instance, family(objective));
  RTreeCandidates candidates = r_tree_candidates(weighted, q, options);
  RTreeResult result;
  result.warnings = std::move(candidates.warnings);
  for (std::size_t k = 0; k < candidates.schedules.size(); ++k) {
    const double value = evaluate(weighted, candidates.schedules[k]).get(objective);
    result.trial_values.push_back(value);
    if (k == 0 || value < result.best_value) {
      result.best_value = value;
      result.best_trial = static_cast<int>(k);
      result.schedule = candidates.schedules[k];
      result.mapping = candidates.mappings[k];
    }
  }
  if (!std::isfinite(result.best_value)) result.warnings.push_back("best tree schedule leaves some element undetected");
  return result;
}

}  // namespace probesched
