#include "probesched/oracle.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "probesched/errors.hpp"
#include "probesched/evaluator.hpp"
#include "probesched/memoryless.hpp"

namespace probesched {

namespace {

// Lexicographically smallest among its rotations.
bool canonical_rotation(const std::vector<Index>& s) {
  const std::size_t n = s.size();
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      Index a = s[(r + k) % n], b = s[k];
      if (a < b) return false;
      if (a > b) break;
    }
  }
  return true;
}

}  // namespace

DetOptimum det_optimum(const Instance& instance, Objective objective, int max_len, std::uint64_t node_cap) {
  require_valid(instance);
  if (max_len < 1) throw ValidationError("det_optimum: max_len must be at least 1");
  const auto m = static_cast<std::uint64_t>(instance.num_tests());
  std::uint64_t nodes = 0, level = 1;
  for (int len = 1; len <= max_len; ++len) {
    level *= m;
    nodes += level;
    if (nodes > node_cap) throw ValidationError("det_optimum: search space exceeds the node cap");
  }

  const Instance weighted = normalize(instance, family(objective));
  DetOptimum best{std::numeric_limits<double>::infinity(), {}, 0};
  std::vector<Index> seq;
  for (int len = 1; len <= max_len; ++len) {
    seq.assign(static_cast<std::size_t>(len), 0);
    while (true) {
      if (canonical_rotation(seq)) {
        CyclicSchedule candidate{seq, Provenance::Manual, false};
        double v = evaluate(weighted, candidate).get(objective);
        ++best.cycles_evaluated;
        if (v < best.value) {
          best.value = v;
          best.schedule = std::move(candidate);
        }
      }
      int pos = len - 1;
      while (pos >= 0 && seq[pos] == static_cast<Index>(m) - 1) seq[pos--] = 0;
      if (pos < 0) break;
      ++seq[pos];
    }
  }
  return best;
}

int minimum_cover_size(const Instance& instance) {
  require_valid(instance);
  const Index m = instance.num_tests();
  if (m > 20) throw ValidationError("minimum_cover_size: too many tests for exhaustive search");
  const Index n = instance.num_elements();
  const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
  std::vector<std::vector<std::uint64_t>> sets(static_cast<std::size_t>(m), std::vector<std::uint64_t>(words, 0));
  for (Index i = 0; i < m; ++i)
    for (Index e : instance.test(i).elements) sets[i][e / 64] |= std::uint64_t{1} << (e % 64);

  int best = static_cast<int>(m);
  std::vector<std::uint64_t> acc(words);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    const int size = std::popcount(mask);
    if (size >= best) continue;
    std::fill(acc.begin(), acc.end(), 0);
    for (Index i = 0; i < m; ++i)
      if (mask >> i & 1)
        for (std::size_t w = 0; w < words; ++w) acc[w] |= sets[i][w];
    Index count = 0;
    for (auto w : acc) count += std::popcount(w);
    if (count == n) best = size;
  }
  return best;
}

int default_search_length(const Instance& instance) { return 2 * minimum_cover_size(instance); }

double memoryless_grid(const Instance& instance, WeightMode mode, double resolution) {
  require_valid(instance);
  const Index m = instance.num_tests();
  if (m > 4) throw ValidationError("memoryless_grid: at most 4 tests");
  if (!(resolution > 0.0 && resolution <= 1.0)) throw ValidationError("memoryless_grid: resolution must lie in (0,1]");
  const auto steps = static_cast<int>(std::lround(1.0 / resolution));
  const Eigen::VectorXd p = normalized_weights(instance.weights(), mode);

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd q(m);
  std::function<void(Index, int)> walk = [&](Index i, int left) {
    if (i == m - 1) {
      q[i] = static_cast<double>(left) / steps;
      Eigen::VectorXd rates = coverage_rates<double>(instance.coverage(), q);
      double v = mode == WeightMode::Sum ? memoryless_sum<double>(p, rates) : memoryless_max<double>(p, rates);
      best = std::min(best, v);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      q[i] = static_cast<double>(k) / steps;
      walk(i + 1, left - k);
    }
  };
  walk(0, steps);
  return best;
}

}  // namespace probesched
