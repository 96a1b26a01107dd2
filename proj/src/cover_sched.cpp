#include "probesched/cover_sched.hpp"

#include "probesched/errors.hpp"

namespace probesched {

std::vector<Index> greedy_set_cover(const Instance& instance) {
  require_valid(instance);
  std::vector<bool> covered(static_cast<std::size_t>(instance.num_elements()), false);
  Index remaining = instance.num_elements();
  std::vector<Index> picks;
  while (remaining > 0) {
    Index best = -1, best_gain = 0;
    for (Index i = 0; i < instance.num_tests(); ++i) {
      Index gain = 0;
      for (Index e : instance.test(i).elements) gain += covered[e] ? 0 : 1;
      if (gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    if (best < 0) throw ValidationError("set cover: some element is not covered by any test");
    for (Index e : instance.test(best).elements) covered[e] = true;
    remaining -= best_gain;
    picks.push_back(best);
  }
  return picks;
}

CyclicSchedule set_cover_schedule(const Instance& instance) {
  return {greedy_set_cover(instance), Provenance::SetCover, false};
}

}  // namespace probesched
