#include "probesched/kt_sched.hpp"

#include <unordered_map>

#include "probesched/errors.hpp"

namespace probesched {

namespace {

struct StateHash {
  std::size_t operator()(const std::vector<std::int64_t>& x) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto v : x) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

Index kt_best_test(const Instance& instance, const Eigen::VectorXd& weights, const std::vector<std::int64_t>& x) {
  Index best = 0;
  double best_value = 0;
  for (Index i = 0; i < instance.num_tests(); ++i) {
    double y = 0;
    for (Index e : instance.test(i).elements) {
      const auto xe = static_cast<double>(x[e]);
      y += weights[e] * xe * xe;
    }
    if (y > best_value) {
      best = i;
      best_value = y;
    }
  }
  return best;
}

void kt_advance(const Instance& instance, Index test, KTState& state) {
  for (auto& v : state.x) ++v;
  if (test != kIdle)
    for (Index e : instance.test(test).elements) state.x[e] = 1;
  ++state.steps;
}

KTStep kt_step(const Instance& instance, const KTState& state) {
  KTStep out{kt_best_test(instance, instance.weights(), state.x), state};
  kt_advance(instance, out.test, out.state);
  return out;
}

CyclicSchedule kt_schedule(const Instance& instance, const KTOptions& options) {
  require_valid(instance);
  if (options.max_steps < 1) throw ValidationError("kt_schedule: max_steps must be at least 1");

  CyclicSchedule out;
  out.provenance = Provenance::KT;
  std::unordered_map<std::vector<std::int64_t>, std::int64_t, StateHash> seen;
  std::vector<Index> picks;
  KTState state = KTState::initial(instance.num_elements());

  for (std::int64_t step = 0; step < options.max_steps; ++step) {
    auto it = seen.find(state.x);
    if (it != seen.end()) {
      out.cycle.assign(picks.begin() + it->second, picks.end());
      return out;
    }
    if (seen.size() < options.max_states) seen.emplace(state.x, step);
    Index test = kt_best_test(instance, instance.weights(), state.x);
    picks.push_back(test);
    kt_advance(instance, test, state);
  }
  // no certified repeat; the tail is the best available stand-in
  out.approximate = true;
  out.cycle.assign(picks.end() - static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, picks.size() / 2)), picks.end());
  return out;
}

}  // namespace probesched
