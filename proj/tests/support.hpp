#pragma once

// Brute-force references used by the tests. Everything here works straight
// from the definitions: enumerate T(e, t) for every element and epoch, then
// aggregate in long double.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "probesched/evaluator.hpp"
#include "probesched/instance.hpp"
#include "probesched/schedule.hpp"

namespace testsupport {

using probesched::Index;

inline bool covers(const probesched::Instance& inst, Index test, Index e) {
  if (test == probesched::kIdle) return false;
  const auto& els = inst.test(test).elements;
  return std::find(els.begin(), els.end(), e) != els.end();
}

// T(e, t) by walking forward from t; -1 when e is never covered.
inline long long naive_time(const probesched::Instance& inst, const std::vector<Index>& cycle, Index e, Index t) {
  const Index N = static_cast<Index>(cycle.size());
  for (Index h = 0; h < N; ++h)
    if (covers(inst, cycle[static_cast<std::size_t>((t + h) % N)], e)) return h + 1;
  return -1;
}

struct NaiveReport {
  long double EeEt = 0, MtEe = 0, EeMt = 0, MeEt = 0, EtMe = 0, MeMt = 0;
  std::vector<long double> Mt, Et;
};

inline NaiveReport naive_report(const probesched::Instance& inst, const std::vector<Index>& cycle) {
  const Index n = inst.num_elements();
  const Index N = static_cast<Index>(cycle.size());
  const auto& p = inst.weights();
  NaiveReport r;
  r.Mt.assign(static_cast<std::size_t>(n), 0);
  r.Et.assign(static_cast<std::size_t>(n), 0);
  for (Index t = 0; t < N; ++t) {
    long double ee = 0, me = 0;
    for (Index e = 0; e < n; ++e) {
      const long double T = static_cast<long double>(naive_time(inst, cycle, e, t));
      r.Mt[e] = std::max(r.Mt[e], T);
      r.Et[e] += T / N;
      ee += p[e] * T;
      me = std::max(me, p[e] * T);
    }
    r.MtEe = std::max(r.MtEe, ee);
    r.EtMe += me / N;
  }
  for (Index e = 0; e < n; ++e) {
    r.EeEt += p[e] * r.Et[e];
    r.EeMt += p[e] * r.Mt[e];
    r.MeEt = std::max(r.MeEt, p[e] * r.Et[e]);
    r.MeMt = std::max(r.MeMt, p[e] * r.Mt[e]);
  }
  return r;
}

inline bool ordering_holds(const probesched::ObjectiveReport& r) {
  return r.EeMt >= r.MtEe && r.MtEe >= r.EeEt && r.MeMt >= r.EtMe && r.EtMe >= r.MeEt;
}

inline bool is_permutation_cycle(const std::vector<Index>& cycle, Index m) {
  std::vector<Index> sorted = cycle;
  std::sort(sorted.begin(), sorted.end());
  if (static_cast<Index>(sorted.size()) != m) return false;
  for (Index i = 0; i < m; ++i)
    if (sorted[static_cast<std::size_t>(i)] != i) return false;
  return true;
}

// Cycle printed with 1-based test numbers, space separated.
inline std::string one_based(const std::vector<Index>& cycle) {
  std::string s;
  for (Index t : cycle) {
    if (!s.empty()) s += ' ';
    s += t == probesched::kIdle ? std::string("x") : std::to_string(t + 1);
  }
  return s;
}

inline bool same_up_to_rotation(const std::vector<Index>& a, const std::vector<Index>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  for (std::size_t s = 0; s < a.size(); ++s) {
    bool ok = true;
    for (std::size_t k = 0; k < a.size() && ok; ++k) ok = a[(s + k) % a.size()] == b[k];
    if (ok) return true;
  }
  return false;
}

}  // namespace testsupport
