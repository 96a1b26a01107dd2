#include "probesched/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "probesched/errors.hpp"
#include "probesched/exact_sum.hpp"
#include "probesched/io.hpp"
#include "probesched/random.hpp"

namespace probesched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Slots (ascending) at which each element is covered by the cycle.
std::vector<std::vector<Index>> cover_positions(const Instance& instance, const CyclicSchedule& schedule) {
  std::vector<std::vector<Index>> pos(static_cast<std::size_t>(instance.num_elements()));
  for (Index t = 0; t < schedule.length(); ++t) {
    Index test = schedule.cycle[t];
    if (test == kIdle) continue;
    if (test < 0 || test >= instance.num_tests()) throw ValidationError("schedule references an unknown test");
    for (Index e : instance.test(test).elements) pos[e].push_back(t);
  }
  return pos;
}

void check_schedule(const CyclicSchedule& schedule) {
  if (schedule.cycle.empty()) throw ValidationError("schedule cycle is empty");
}

ObjectiveReport infinite_report(Index n, Index N, bool keep_per_time) {
  ObjectiveReport r;
  r.EeEt = r.MtEe = r.EeMt = r.MeEt = r.EtMe = r.MeMt = kInf;
  r.Mt = Eigen::VectorXd::Constant(n, kInf);
  r.Et = Eigen::VectorXd::Constant(n, kInf);
  if (keep_per_time) {
    r.Me_t.assign(static_cast<std::size_t>(N), kInf);
    r.Ee_t.assign(static_cast<std::size_t>(N), kInf);
  }
  r.infinite = true;
  return r;
}

// Accumulates the per-epoch aggregates from rows T(., t). All reductions are
// exact until the final rounding.
class EpochAccumulator {
 public:
  EpochAccumulator(const Eigen::VectorXd& weights, Index cycle_length, bool keep_per_time)
      : p_(weights), N_(cycle_length), keep_(keep_per_time) {
    if (keep_) {
      me_t_.resize(static_cast<std::size_t>(N_));
      ee_t_.resize(static_cast<std::size_t>(N_));
    }
  }

  void add_epoch(Index t, const Eigen::VectorXd& times) {
    ExactSum ee;
    double best_hi = -kInf, best_lo = 0;
    for (Index e = 0; e < p_.size(); ++e) {
      const double hi = p_[e] * times[e];
      const double lo = std::fma(p_[e], times[e], -hi);
      ee.add(hi);
      ee.add(lo);
      if (hi > best_hi || (hi == best_hi && lo > best_lo)) {
        best_hi = hi;
        best_lo = lo;
      }
    }
    const double ee_value = ee.value();
    mt_ee_ = std::max(mt_ee_, ee_value);
    me_mt_ = std::max(me_mt_, best_hi);
    total_.add(ee);
    me_sum_.add(best_hi);
    me_sum_.add(best_lo);
    if (keep_) {
      ee_t_[t] = ee_value;
      me_t_[t] = best_hi;
    }
  }

  // `weighted_sums[e]` = exact sum over epochs of p_e * T(e, t).
  ObjectiveReport finish(Eigen::VectorXd Mt, Eigen::VectorXd Et, const std::vector<ExactSum>& weighted_sums) {
    ObjectiveReport r;
    const auto N = static_cast<std::uint64_t>(N_);
    ExactSum ee_mt;
    double me_et = 0;
    for (Index e = 0; e < p_.size(); ++e) {
      ee_mt.add_product(p_[e], Mt[e]);
      me_et = std::max(me_et, weighted_sums[e].divided_by(N));
    }
    r.EeEt = total_.divided_by(N);
    r.MtEe = mt_ee_;
    r.EeMt = ee_mt.value();
    r.MeEt = me_et;
    r.EtMe = me_sum_.divided_by(N);
    r.MeMt = me_mt_;
    r.Mt = std::move(Mt);
    r.Et = std::move(Et);
    r.Me_t = std::move(me_t_);
    r.Ee_t = std::move(ee_t_);
    return r;
  }

 private:
  const Eigen::VectorXd& p_;
  Index N_;
  bool keep_;
  ExactSum total_, me_sum_;
  double mt_ee_ = 0, me_mt_ = 0;
  std::vector<double> me_t_, ee_t_;
};

}  // namespace

double ObjectiveReport::get(Objective o) const {
  switch (o) {
    case Objective::EeEt: return EeEt;
    case Objective::MtEe: return MtEe;
    case Objective::EeMt: return EeMt;
    case Objective::MeEt: return MeEt;
    case Objective::EtMe: return EtMe;
    case Objective::MeMt: return MeMt;
  }
  return kInf;
}

std::optional<std::int64_t> detection_time(const Instance& instance, const CyclicSchedule& schedule, Index element,
                                           Index t) {
  check_schedule(schedule);
  const Index N = schedule.length();
  for (Index h = 0; h < N; ++h) {
    Index test = schedule.cycle[(t + h) % N];
    if (test == kIdle) continue;
    const auto& members = instance.test(test).elements;
    if (std::find(members.begin(), members.end(), element) != members.end()) return h + 1;
  }
  return std::nullopt;
}

// Gap formula: with cyclic gaps g_1..g_k between consecutive covering slots
// (sum g_j = N), epochs inside a gap of length g see detection times 1..g, so
// Mt[e] = max g_j and Et[e] = sum g_j (g_j + 1) / (2N).
ObjectiveReport evaluate(const Instance& instance, const CyclicSchedule& schedule, bool keep_per_time) {
  check_schedule(schedule);
  const Index n = instance.num_elements();
  const Index N = schedule.length();
  const auto positions = cover_positions(instance, schedule);
  for (const auto& pos : positions)
    if (pos.empty()) {
      ObjectiveReport r = infinite_report(n, N, keep_per_time);
      for (Index e = 0; e < n; ++e) {
        const auto& ps = positions[e];
        if (ps.empty()) continue;
        std::int64_t worst = 0, acc = 0;
        for (std::size_t j = 0; j < ps.size(); ++j) {
          std::int64_t g = (j + 1 < ps.size() ? ps[j + 1] : ps[0] + N) - ps[j];
          worst = std::max(worst, g);
          acc += g * (g + 1) / 2;
        }
        r.Mt[e] = static_cast<double>(worst);
        r.Et[e] = static_cast<double>(acc) / static_cast<double>(N);
      }
      return r;
    }

  const Eigen::VectorXd& p = instance.weights();
  Eigen::VectorXd Mt(n), Et(n);
  std::vector<ExactSum> weighted(static_cast<std::size_t>(n));
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> next(n);
  for (Index e = 0; e < n; ++e) {
    const auto& ps = positions[e];
    std::int64_t worst = 0, acc = 0;
    for (std::size_t j = 0; j < ps.size(); ++j) {
      std::int64_t g = (j + 1 < ps.size() ? ps[j + 1] : ps[0] + N) - ps[j];
      worst = std::max(worst, g);
      acc += g * (g + 1) / 2;
    }
    Mt[e] = static_cast<double>(worst);
    Et[e] = static_cast<double>(acc) / static_cast<double>(N);
    weighted[e].add_product(p[e], static_cast<double>(acc));
    next[e] = ps.front() + N;
  }

  EpochAccumulator epochs(p, N, keep_per_time);
  Eigen::VectorXd times(n);
  for (Index t = N - 1; t >= 0; --t) {
    Index test = schedule.cycle[t];
    if (test != kIdle)
      for (Index e : instance.test(test).elements) next[e] = t;
    for (Index e = 0; e < n; ++e) times[e] = static_cast<double>(next[e] - t + 1);
    epochs.add_epoch(t, times);
  }
  return epochs.finish(std::move(Mt), std::move(Et), weighted);
}

ObjectiveReport evaluate_normalized(const Instance& instance, const CyclicSchedule& schedule) {
  auto run = [&](WeightMode mode) {
    const Instance scaled = normalize(instance, mode);
    return instance.deterministic() ? evaluate(scaled, schedule) : evaluate_probabilistic(scaled, schedule);
  };
  ObjectiveReport sum = run(WeightMode::Sum);
  ObjectiveReport max = run(WeightMode::Max);
  sum.MeEt = max.MeEt;
  sum.EtMe = max.EtMe;
  sum.MeMt = max.MeMt;
  return sum;
}

// E[T(e,t)] obeys E(t) = 1 + (1 - pi_t) E(t+1) around the cycle. E(0) comes
// from one pass: with P_k the chance that the k-th probe is the first success
// and rho the chance a whole cycle fails,
//   E(0) = (sum_k k P_k + rho N) / (1 - rho).
ObjectiveReport evaluate_probabilistic(const Instance& instance, const CyclicSchedule& schedule, bool keep_per_time) {
  check_schedule(schedule);
  const Index n = instance.num_elements();
  const Index m = instance.num_tests();
  const Index N = schedule.length();
  for (Index test : schedule.cycle)
    if (test != kIdle && (test < 0 || test >= m)) throw ValidationError("schedule references an unknown test");

  // dense pi per (element, test); instances here are small enough
  const Eigen::MatrixXd pi = Eigen::MatrixXd(instance.coverage());
  auto slot_pi = [&](Index e, Index t) {
    Index test = schedule.cycle[t];
    return test == kIdle ? 0.0 : pi(e, test);
  };

  Eigen::VectorXd expect(n);
  bool any_infinite = false;
  for (Index e = 0; e < n; ++e) {
    double survive = 1.0, first = 0.0;
    for (Index k = 0; k < N; ++k) {
      const double s = slot_pi(e, k);
      first += static_cast<double>(k + 1) * survive * s;
      survive *= 1.0 - s;
    }
    if (survive >= 1.0) {
      expect[e] = kInf;
      any_infinite = true;
    } else {
      expect[e] = (first + survive * static_cast<double>(N)) / (1.0 - survive);
    }
  }
  if (any_infinite) {
    ObjectiveReport r = infinite_report(n, N, keep_per_time);
    return r;
  }

  const Eigen::VectorXd& p = instance.weights();
  Eigen::VectorXd Mt = Eigen::VectorXd::Zero(n);
  std::vector<ExactSum> time_sums(static_cast<std::size_t>(n)), weighted(static_cast<std::size_t>(n));
  EpochAccumulator epochs(p, N, keep_per_time);
  for (Index t = N - 1; t >= 0; --t) {
    for (Index e = 0; e < n; ++e) {
      expect[e] = 1.0 + (1.0 - slot_pi(e, t)) * expect[e];
      Mt[e] = std::max(Mt[e], expect[e]);
      time_sums[e].add(expect[e]);
      weighted[e].add_product(p[e], expect[e]);
    }
    epochs.add_epoch(t, expect);
  }
  Eigen::VectorXd Et(n);
  for (Index e = 0; e < n; ++e) Et[e] = time_sums[e].divided_by(static_cast<std::uint64_t>(N));
  return epochs.finish(std::move(Mt), std::move(Et), weighted);
}

Eigen::VectorXd detection_quantiles(const Instance& instance, const CyclicSchedule& schedule, double quantile) {
  check_schedule(schedule);
  const Index N = schedule.length();
  const auto positions = cover_positions(instance, schedule);
  const auto rank = static_cast<std::int64_t>(std::ceil(quantile * static_cast<double>(N)));
  Eigen::VectorXd out(instance.num_elements());
  for (Index e = 0; e < instance.num_elements(); ++e) {
    const auto& ps = positions[e];
    if (ps.empty()) {
      out[e] = kInf;
      continue;
    }
    std::vector<std::int64_t> gaps;
    for (std::size_t j = 0; j < ps.size(); ++j) gaps.push_back((j + 1 < ps.size() ? ps[j + 1] : ps[0] + N) - ps[j]);
    // #epochs with T <= k is sum_j min(g_j, k); find the smallest k reaching the rank
    std::int64_t lo = 1, hi = *std::max_element(gaps.begin(), gaps.end());
    while (lo < hi) {
      std::int64_t mid = (lo + hi) / 2, count = 0;
      for (auto g : gaps) count += std::min(g, mid);
      if (count >= rank) hi = mid;
      else lo = mid + 1;
    }
    out[e] = static_cast<double>(lo);
  }
  return out;
}

double geometric_quantile(double rate, double quantile) {
  if (!(rate > 0.0)) return kInf;
  if (rate >= 1.0) return 1.0;
  return std::max(1.0, std::ceil(std::log1p(-quantile) / std::log1p(-rate) - 1e-12));
}

std::vector<DetectionStats> simulate_memoryless(const Instance& instance, const Eigen::VectorXd& q,
                                                std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw ValidationError("simulate_memoryless: samples must be at least 1");
  const Index m = instance.num_tests();
  if (q.size() != m) throw ValidationError("frequency vector does not match the test count");

  std::vector<double> cumulative(static_cast<std::size_t>(m));
  double run = 0;
  for (Index i = 0; i < m; ++i) cumulative[i] = run += q[i];

  const Eigen::MatrixXd pi = Eigen::MatrixXd(instance.coverage());
  const Eigen::VectorXd rates = instance.coverage() * q;
  std::vector<DetectionStats> out(static_cast<std::size_t>(instance.num_elements()));
  std::vector<double> draws(static_cast<std::size_t>(samples));

  for (Index e = 0; e < instance.num_elements(); ++e) {
    DetectionStats& st = out[e];
    if (!(rates[e] > 0.0)) {
      st.mean = st.p50 = st.p90 = st.p99 = st.max = kInf;
      st.stddev = kInf;
      continue;
    }
    Rng rng = Rng::derived(seed, static_cast<std::uint64_t>(e));
    double sum = 0, sq = 0;
    for (auto& d : draws) {
      std::int64_t probes = 0;
      while (true) {
        ++probes;
        double u = rng.uniform() * run;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto test = static_cast<Index>(std::min<std::ptrdiff_t>(it - cumulative.begin(), m - 1));
        double s = pi(e, test);
        if (s >= 1.0 || (s > 0.0 && rng.uniform() < s)) break;
      }
      d = static_cast<double>(probes);
      sum += d;
      sq += d * d;
    }
    const auto count = static_cast<double>(samples);
    st.mean = sum / count;
    st.stddev = samples > 1 ? std::sqrt(std::max(0.0, (sq - sum * sum / count) / (count - 1))) : 0.0;
    std::sort(draws.begin(), draws.end());
    auto nearest_rank = [&](double quant) {
      auto r = static_cast<std::size_t>(std::ceil(quant * count));
      return draws[std::clamp<std::size_t>(r, 1, draws.size()) - 1];
    };
    st.p50 = nearest_rank(0.50);
    st.p90 = nearest_rank(0.90);
    st.p99 = nearest_rank(0.99);
    st.max = draws.back();
  }
  return out;
}

std::vector<CdfRow> reverse_cdf(std::span<const double> values) {
  if (values.empty()) throw ValidationError("reverse CDF of an empty value set");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted)
    if (!std::isfinite(v)) throw ValidationError("reverse CDF input contains a non-finite value");
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<CdfRow> rows;
  const auto total = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    rows.push_back({sorted[i], static_cast<double>(i + 1) / total});
  }
  return rows;
}

void export_cdf(std::span<const double> values, const std::filesystem::path& path) {
  const auto rows = reverse_cdf(values);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "value,fraction_of_elements_at_least\n";
  for (const auto& row : rows) out << format_number(row.value) << ',' << format_number(row.fraction_at_least) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace probesched
