// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "probesched/compare.hpp"
#include "probesched/cover_sched.hpp"
#include "probesched/evaluator.hpp"
#include "probesched/kt_sched.hpp"
#include "probesched/memoryless.hpp"
#include "probesched/oracle.hpp"
#include "probesched/random.hpp"
#include "probesched/tree_sched.hpp"
#include "support.hpp"

using namespace probesched;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Every report produced by the run goes through here so the ordering
// check covers all of them.
struct OrderingAudit {
  long reports = 0;
  long violations = 0;

  const ObjectiveReport& record(const ObjectiveReport& r) {
    ++reports;
    if (!testsupport::ordering_holds(r)) ++violations;
    return r;
  }
  ObjectiveReport eval(const Instance& inst, const CyclicSchedule& s) { return record(evaluate_normalized(inst, s)); }
} audit;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<Instance> singleton_corpus() {
  std::vector<Instance> out;
  Rng rng(20240601);
  for (int k = 0; k < 20; ++k) {
    const Index n = 1 + static_cast<Index>(rng.below(10));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& x : p) x = 0.01 + rng.uniform();
    out.push_back(gen_singletons(n, p));
  }
  return out;
}

Outcome square_root_law() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_q = 0, worst_v = 0;
  for (const Instance& inst : singleton_corpus()) {
    const Eigen::VectorXd p = normalized_weights(inst.weights(), WeightMode::Sum);
    const Eigen::VectorXd root = p.cwiseSqrt();
    const Frequencies f = solve_sum(inst);
    worst_q = std::max(worst_q, (f.q - root / root.sum()).cwiseAbs().maxCoeff());
    const double want = root.sum() * root.sum();
    worst_v = std::max(worst_v, std::abs(f.value - want) / want);
  }
  const double secs = seconds_since(t0);
  o.pass = worst_q <= 1e-4 && worst_v <= 1e-6 && secs < 1.0;
  o.detail = fmt("max |dq| %.2e, max rel value err %.2e, %.3f s", worst_q, worst_v, secs);
  return o;
}

Outcome max_singleton_law() {
  Outcome o;
  double worst = 0;
  for (const Instance& inst : singleton_corpus()) {
    const double want = normalized_weights(inst.weights(), WeightMode::Max).sum();
    worst = std::max(worst, std::abs(solve_max(inst).value - want) / want);
  }
  o.pass = worst <= 1e-6;
  o.detail = fmt("max rel err %.2e", worst);
  return o;
}

Outcome pinned_tree_fixture() {
  TreeMapping m;
  m.nodes = {{2, 0}, {2, 1}, {3, 2}, {3, 3}, {4, 6}, {4, 14}, {4, 15}, {5, 7}, {5, 23}};
  const std::string got = testsupport::one_based(schedule_from_mapping(m, 5).cycle);
  const std::string want = "1 2 3 4 1 2 5 8 1 2 3 4 1 2 6 7 1 2 3 4 1 2 5 9 1 2 3 4 1 2 6 7";
  std::vector<double> q{0.25, 0.25, 0.125, 0.125, 0.0625, 0.0625, 0.0625, 0.03125, 0.03125};
  const Instance inst = gen_singletons(9, q);
  audit.eval(inst, schedule_from_mapping(m, 5));
  return {got == want, got};
}

Outcome uniform_gap() {
  Outcome o;
  const Instance inst = gen_singletons(8);
  const double p_max = inst.weights().maxCoeff();
  RTreeOptions opt;
  opt.seed = 0;
  const Frequencies sum = solve_sum(inst);
  const Frequencies max = solve_max(inst);
  const std::vector<std::pair<const char*, CyclicSchedule>> runs{
      {"KT", kt_schedule(inst)},
      {"SC", set_cover_schedule(inst)},
      {"RT", r_tree(inst, sum.q, Objective::EeEt, opt).schedule}};
  for (const auto& [name, s] : runs) {
    const bool perm = testsupport::is_permutation_cycle(s.cycle, 8);
    const ObjectiveReport r = audit.record(evaluate(inst, s));
    audit.eval(inst, s);
    const bool ok = perm && r.EeEt == 4.5 && r.EeMt == 8.0 && r.MtEe == 4.5 && r.MeMt == 8.0 * p_max;
    if (!ok) o.pass = false;
    o.detail += std::string(name) + (ok ? " ok; " : " MISMATCH; ");
  }
  const bool memoryless_ok = sum.value == 8.0 && max.value == 8.0;
  o.pass = o.pass && memoryless_ok;
  o.detail += fmt("memoryless SUM %.17g, MAX %.17g, gap %.4f", sum.value, max.value, sum.value / 4.5);
  return o;
}

Outcome oracle_inequalities() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(5150);
  int failures = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    RandomInstanceParams params;
    params.num_elements = 1 + static_cast<Index>(rng.below(4));
    params.num_tests = 1 + static_cast<Index>(rng.below(3));
    params.density = 0.5;
    params.weights = WeightProfile::Random;
    params.seed = rng.next();
    const Instance inst = gen_random(params);
    const double sum = solve_sum(inst).value;
    const double max = solve_max(inst).value;
    const DetOptimum eeet = det_optimum(inst, Objective::EeEt, 6);
    const DetOptimum eemt = det_optimum(inst, Objective::EeMt, 6);
    const DetOptimum memt = det_optimum(inst, Objective::MeMt, 6);
    for (const DetOptimum* d : {&eeet, &eemt, &memt}) audit.eval(inst, d->schedule);
    const bool ok = eeet.value <= sum + 1e-6 && sum <= eemt.value + 1e-6 && max <= memt.value + 1e-6;
    failures += !ok;
    tightest = std::min({tightest, sum - eeet.value, eemt.value - sum, memt.value - max});
  }
  const double secs = seconds_since(t0);
  o.pass = failures == 0 && secs < 30.0;
  o.detail = fmt("%g of 50 violated, smallest slack %.3e, %.2f s", failures, tightest, secs);
  return o;
}

Outcome geometric_detection() {
  Outcome o;
  RandomInstanceParams params;
  params.num_elements = 20;
  params.num_tests = 10;
  params.density = 0.25;
  params.weights = WeightProfile::Zipf;
  params.seed = 77;
  const Instance inst = gen_random(params);
  const Eigen::VectorXd q = solve_sum(inst).q;
  const Eigen::VectorXd Q = eval_memoryless(inst, q).rates;
  const std::int64_t samples = 100000;
  long inside = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto stats = simulate_memoryless(inst, q, samples, seed);
    for (Index e = 0; e < inst.num_elements(); ++e) {
      const double se = std::sqrt(1 - Q[e]) / Q[e] / std::sqrt(double(samples));
      inside += std::abs(stats[e].mean - 1 / Q[e]) <= 3 * se;
      ++total;
    }
  }
  const double frac = double(inside) / double(total);
  o.pass = frac >= 0.95;
  o.detail = fmt("%.1f%% of %g element means within 3 SE", 100 * frac, double(total));
  return o;
}

bool same_bits(const ObjectiveReport& a, const ObjectiveReport& b) {
  for (Objective o : kAllObjectives) {
    const double x = a.get(o), y = b.get(o);
    if (std::memcmp(&x, &y, sizeof x) != 0) return false;
  }
  if (a.Mt.size() != b.Mt.size()) return false;
  return std::memcmp(a.Mt.data(), b.Mt.data(), sizeof(double) * a.Mt.size()) == 0 &&
         std::memcmp(a.Et.data(), b.Et.data(), sizeof(double) * a.Et.size()) == 0;
}

Outcome probabilistic_tests() {
  Outcome o;
  bool doubled = true;
  for (const Instance& base : singleton_corpus()) {
    std::vector<Test> halved = base.tests();
    for (Test& t : halved) t.detect_prob.assign(t.elements.size(), 0.5);
    const Instance lossy(base.element_ids(), base.weights(), halved);
    Rng rng(base.num_elements());
    Eigen::VectorXd q(base.num_tests());
    for (Index i = 0; i < q.size(); ++i) q[i] = 0.1 + rng.uniform();
    q /= q.sum();
    const MemorylessEval a = eval_memoryless(base, q), b = eval_memoryless(lossy, q);
    for (Index e = 0; e < base.num_elements(); ++e) doubled = doubled && 1.0 / b.rates[e] == 2.0 * (1.0 / a.rates[e]);
    doubled = doubled && b.sum_value == 2.0 * a.sum_value;
  }

  bool identical = true;
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    RandomInstanceParams params;
    params.num_elements = 12;
    params.num_tests = 6;
    params.density = 0.3;
    params.weights = WeightProfile::Random;
    params.seed = seed;
    const Instance inst = gen_random(params);
    for (const CyclicSchedule& s : {kt_schedule(inst), set_cover_schedule(inst)}) {
      const ObjectiveReport d = audit.record(evaluate(inst, s));
      const ObjectiveReport p = audit.record(evaluate_probabilistic(inst, s));
      identical = identical && same_bits(d, p);
      ++compared;
    }
  }
  o.pass = doubled && identical;
  o.detail = std::string(doubled ? "halved pi doubles 1/Q exactly" : "halving pi did NOT double 1/Q") + "; " +
             (identical ? "pi=1 bit-identical on " : "pi=1 MISMATCH among ") + std::to_string(compared) + " schedules";
  return o;
}

Outcome rtree_guarantee() {
  Outcome o;
  const Instance inst = gen_lowerbound(6, 3);
  const Frequencies f = solve_sum(inst);
  const TreeLevels levels = round_frequencies(f.q);
  const Eigen::VectorXd Q = eval_memoryless(inst, f.q).rates;
  const Eigen::VectorXi ell = inst.cover_counts();
  Eigen::VectorXd mean_gap = Eigen::VectorXd::Zero(inst.num_elements());
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const TreeMapping m = map_random(levels.level, static_cast<std::uint64_t>(s));
    const CyclicSchedule sched = schedule_from_mapping(m, m.max_level(), FillPolicy::Idle);
    mean_gap += audit.record(evaluate(inst, sched)).Mt / seeds;
    audit.eval(inst, sched);
  }
  double worst_ratio = 0;
  for (Index e = 0; e < inst.num_elements(); ++e)
    worst_ratio = std::max(worst_ratio, mean_gap[e] / (16 * std::log(ell[e] + 1.0) / Q[e]));

  RTreeOptions opt;
  opt.trials = 32;
  opt.seed = 0;
  const RTreeResult best = r_tree(inst, f.q, Objective::EeEt, opt);
  const double eeet = audit.eval(inst, best.schedule).EeEt;
  o.pass = worst_ratio <= 1.0 && eeet <= 3 * f.value;
  o.detail = fmt("max gap / bound %.3f; best-of-32 EeEt %.4f vs 3 x %.4f", worst_ratio, eeet, f.value);
  return o;
}

Outcome clos_pattern() {
  Outcome o;
  const Instance inst = gen_clos(3, 2);
  const std::vector<CompareRow> rows = compare(inst);
  const CompareRow* convex = nullptr;
  const CompareRow* lp = nullptr;
  const CompareRow* sc = nullptr;
  for (const CompareRow& r : rows) {
    if (r.scheduler == "Convex") convex = &r;
    if (r.scheduler == "LP") lp = &r;
    if (r.scheduler == "SC") sc = &r;
    if (!r.memoryless) {
      ObjectiveReport rep;
      rep.EeEt = r.values[0], rep.MtEe = r.values[1], rep.EeMt = r.values[2];
      rep.MeEt = r.values[3], rep.EtMe = r.values[4], rep.MeMt = r.values[5];
      audit.record(rep);
    }
  }
  if (!convex || !lp || !sc) return {false, "missing rows"};
  const double ref = convex->values[0];
  const bool equal = std::abs(lp->values[0] - ref) <= 1e-4 && std::abs(convex->values[5] - ref) <= 1e-4 &&
                     std::abs(lp->values[5] - ref) <= 1e-4;
  const auto cover = static_cast<double>(greedy_set_cover(inst).size());
  const bool sc_ok = sc->values[5] == cover;
  o.pass = equal && sc_ok;
  o.detail = fmt("SUM convex %.6f / LP %.6f, MAX convex ", ref, lp->values[0]) +
             fmt("%.6f / LP %.6f; SC MeMt %g", convex->values[5], lp->values[5], sc->values[5]) +
             fmt(" vs cover %g", cover);
  return o;
}

// More schedules for the ordering audit: every scheduler on a spread of instances.
void ordering_sweep() {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomInstanceParams params;
    params.num_elements = 5 + static_cast<Index>(seed % 20);
    params.num_tests = 3 + static_cast<Index>(seed % 9);
    params.density = 0.25;
    params.weights = seed % 3 == 0 ? WeightProfile::Zipf : WeightProfile::Random;
    params.seed = seed;
    const Instance inst = gen_random(params);
    audit.eval(inst, kt_schedule(inst));
    audit.eval(inst, set_cover_schedule(inst));
    RTreeOptions opt;
    opt.trials = 8;
    opt.seed = seed;
    for (const CyclicSchedule& s : r_tree_candidates(inst, solve_sum(inst).q, opt).schedules) audit.eval(inst, s);
    for (const CyclicSchedule& s : r_tree_candidates(inst, solve_max(inst).q, opt).schedules) audit.eval(inst, s);
  }
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, Outcome>> results(10);
  results[0] = {"square-root law on 20 singleton instances", square_root_law()};
  results[1] = {"MAX singleton law", max_singleton_law()};
  results[2] = {"pinned nine-test tree mapping at N=5", pinned_tree_fixture()};
  results[3] = {"uniform singletons n=8: permutations and 8 / 4.5 gap", uniform_gap()};
  results[4] = {"oracle inequalities on 50 tiny instances", oracle_inequalities()};
  results[6] = {"memoryless detection is geometric", geometric_detection()};
  results[7] = {"probabilistic tests", probabilistic_tests()};
  results[8] = {"R-Tree statistical guarantee on lowerbound(6,3)", rtree_guarantee()};
  results[9] = {"Clos(3,2) memoryless equality and SC cover size", clos_pattern()};
  ordering_sweep();
  results[5] = {"objective ordering on every evaluated schedule",
                {audit.violations == 0,
                 std::to_string(audit.reports) + " reports, " + std::to_string(audit.violations) + " violations"}};

  int failed = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& [name, out] = results[k];
    std::printf("[%s] %2zu  %s  (%s)\n", out.pass ? "PASS" : "FAIL", k + 1, name.c_str(), out.detail.c_str());
    failed += !out.pass;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
  return failed ? 1 : 0;
}
