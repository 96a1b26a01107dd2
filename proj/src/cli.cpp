#include "probesched/cli.hpp"

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "probesched/compare.hpp"
#include "probesched/cover_sched.hpp"
#include "probesched/errors.hpp"
#include "probesched/evaluator.hpp"
#include "probesched/io.hpp"
#include "probesched/kt_sched.hpp"
#include "probesched/memoryless.hpp"
#include "probesched/tree_sched.hpp"

namespace probesched {

namespace {

struct GenArgs {
  std::string kind;
  Index n = 8;
  Index m = 10;
  int levels = 3, radix = 2;
  int subset_size = 2;
  double density = 0.3;
  double zipf = 1.5;
  std::string weights = "uniform";
  std::uint64_t seed = 0;
  std::string out;
};

struct SolveArgs {
  std::string family, instance, subset, out;
  double tol = 1e-6;
  int max_iterations = 200000;
};

struct ScheduleArgs {
  std::string kind, instance, freqs, out, mapping_out;
  std::string objective = "eeet";
  std::string fill = "kt";
  int trials = 32;
  std::uint64_t seed = 0;
};

struct EvalArgs {
  std::string instance, sched, freqs, out;
  std::int64_t mc = 0;
  std::uint64_t seed = 0;
};

struct CdfArgs {
  std::string instance, sched, freqs, stat = "mean", out;
};

struct CompareArgs {
  std::string instance, out;
  bool all = false;
  int trials = 32;
  std::uint64_t seed = 0;
};

WeightProfile profile_from(const std::string& name) {
  if (name == "uniform") return WeightProfile::Uniform;
  if (name == "random") return WeightProfile::Random;
  if (name == "zipf") return WeightProfile::Zipf;
  throw ValidationError("unknown weight profile '" + name + "'");
}

// "uniform" | "random" | "zipf" | explicit comma list
Eigen::VectorXd weights_from(const GenArgs& a, Index n) {
  if (a.weights.find(',') != std::string::npos || std::isdigit(static_cast<unsigned char>(a.weights[0]))) {
    std::vector<double> w;
    std::stringstream ss(a.weights);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        w.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ValidationError("bad weight '" + item + "'");
      }
    }
    if (static_cast<Index>(w.size()) != n) throw ValidationError("expected " + std::to_string(n) + " weights");
    return Eigen::Map<Eigen::VectorXd>(w.data(), n);
  }
  return make_weights(profile_from(a.weights), n, a.seed, a.zipf);
}

Instance reweighted(const Instance& inst, const Eigen::VectorXd& w) {
  return normalize(Instance(inst.element_ids(), w, inst.tests()), WeightMode::Sum);
}

void run_gen(const GenArgs& a) {
  Instance inst = [&]() -> Instance {
    if (a.kind == "singletons") return reweighted(gen_singletons(a.n), weights_from(a, a.n));
    if (a.kind == "clos") {
      Instance base = gen_clos(a.levels, a.radix);
      return reweighted(base, weights_from(a, base.num_elements()));
    }
    if (a.kind == "lowerbound") {
      Instance base = gen_lowerbound(static_cast<int>(a.m), a.subset_size);
      return reweighted(base, weights_from(a, base.num_elements()));
    }
    RandomInstanceParams params;
    params.num_elements = a.n;
    params.num_tests = a.m;
    params.density = a.density;
    params.seed = a.seed;
    Instance base = gen_random(params);
    return reweighted(base, weights_from(a, a.n));
  }();
  require_valid(inst);
  write_instance(inst, a.out);
  std::cout << a.kind << ": " << inst.num_elements() << " elements, " << inst.num_tests() << " tests -> " << a.out
            << '\n';
}

void run_solve(const SolveArgs& a) {
  const Instance inst = read_instance(a.instance);
  SolveConfig cfg;
  cfg.tolerance = a.tol;
  cfg.max_iterations = a.max_iterations;
  const WeightMode fam = a.family == "sum" ? WeightMode::Sum : WeightMode::Max;
  Frequencies f;
  if (!a.subset.empty()) {
    f = solve_on_subset(inst, read_test_subset(inst, a.subset), fam, cfg);
  } else {
    f = fam == WeightMode::Sum ? solve_sum(inst, cfg) : solve_max(inst, cfg);
  }
  write_frequencies(inst, f.q, a.out);
  std::cout << (fam == WeightMode::Sum ? "SUM" : "MAX") << " optimum " << format_number(f.value) << " -> " << a.out << '\n';
}

void run_schedule(const ScheduleArgs& a) {
  const Instance inst = read_instance(a.instance);
  CyclicSchedule sched;
  if (a.kind == "kt") {
    sched = kt_schedule(inst);
    if (sched.approximate) std::cerr << "warning: KT run hit its budget without a repeated state; cycle is approximate\n";
  } else if (a.kind == "setcover") {
    sched = set_cover_schedule(inst);
  } else {
    const Objective obj = objective_from_string(a.objective);
    Eigen::VectorXd q;
    if (!a.freqs.empty()) q = read_frequencies(inst, a.freqs);
    else q = family(obj) == WeightMode::Sum ? solve_sum(inst).q : solve_max(inst).q;
    RTreeOptions opt;
    opt.trials = a.trials;
    opt.seed = a.seed;
    if (a.fill == "idle") opt.fill = FillPolicy::Idle;
    else if (a.fill != "kt") throw ValidationError("unknown fill policy '" + a.fill + "'");
    RTreeResult r = r_tree(inst, q, obj, opt);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    if (!a.mapping_out.empty()) write_text(a.mapping_out, dump_mapping(inst, r.mapping));
    sched = std::move(r.schedule);
    std::cout << "best of " << a.trials << " trials: " << to_string(obj) << " = " << format_number(r.best_value)
              << " (trial " << r.best_trial << ")\n";
  }
  write_schedule(inst, sched, a.out);
  std::cout << to_string(sched.provenance) << " cycle of length " << sched.length() << " -> " << a.out << '\n';
}

ObjectiveReport memoryless_report(const Instance& inst, const Eigen::VectorXd& q) {
  ObjectiveReport r;
  const Eigen::VectorXd rates = coverage_rates<double>(inst.coverage(), q);
  const double sum = memoryless_sum<double>(normalized_weights(inst.weights(), WeightMode::Sum), rates);
  const double max = memoryless_max<double>(normalized_weights(inst.weights(), WeightMode::Max), rates);
  r.EeEt = r.MtEe = r.EeMt = sum;
  r.MeEt = r.EtMe = r.MeMt = max;
  r.Mt = r.Et = rates.cwiseInverse();
  r.infinite = !std::isfinite(sum);
  return r;
}

void require_one_source(const std::string& sched, const std::string& freqs) {
  if (sched.empty() == freqs.empty()) throw ValidationError("give exactly one of --sched or --freqs");
}

void run_eval(const EvalArgs& a) {
  require_one_source(a.sched, a.freqs);
  const Instance inst = read_instance(a.instance);
  ObjectiveReport report;
  std::vector<DetectionStats> mc;
  if (!a.sched.empty()) {
    report = evaluate_normalized(inst, read_schedule(inst, a.sched));
  } else {
    const Eigen::VectorXd q = read_frequencies(inst, a.freqs);
    report = memoryless_report(inst, q);
    if (a.mc > 0) mc = simulate_memoryless(inst, q, a.mc, a.seed);
  }
  write_text(a.out, report_csv(inst, report, mc.empty() ? nullptr : &mc));
  for (Objective o : kAllObjectives) std::cout << to_string(o) << ' ' << format_number(report.get(o)) << '\n';
}

void run_cdf(const CdfArgs& a) {
  require_one_source(a.sched, a.freqs);
  const Instance inst = read_instance(a.instance);
  Eigen::VectorXd values;
  if (!a.sched.empty()) {
    const CyclicSchedule s = read_schedule(inst, a.sched);
    if (a.stat == "p99") values = detection_quantiles(inst, s, 0.99);
    else {
      const ObjectiveReport r = evaluate(inst, s);
      values = a.stat == "max" ? r.Mt : r.Et;
    }
  } else {
    // memoryless: T(e,t) is geometric with the same law at every epoch
    const Eigen::VectorXd rates = coverage_rates<double>(inst.coverage(), read_frequencies(inst, a.freqs));
    values.resize(rates.size());
    for (Index e = 0; e < rates.size(); ++e)
      values[e] = a.stat == "p99" ? geometric_quantile(rates[e], 0.99) : 1.0 / rates[e];
  }
  export_cdf(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), a.out);
}

void run_compare(const CompareArgs& a) {
  const Instance inst = read_instance(a.instance);
  CompareOptions opt;
  opt.trials = a.trials;
  opt.seed = a.seed;
  const std::string csv = compare_csv(compare(inst, opt));
  write_text(a.out, csv);
  std::cout << csv;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"probesched: probe schedules for silent failure detection"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate an instance");
  g->add_option("kind", gen.kind)->required()->check(CLI::IsMember({"singletons", "clos", "lowerbound", "random"}));
  g->add_option("--n", gen.n, "elements (singletons, random)");
  g->add_option("--m", gen.m, "tests (lowerbound, random)");
  g->add_option("--l", gen.subset_size, "tests per element (lowerbound)");
  g->add_option("--levels", gen.levels, "switch tiers (clos)");
  g->add_option("--radix", gen.radix, "ports up and down per switch (clos)");
  g->add_option("--density", gen.density, "membership probability (random)");
  g->add_option("--weights", gen.weights, "uniform | random | zipf | comma-separated list");
  g->add_option("--zipf", gen.zipf, "zipf exponent");
  g->add_option("--seed", gen.seed);
  g->add_option("-o,--out", gen.out)->required();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "optimal memoryless frequencies");
  s->add_option("family", solve.family)->required()->check(CLI::IsMember({"sum", "max"}));
  s->add_option("-i,--instance", solve.instance)->required();
  s->add_option("--tol", solve.tol);
  s->add_option("--max-iterations", solve.max_iterations);
  s->add_option("--subset", solve.subset, "restrict to these tests (JSON list of ids)");
  s->add_option("-o,--out", solve.out)->required();

  ScheduleArgs sched;
  auto* sc = app.add_subcommand("schedule", "build a deterministic cyclic schedule");
  sc->add_option("kind", sched.kind)->required()->check(CLI::IsMember({"rtree", "kt", "setcover"}));
  sc->add_option("-i,--instance", sched.instance)->required();
  sc->add_option("--freqs", sched.freqs, "frequencies for rtree (default: solve for the objective's family)");
  sc->add_option("--objective", sched.objective, "eeet | mtee | eemt | meet | etme | memt");
  sc->add_option("--trials", sched.trials);
  sc->add_option("--seed", sched.seed);
  sc->add_option("--fill", sched.fill, "kt | idle");
  sc->add_option("--mapping-out", sched.mapping_out);
  sc->add_option("-o,--out", sched.out)->required();

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "evaluate all six objectives");
  ev->add_option("-i,--instance", eval.instance)->required();
  ev->add_option("--sched", eval.sched);
  ev->add_option("--freqs", eval.freqs);
  ev->add_option("--mc", eval.mc, "Monte-Carlo samples per element (memoryless)");
  ev->add_option("--seed", eval.seed);
  ev->add_option("-o,--out", eval.out)->required();

  CdfArgs cdf;
  auto* cd = app.add_subcommand("cdf", "reverse CDF of per-element detection times");
  cd->add_option("-i,--instance", cdf.instance)->required();
  cd->add_option("--sched", cdf.sched);
  cd->add_option("--freqs", cdf.freqs);
  cd->add_option("--stat", cdf.stat)->check(CLI::IsMember({"mean", "max", "p99"}));
  cd->add_option("-o,--out", cdf.out)->required();

  CompareArgs cmp;
  auto* co = app.add_subcommand("compare", "all schedulers against all objectives");
  co->add_option("-i,--instance", cmp.instance)->required();
  co->add_flag("--all", cmp.all, "run every scheduler (the only mode)");
  co->add_option("--trials", cmp.trials);
  co->add_option("--seed", cmp.seed);
  co->add_option("-o,--out", cmp.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*g) run_gen(gen);
    else if (*s) run_solve(solve);
    else if (*sc) run_schedule(sched);
    else if (*ev) run_eval(eval);
    else if (*cd) run_cdf(cdf);
    else if (*co) run_compare(cmp);
  } catch (const ProbeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace probesched
