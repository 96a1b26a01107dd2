#include "probesched/memoryless.hpp"

#include <cmath>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "probesched/errors.hpp"
#include "probesched/simplex.hpp"

namespace probesched {

namespace {

constexpr double kActive = 1e-9;  // q_i above this counts as an active test

double residual_from(const Eigen::VectorXd& q, const Eigen::VectorXd& r) {
  const double scale = r.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) return std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < q.size(); ++i)
    if (q[i] > kActive) {
      lo = std::min(lo, r[i]);
      hi = std::max(hi, r[i]);
    }
  if (!std::isfinite(lo)) return std::numeric_limits<double>::infinity();
  double res = (hi - lo) / scale;
  // an inactive test with a steeper descent direction than the active ones
  for (Index i = 0; i < q.size(); ++i)
    if (q[i] <= kActive) res = std::max(res, (lo - r[i]) / scale);
  return res;
}

constexpr Index kNewtonLimit = 2000;  // largest support handled by the dense Newton polish

// Newton step for sum_e p_e / Q_e restricted to the current support and the
// simplex constraint, clipped where a coordinate would turn negative. The KKT
// system can be singular (duplicate tests), hence the rank-revealing solve.
std::optional<Eigen::VectorXd> newton_step(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& p,
                                           const Eigen::VectorXd& q, const Eigen::VectorXd& rates) {
  std::vector<Index> support;
  for (Index i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) support.push_back(i);
  const auto s = static_cast<Index>(support.size());
  if (s < 2 || s > kNewtonLimit) return std::nullopt;

  Eigen::MatrixXd As(A.rows(), s);
  for (Index k = 0; k < s; ++k) As.col(k) = Eigen::VectorXd(A.col(support[k]));
  const Eigen::VectorXd pull = (p.array() / rates.array().square()).matrix();
  const Eigen::VectorXd curve = (2.0 * p.array() / rates.array().cube()).matrix();

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s + 1, s + 1);
  K.topLeftCorner(s, s) = As.transpose() * curve.asDiagonal() * As;
  K.block(0, s, s, 1).setOnes();
  K.block(s, 0, 1, s).setOnes();
  Eigen::VectorXd rhs(s + 1);
  rhs.head(s) = As.transpose() * pull;
  rhs[s] = 0.0;
  const Eigen::VectorXd d = K.completeOrthogonalDecomposition().solve(rhs).head(s);
  if (!d.allFinite()) return std::nullopt;

  double t = 1.0;
  Index blocking = -1;
  for (Index k = 0; k < s; ++k)
    if (d[k] < 0.0 && q[support[k]] + t * d[k] < 0.0) {
      t = -q[support[k]] / d[k];
      blocking = k;
    }
  Eigen::VectorXd next = q;
  for (Index k = 0; k < s; ++k) next[support[k]] = std::max(0.0, q[support[k]] + t * d[k]);
  if (blocking >= 0) next[support[blocking]] = 0.0;
  next /= next.sum();
  return next;
}

}  // namespace

Eigen::VectorXd uniform_frequencies(const Instance& instance) {
  const Index m = instance.num_tests();
  return Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
}

MemorylessEval eval_memoryless(const Instance& instance, const Eigen::VectorXd& q) {
  if (q.size() != instance.num_tests()) throw ValidationError("frequency vector does not match the test count");
  MemorylessEval out;
  out.rates = coverage_rates<double>(instance.coverage(), q);
  out.sum_value = memoryless_sum<double>(instance.weights(), out.rates);
  out.max_value = memoryless_max<double>(instance.weights(), out.rates);
  return out;
}

double kkt_residual(const Instance& instance, const Eigen::VectorXd& q) {
  const Eigen::VectorXd p = normalized_weights(instance.weights(), WeightMode::Sum);
  const Eigen::VectorXd rates = coverage_rates<double>(instance.coverage(), q);
  if ((rates.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
  return residual_from(q, balance_values<double>(instance.coverage(), p, rates));
}

// Multiplicative balancing: q_i <- q_i * (g_i / f)^alpha with g = -r and
// f = sum_i q_i g_i (the current objective), renormalized. At a fixed point
// every active test has g_i = f, which is exactly KKT balance. alpha = 1/2
// solves singleton instances in one step; it is halved whenever a step fails
// to decrease the objective. Tests whose balance value stays clearly below the
// active level decay geometrically and are cut to zero once negligible; a cut
// test whose gradient later exceeds the active level is revived.
Frequencies solve_sum(const Instance& instance, const SolveConfig& config) {
  require_valid(instance);
  if (!(config.tolerance > 0.0)) throw ValidationError("solver tolerance must be positive");

  const auto& A = instance.coverage();
  const Eigen::VectorXd p = normalized_weights(instance.weights(), WeightMode::Sum);
  const Index m = instance.num_tests();
  const double tol = config.tolerance;

  Frequencies out;
  Eigen::VectorXd q = uniform_frequencies(instance);
  Eigen::VectorXd rates = coverage_rates<double>(A, q);
  double f = memoryless_sum<double>(p, rates);
  std::deque<double> history;

  for (int it = 0; it < config.max_iterations; ++it) {
    const Eigen::VectorXd g = -balance_values<double>(A, p, rates);
    const double level = q.dot(g);  // equals f

    const double res = residual_from(q, -g);
    history.push_back(f);
    if (history.size() > 11) history.pop_front();
    if (res <= tol && (m == 1 || (history.size() == 11 && std::abs(history.front() - f) <= tol * f))) {
      out.q = q;
      out.value = f;
      out.iterations = it;
      out.kkt = res;
      return out;
    }

    // near the optimum, finish on the current face with Newton steps; accepted
    // when they lower the residual without raising f beyond rounding
    if (res > 0.01 * tol && res < 1e-2) {
      if (auto candidate = newton_step(A, p, q, rates)) {
        const Eigen::VectorXd cand_rates = coverage_rates<double>(A, *candidate);
        const double cand_f = memoryless_sum<double>(p, cand_rates);
        if (std::isfinite(cand_f) && cand_f <= f * (1.0 + 1e-14)) {
          const double cand_res = residual_from(*candidate, balance_values<double>(A, p, cand_rates));
          if (cand_f < f || cand_res < res) {
            q = std::move(*candidate);
            rates = cand_rates;
            f = cand_f;
            continue;
          }
        }
      }
    }

    bool reshaped = false;
    for (Index i = 0; i < m; ++i) {
      if (q[i] > 0.0 && q[i] < 1e-7 && g[i] < level * (1.0 - 10.0 * tol)) {
        q[i] = 0.0;
        reshaped = true;
      } else if (q[i] == 0.0 && g[i] > level * (1.0 + tol)) {
        q[i] = 1e-6;
        reshaped = true;
      }
    }
    if (reshaped) {
      q /= q.sum();
      rates = coverage_rates<double>(A, q);
      f = memoryless_sum<double>(p, rates);
      history.clear();
      continue;
    }

    double alpha = 0.5;
    bool moved = false;
    while (alpha > 1e-10) {
      Eigen::VectorXd candidate = (q.array() * (g.array() / level).pow(alpha)).matrix();
      candidate /= candidate.sum();
      Eigen::VectorXd cand_rates = coverage_rates<double>(A, candidate);
      double cand_f = memoryless_sum<double>(p, cand_rates);
      if (cand_f <= f) {
        q = std::move(candidate);
        rates = std::move(cand_rates);
        f = cand_f;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) {
      // no descent left at machine precision; accept if balanced enough
      if (res <= tol) {
        out.q = q;
        out.value = f;
        out.iterations = it;
        out.kkt = res;
        return out;
      }
      throw ConvergenceError("solve_sum stalled with KKT residual " + std::to_string(res));
    }
  }
  throw ConvergenceError("solve_sum did not converge within " + std::to_string(config.max_iterations) + " iterations");
}

// maximize z  s.t.  sum_i pi_ei q_i >= p_e z  for all e,  sum_i q_i <= 1,  q >= 0
Frequencies solve_max(const Instance& instance, const SolveConfig& config) {
  require_valid(instance);
  if (!(config.tolerance > 0.0)) throw ValidationError("solver tolerance must be positive");

  const Index n = instance.num_elements();
  const Index m = instance.num_tests();
  const Eigen::VectorXd p = normalized_weights(instance.weights(), WeightMode::Max);

  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n + 1, m + 1);
  lhs.topLeftCorner(n, m) = -Eigen::MatrixXd(instance.coverage());
  lhs.block(0, m, n, 1) = p;
  lhs.block(n, 0, 1, m).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = 1.0;
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(m + 1);
  objective[m] = 1.0;

  detail::TableauSimplex<double> lp(lhs, rhs, objective);
  auto x = lp.solve(config.max_iterations);
  if (!x) {
    if (lp.exhausted()) throw ConvergenceError("solve_max exceeded the pivot budget");
    throw ConvergenceError("solve_max: LP reported unbounded");
  }

  Frequencies out;
  out.q = x->head(m).cwiseMax(0.0);
  out.q /= out.q.sum();
  out.value = memoryless_max<double>(p, coverage_rates<double>(instance.coverage(), out.q));
  out.iterations = static_cast<int>(lp.pivots());
  return out;
}

}  // namespace probesched
