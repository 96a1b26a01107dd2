#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <limits>

#include "probesched/instance.hpp"

namespace probesched {

// A memoryless schedule: each probe is an independent draw from q.
struct Frequencies {
  Eigen::VectorXd q;
  /// Objective achieved by the solver that produced q (NaN when not solved).
  double value = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double kkt = std::numeric_limits<double>::quiet_NaN();
};

struct SolveConfig {
  double tolerance = 1e-6;
  int max_iterations = 200000;
  std::uint64_t seed = 0;  // reserved; the solvers are deterministic
};

/// Q_e = sum_i pi_ei q_i.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coverage_rates(const Eigen::SparseMatrix<double>& coverage,
                                                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& q) {
  return coverage.cast<Scalar>() * q;
}

/// SUM[q] = sum_e p_e / Q_e; infinite when some Q_e = 0.
template <class Scalar>
Scalar memoryless_sum(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& weights,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rates) {
  if ((rates.array() <= Scalar(0)).any()) return std::numeric_limits<Scalar>::infinity();
  return (weights.array() / rates.array()).sum();
}

/// MAX[q] = max_e p_e / Q_e; infinite when some Q_e = 0.
template <class Scalar>
Scalar memoryless_max(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& weights,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rates) {
  if ((rates.array() <= Scalar(0)).any()) return std::numeric_limits<Scalar>::infinity();
  return (weights.array() / rates.array()).maxCoeff();
}

/// Gradient of the SUM objective: r_i = -sum_e pi_ei p_e / Q_e^2.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> balance_values(const Eigen::SparseMatrix<double>& coverage,
                                                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& weights,
                                                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rates) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> pressure = (weights.array() / rates.array().square()).matrix();
  return -(coverage.cast<Scalar>().transpose() * pressure);
}

struct MemorylessEval {
  double sum_value = 0;
  double max_value = 0;
  Eigen::VectorXd rates;  // Q_e; expected detection time of e is 1 / Q_e
};

/// Closed-form SUM and MAX values with the instance's weights as stored.
MemorylessEval eval_memoryless(const Instance& instance, const Eigen::VectorXd& q);

/// Optimal memoryless frequencies for the SUM objectives (convex program).
/// Weights are SUM-normalized internally; `value` refers to them.
Frequencies solve_sum(const Instance& instance, const SolveConfig& config = {});

/// Optimal memoryless frequencies for the MAX objectives (max-min LP).
/// Weights are MAX-normalized internally; `value` = max_e p_e / Q_e.
Frequencies solve_max(const Instance& instance, const SolveConfig& config = {});

/// Relative spread of the balance values over tests with q_i > 1e-9, combined
/// with the complementary-slackness gap of the remaining tests.
double kkt_residual(const Instance& instance, const Eigen::VectorXd& q);

/// q_i = 1/m.
Eigen::VectorXd uniform_frequencies(const Instance& instance);

}  // namespace probesched
