#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace probesched {

using Index = Eigen::Index;

/// How priorities are scaled: SUM objectives expect sum(p) = 1, MAX
/// objectives expect max(p) = 1.
enum class WeightMode { Sum, Max };

const char* to_string(WeightMode mode);
WeightMode weight_mode_from_string(const std::string& name);

// One test (a probe) and the elements it can detect. `detect_prob` is aligned
// with `elements`; a deterministic test has all entries equal to 1.
struct Test {
  std::string id;
  std::vector<Index> elements;
  std::vector<double> detect_prob;
};

// A test scheduling instance: n weighted elements and m tests.
//
// Immutable once built. Element and test indices follow construction order.
// The coverage matrix (n x m, entry pi_ei) is built eagerly since every solver
// and evaluator needs it.
class Instance {
 public:
  Instance(std::vector<std::string> element_ids, Eigen::VectorXd weights, std::vector<Test> tests,
           WeightMode mode = WeightMode::Sum);

  Index num_elements() const { return static_cast<Index>(element_ids_.size()); }
  Index num_tests() const { return static_cast<Index>(tests_.size()); }

  const std::vector<std::string>& element_ids() const { return element_ids_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<Test>& tests() const { return tests_; }
  const Test& test(Index i) const { return tests_[static_cast<std::size_t>(i)]; }
  WeightMode weight_mode() const { return mode_; }

  /// Column i holds pi_ei for the elements of test i.
  const Eigen::SparseMatrix<double>& coverage() const { return coverage_; }

  /// Number of tests that cover each element (l_e).
  Eigen::VectorXi cover_counts() const;
  /// True when every detect_prob equals 1.
  bool deterministic() const { return deterministic_; }

  std::optional<Index> element_index(const std::string& id) const;
  std::optional<Index> test_index(const std::string& id) const;

 private:
  std::vector<std::string> element_ids_;
  Eigen::VectorXd weights_;
  std::vector<Test> tests_;
  WeightMode mode_;
  Eigen::SparseMatrix<double> coverage_;
  bool deterministic_ = true;
};

struct Violation {
  enum class Kind { EmptyTest, UnknownElement, UncoveredElement, NonPositiveWeight, ProbabilityOutOfRange };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const Instance& instance);

/// Throws ValidationError with the report summary unless the instance is valid.
void require_valid(const Instance& instance);

/// Rescales all weights by one positive factor so the mode's invariant holds.
Instance normalize(const Instance& instance, WeightMode mode);

/// Scaled weight vector without rebuilding the instance.
Eigen::VectorXd normalized_weights(const Eigen::VectorXd& weights, WeightMode mode);

/// Sub-instance keeping only the listed tests (in the given order).
Instance restrict_tests(const Instance& instance, std::span<const Index> keep);

// --- generators ------------------------------------------------------------

/// n singleton tests; `weights` empty means uniform.
Instance gen_singletons(Index n, std::span<const double> weights = {});

/// Links of a k-ary folded Clos fabric (k = radix, `levels` switch tiers),
/// with one test per endpoint pair and shortest up/down route.
Instance gen_clos(int levels, int radix);

/// One element per l-subset of m tests, covered by exactly those tests.
Instance gen_lowerbound(int num_tests, int subset_size, std::uint64_t size_cap = 1'000'000);

enum class WeightProfile { Uniform, Random, Zipf };

struct RandomInstanceParams {
  Index num_elements = 10;
  Index num_tests = 10;
  double density = 0.3;
  WeightProfile weights = WeightProfile::Uniform;
  double zipf_exponent = 1.5;
  std::uint64_t seed = 0;
};

/// Random tests (Bernoulli membership), patched so every element is covered.
Instance gen_random(const RandomInstanceParams& params);

/// Weight vector for the named profile over n elements.
Eigen::VectorXd make_weights(WeightProfile profile, Index n, std::uint64_t seed = 0, double zipf_exponent = 1.5);

}  // namespace probesched
