#include "probesched/instance.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "probesched/errors.hpp"

namespace probesched {

const char* to_string(WeightMode mode) { return mode == WeightMode::Sum ? "sum" : "max"; }

WeightMode weight_mode_from_string(const std::string& name) {
  if (name == "sum") return WeightMode::Sum;
  if (name == "max") return WeightMode::Max;
  throw ValidationError("unknown weight mode '" + name + "' (expected sum or max)");
}

Instance::Instance(std::vector<std::string> element_ids, Eigen::VectorXd weights, std::vector<Test> tests,
                   WeightMode mode)
    : element_ids_(std::move(element_ids)), weights_(std::move(weights)), tests_(std::move(tests)), mode_(mode) {
  const Index n = num_elements();
  if (weights_.size() != n) throw ValidationError("weight vector size does not match element count");

  std::unordered_set<std::string> seen;
  for (const auto& id : element_ids_)
    if (!seen.insert(id).second) throw ValidationError("duplicate element id '" + id + "'");
  seen.clear();
  for (const auto& t : tests_)
    if (!seen.insert(t.id).second) throw ValidationError("duplicate test id '" + t.id + "'");

  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < tests_.size(); ++i) {
    Test& t = tests_[i];
    if (t.detect_prob.empty()) t.detect_prob.assign(t.elements.size(), 1.0);
    if (t.detect_prob.size() != t.elements.size())
      throw ValidationError("test '" + t.id + "': detect_prob size does not match its element list");
    std::unordered_set<Index> members;
    for (std::size_t k = 0; k < t.elements.size(); ++k) {
      Index e = t.elements[k];
      if (e < 0 || e >= n) throw ValidationError("test '" + t.id + "' references an unknown element");
      if (!members.insert(e).second)
        throw ValidationError("test '" + t.id + "' lists element '" + element_ids_[e] + "' twice");
      if (t.detect_prob[k] != 1.0) deterministic_ = false;
      entries.emplace_back(e, static_cast<Index>(i), t.detect_prob[k]);
    }
  }
  coverage_.resize(n, num_tests());
  coverage_.setFromTriplets(entries.begin(), entries.end());
}

Eigen::VectorXi Instance::cover_counts() const {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(num_elements());
  for (const auto& t : tests_)
    for (std::size_t k = 0; k < t.elements.size(); ++k)
      if (t.detect_prob[k] > 0.0) ++counts[t.elements[k]];
  return counts;
}

std::optional<Index> Instance::element_index(const std::string& id) const {
  auto it = std::find(element_ids_.begin(), element_ids_.end(), id);
  if (it == element_ids_.end()) return std::nullopt;
  return static_cast<Index>(it - element_ids_.begin());
}

std::optional<Index> Instance::test_index(const std::string& id) const {
  auto it = std::find_if(tests_.begin(), tests_.end(), [&](const Test& t) { return t.id == id; });
  if (it == tests_.end()) return std::nullopt;
  return static_cast<Index>(it - tests_.begin());
}

std::string ValidationReport::summary() const {
  if (ok()) return "OK";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].message;
  }
  return out.str();
}

ValidationReport validate(const Instance& instance) {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, std::string message) { report.violations.push_back({kind, std::move(message)}); };

  for (const auto& t : instance.tests()) {
    if (t.elements.empty()) add(Violation::Kind::EmptyTest, "empty test '" + t.id + "'");
    for (std::size_t k = 0; k < t.elements.size(); ++k) {
      double pi = t.detect_prob[k];
      if (!(pi > 0.0 && pi <= 1.0))
        add(Violation::Kind::ProbabilityOutOfRange, "test '" + t.id + "': detect_prob for element '" +
                                                        instance.element_ids()[t.elements[k]] +
                                                        "' outside (0,1]");
    }
  }
  const auto& w = instance.weights();
  for (Index e = 0; e < instance.num_elements(); ++e)
    if (!(w[e] > 0.0) || !std::isfinite(w[e]))
      add(Violation::Kind::NonPositiveWeight, "element " + instance.element_ids()[e] + " has non-positive weight");

  Eigen::VectorXi counts = instance.cover_counts();
  for (Index e = 0; e < instance.num_elements(); ++e)
    if (counts[e] == 0) add(Violation::Kind::UncoveredElement, "element " + instance.element_ids()[e] + " uncovered");
  return report;
}

void require_valid(const Instance& instance) {
  ValidationReport report = validate(instance);
  if (!report.ok()) throw ValidationError("invalid instance: " + report.summary());
}

Eigen::VectorXd normalized_weights(const Eigen::VectorXd& weights, WeightMode mode) {
  if (weights.size() == 0) return weights;
  if ((weights.array() < 0.0).any()) throw ValidationError("cannot normalize negative weights");
  double scale = mode == WeightMode::Sum ? weights.sum() : weights.maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("cannot normalize all-zero weights");
  return weights / scale;
}

Instance normalize(const Instance& instance, WeightMode mode) {
  return Instance(instance.element_ids(), normalized_weights(instance.weights(), mode), instance.tests(), mode);
}

Instance restrict_tests(const Instance& instance, std::span<const Index> keep) {
  std::vector<Test> tests;
  tests.reserve(keep.size());
  for (Index i : keep) {
    if (i < 0 || i >= instance.num_tests()) throw ValidationError("test subset index out of range");
    tests.push_back(instance.test(i));
  }
  return Instance(instance.element_ids(), instance.weights(), std::move(tests), instance.weight_mode());
}

}  // namespace probesched
