#include "probesched/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "probesched/errors.hpp"

namespace probesched {

using nlohmann::json;

namespace {

void reject_unknown(const json& object, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!object.is_object()) throw ValidationError(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : object.items())
    if (!ok.count(item.key())) throw ValidationError(where + ": unknown field '" + item.key() + "'");
}

const json& required(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) throw ValidationError(where + ": missing field '" + key + "'");
  return *it;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

// Rounds to `digits` significant digits so the JSON writer emits no more.
double round_digits(double v, int digits) { return std::strtod(format_number(v, digits).c_str(), nullptr); }

std::unordered_map<std::string, Index> test_lookup(const Instance& instance) {
  std::unordered_map<std::string, Index> ids;
  for (Index i = 0; i < instance.num_tests(); ++i) ids.emplace(instance.test(i).id, i);
  return ids;
}

Index lookup_test(const std::unordered_map<std::string, Index>& ids, const std::string& id) {
  auto it = ids.find(id);
  if (it == ids.end()) throw ValidationError("unknown test id '" + id + "'");
  return it->second;
}

}  // namespace

std::string format_number(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

// --- instances ---------------------------------------------------------------

Instance parse_instance(const std::string& text) {
  const json doc = parse_json(text, "instance");
  reject_unknown(doc, {"weight_mode", "elements", "tests"}, "instance");
  const WeightMode mode = weight_mode_from_string(required(doc, "weight_mode", "instance").get<std::string>());

  try {
    std::vector<std::string> ids;
    std::vector<double> weights;
    std::unordered_map<std::string, Index> element_index;
    for (const auto& el : required(doc, "elements", "instance")) {
      reject_unknown(el, {"id", "weight"}, "element");
      ids.push_back(required(el, "id", "element").get<std::string>());
      weights.push_back(required(el, "weight", "element").get<double>());
      if (!element_index.emplace(ids.back(), static_cast<Index>(ids.size() - 1)).second)
        throw ValidationError("duplicate element id '" + ids.back() + "'");
    }

    std::vector<Test> tests;
    for (const auto& tj : required(doc, "tests", "instance")) {
      reject_unknown(tj, {"id", "elements", "detect_prob"}, "test");
      Test t;
      t.id = required(tj, "id", "test").get<std::string>();
      for (const auto& eid : required(tj, "elements", "test '" + t.id + "'")) {
        auto it = element_index.find(eid.get<std::string>());
        if (it == element_index.end())
          throw ValidationError("test '" + t.id + "' references unknown element '" + eid.get<std::string>() + "'");
        t.elements.push_back(it->second);
      }
      t.detect_prob.assign(t.elements.size(), 1.0);
      if (auto dp = tj.find("detect_prob"); dp != tj.end()) {
        if (!dp->is_object()) throw ValidationError("test '" + t.id + "': detect_prob must be an object");
        for (const auto& item : dp->items()) {
          auto it = element_index.find(item.key());
          std::size_t k = 0;
          while (it != element_index.end() && k < t.elements.size() && t.elements[k] != it->second) ++k;
          if (it == element_index.end() || k == t.elements.size())
            throw ValidationError("test '" + t.id + "': detect_prob for element '" + item.key() + "' not in the test");
          t.detect_prob[k] = item.value().get<double>();
        }
      }
      tests.push_back(std::move(t));
    }

    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Index>(weights.size()));
    Instance raw(std::move(ids), w, std::move(tests), mode);
    if (w.size() == 0 || !(w.array() > 0.0).all()) return raw;  // validate() reports it
    const double scale = mode == WeightMode::Sum ? w.sum() : w.maxCoeff();
    return std::abs(scale - 1.0) <= 1e-12 ? raw : normalize(raw, mode);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("instance: ") + e.what());
  }
}

std::string dump_instance(const Instance& instance) {
  json doc;
  doc["weight_mode"] = to_string(instance.weight_mode());
  doc["elements"] = json::array();
  for (Index e = 0; e < instance.num_elements(); ++e)
    doc["elements"].push_back({{"id", instance.element_ids()[e]}, {"weight", instance.weights()[e]}});
  doc["tests"] = json::array();
  for (const auto& t : instance.tests()) {
    json tj;
    tj["id"] = t.id;
    tj["elements"] = json::array();
    json dp = json::object();
    for (std::size_t k = 0; k < t.elements.size(); ++k) {
      const auto& eid = instance.element_ids()[t.elements[k]];
      tj["elements"].push_back(eid);
      if (t.detect_prob[k] != 1.0) dp[eid] = t.detect_prob[k];
    }
    if (!dp.empty()) tj["detect_prob"] = dp;
    doc["tests"].push_back(std::move(tj));
  }
  return doc.dump(2) + "\n";
}

Instance read_instance(const std::filesystem::path& path) { return parse_instance(read_text(path)); }
void write_instance(const Instance& instance, const std::filesystem::path& path) { write_text(path, dump_instance(instance)); }

// --- frequencies -------------------------------------------------------------

Eigen::VectorXd parse_frequencies(const Instance& instance, const std::string& text) {
  const json doc = parse_json(text, "frequencies");
  reject_unknown(doc, {"test_ids", "q"}, "frequencies");
  try {
    const auto& ids = required(doc, "test_ids", "frequencies");
    const auto& values = required(doc, "q", "frequencies");
    if (!ids.is_array() || !values.is_array() || ids.size() != values.size())
      throw ValidationError("frequencies: test_ids and q must be arrays of equal length");
    const auto lookup = test_lookup(instance);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(instance.num_tests());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      double v = values[k].get<double>();
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("frequencies: q must be nonnegative");
      q[lookup_test(lookup, ids[k].get<std::string>())] = v;
    }
    const double total = q.sum();
    if (!(total > 0.0)) throw ValidationError("frequencies: all zero");
    return q / total;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("frequencies: ") + e.what());
  }
}

std::string dump_frequencies(const Instance& instance, const Eigen::VectorXd& q) {
  if (q.size() != instance.num_tests()) throw ValidationError("frequency vector does not match the test count");
  json doc;
  doc["test_ids"] = json::array();
  doc["q"] = json::array();
  for (Index i = 0; i < q.size(); ++i) {
    doc["test_ids"].push_back(instance.test(i).id);
    doc["q"].push_back(round_digits(q[i], 12));
  }
  return doc.dump(2) + "\n";
}

Eigen::VectorXd read_frequencies(const Instance& instance, const std::filesystem::path& path) {
  return parse_frequencies(instance, read_text(path));
}
void write_frequencies(const Instance& instance, const Eigen::VectorXd& q, const std::filesystem::path& path) {
  write_text(path, dump_frequencies(instance, q));
}

// --- schedules ---------------------------------------------------------------

CyclicSchedule parse_schedule(const Instance& instance, const std::string& text) {
  const json doc = parse_json(text, "schedule");
  reject_unknown(doc, {"cycle", "provenance"}, "schedule");
  try {
    CyclicSchedule s;
    s.provenance = provenance_from_string(required(doc, "provenance", "schedule").get<std::string>());
    const auto lookup = test_lookup(instance);
    for (const auto& slot : required(doc, "cycle", "schedule"))
      s.cycle.push_back(slot.is_null() ? kIdle : lookup_test(lookup, slot.get<std::string>()));
    if (s.cycle.empty()) throw ValidationError("schedule: empty cycle");
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schedule: ") + e.what());
  }
}

std::string dump_schedule(const Instance& instance, const CyclicSchedule& schedule) {
  json doc;
  doc["cycle"] = json::array();
  for (Index test : schedule.cycle) {
    if (test == kIdle) doc["cycle"].push_back(nullptr);
    else doc["cycle"].push_back(instance.test(test).id);
  }
  doc["provenance"] = to_string(schedule.provenance);
  return doc.dump() + "\n";
}

CyclicSchedule read_schedule(const Instance& instance, const std::filesystem::path& path) {
  return parse_schedule(instance, read_text(path));
}
void write_schedule(const Instance& instance, const CyclicSchedule& schedule, const std::filesystem::path& path) {
  write_text(path, dump_schedule(instance, schedule));
}

// --- mappings and subsets ----------------------------------------------------

std::string dump_mapping(const Instance& instance, const TreeMapping& mapping) {
  json doc;
  doc["tests"] = json::array();
  for (std::size_t i = 0; i < mapping.nodes.size(); ++i) {
    const auto& node = mapping.nodes[i];
    if (node.level == kDroppedLevel) continue;
    doc["tests"].push_back({{"id", instance.test(static_cast<Index>(i)).id}, {"level", node.level}, {"offset", node.offset}});
  }
  return doc.dump(2) + "\n";
}

TreeMapping parse_mapping(const Instance& instance, const std::string& text) {
  const json doc = parse_json(text, "mapping");
  reject_unknown(doc, {"tests"}, "mapping");
  try {
    TreeMapping mapping;
    mapping.nodes.assign(static_cast<std::size_t>(instance.num_tests()), TreeNode{});
    const auto lookup = test_lookup(instance);
    for (const auto& tj : required(doc, "tests", "mapping")) {
      reject_unknown(tj, {"id", "level", "offset"}, "mapping entry");
      Index i = lookup_test(lookup, required(tj, "id", "mapping entry").get<std::string>());
      mapping.nodes[i] = {required(tj, "level", "mapping entry").get<int>(),
                          required(tj, "offset", "mapping entry").get<std::int64_t>()};
    }
    return mapping;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("mapping: ") + e.what());
  }
}

std::vector<Index> read_test_subset(const Instance& instance, const std::filesystem::path& path) {
  const json doc = parse_json(read_text(path), "test subset");
  const json* ids = &doc;
  if (doc.is_object()) {
    auto it = doc.find("test_ids");
    if (it == doc.end()) throw ValidationError("test subset: expected an array or an object with test_ids");
    ids = &*it;
  }
  if (!ids->is_array()) throw ValidationError("test subset: expected an array of test ids");
  const auto lookup = test_lookup(instance);
  std::vector<Index> out;
  std::set<Index> seen;
  try {
    for (const auto& id : *ids) {
      Index i = lookup_test(lookup, id.get<std::string>());
      if (seen.insert(i).second) out.push_back(i);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("test subset: ") + e.what());
  }
  if (out.empty()) throw ValidationError("test subset is empty");
  return out;
}

// --- reports -----------------------------------------------------------------

std::string report_csv(const Instance& instance, const ObjectiveReport& report,
                       const std::vector<DetectionStats>* monte_carlo) {
  std::ostringstream out;
  out << "kind,id,value,mt,et,mc_mean,mc_p99\n";
  for (Objective o : kAllObjectives) out << "objective," << to_string(o) << ',' << format_number(report.get(o)) << ",,,,\n";
  for (Index e = 0; e < instance.num_elements(); ++e) {
    out << "element," << instance.element_ids()[e] << ",," << format_number(report.Mt[e]) << ','
        << format_number(report.Et[e]) << ',';
    if (monte_carlo) out << format_number((*monte_carlo)[e].mean) << ',' << format_number((*monte_carlo)[e].p99);
    else out << ',';
    out << '\n';
  }
  return out.str();
}

}  // namespace probesched
