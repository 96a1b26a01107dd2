#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "probesched/evaluator.hpp"
#include "probesched/instance.hpp"
#include "probesched/schedule.hpp"
#include "probesched/tree_sched.hpp"

namespace probesched {

/// %.<digits>g, with "inf"/"-inf"/"nan" spelled out.
std::string format_number(double value, int digits = 12);

// Instance files:
//   {"weight_mode": "sum"|"max",
//    "elements": [{"id": str, "weight": num}],
//    "tests": [{"id": str, "elements": [str], "detect_prob": {str: num}}]}
// detect_prob is optional; unknown fields are rejected. Weights are rescaled
// to the declared mode unless they already satisfy it within 1e-12.
Instance parse_instance(const std::string& text);
std::string dump_instance(const Instance& instance);
Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& instance, const std::filesystem::path& path);

// Frequencies files: {"test_ids": [str], "q": [num]} with 12 significant digits.
// On read, ids are matched to the instance; tests not listed get q = 0.
Eigen::VectorXd parse_frequencies(const Instance& instance, const std::string& text);
std::string dump_frequencies(const Instance& instance, const Eigen::VectorXd& q);
Eigen::VectorXd read_frequencies(const Instance& instance, const std::filesystem::path& path);
void write_frequencies(const Instance& instance, const Eigen::VectorXd& q, const std::filesystem::path& path);

// Schedule files: {"cycle": [test id | null for idle], "provenance": str}
CyclicSchedule parse_schedule(const Instance& instance, const std::string& text);
std::string dump_schedule(const Instance& instance, const CyclicSchedule& schedule);
CyclicSchedule read_schedule(const Instance& instance, const std::filesystem::path& path);
void write_schedule(const Instance& instance, const CyclicSchedule& schedule, const std::filesystem::path& path);

// Mapping files (debug): {"tests": [{"id": str, "level": int, "offset": int}]}
std::string dump_mapping(const Instance& instance, const TreeMapping& mapping);
TreeMapping parse_mapping(const Instance& instance, const std::string& text);

/// Test subset: a JSON array of test ids, or an object with "test_ids".
std::vector<Index> read_test_subset(const Instance& instance, const std::filesystem::path& path);

// Report CSV, header kind,id,value,mt,et,mc_mean,mc_p99: one "objective" row
// per objective, then one "element" row per element.
std::string report_csv(const Instance& instance, const ObjectiveReport& report,
                       const std::vector<DetectionStats>* monte_carlo = nullptr);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace probesched
