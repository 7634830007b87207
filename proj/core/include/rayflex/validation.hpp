#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rayflex/datapath.hpp"
#include "rayflex/types.hpp"

namespace rayflex {

struct ValidationCase {
  int number = 0;  // 1-based within its kind
  std::string name;
  JobInput job;

  // QuadBox expectations, indexed by input slot.
  std::array<bool, kBoxesPerJob> box_hit{};
  std::vector<std::uint8_t> hit_order;  // input slots of hits, nearest first
  std::vector<float> hit_tmin;          // entry distances, nearest first; empty = unchecked

  // Triangle expectations.
  bool tri_hit = false;
  std::optional<double> tri_t;  // checked to a relative 1e-6
};

// The 9 ray-box and 11 ray-triangle functional cases.
std::vector<ValidationCase> functional_cases();

struct CaseOutcome {
  const ValidationCase* test = nullptr;
  bool golden_ok = false;
  bool pipeline_ok = false;
  bool bit_identical = false;
  std::string detail;

  bool pass() const { return golden_ok && pipeline_ok && bit_identical; }
};

// Checks a result against a case's expectations; fills why on failure.
bool meets_expectation(const ValidationCase& c, const JobOutput& out, std::string* why = nullptr);

// Runs every case through the golden model and through one pipeline stream
// built from config. config.culling selects the mutant for mutation testing.
std::vector<CaseOutcome> run_validation(const std::vector<ValidationCase>& cases, const DatapathConfig& config,
                                        std::ostream* trace = nullptr);

// One PASS/FAIL line per case and a summary; returns true if all passed.
bool print_validation(std::ostream& os, const std::vector<CaseOutcome>& outcomes);

}  // namespace rayflex
