#pragma once

// Verification suites behind the command line tool and the acceptance
// binary.  Each suite produces a CSV table, a JSON document and a list of
// named checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace crlab {

struct SuiteConfig {
  int n = 0;  // 0: the suite's own default
  std::vector<double> betas;
  std::vector<double> lambdas;
  std::optional<double> A;
  double R = 4;
  std::optional<double> tol;  // replaces the main tolerance of the suite
  std::uint64_t seed = 0xC0FFEE;
  int workers = 1;
  int max_n = 8;
  std::string model = "conformal";
};

struct Check {
  std::string id;
  bool pass = false;
  std::string detail;
  bool known = false;  // a failure recorded as a defect of the stated result
};

struct SuiteResult {
  std::string name;
  std::string csv;
  nlohmann::json data;
  std::vector<Check> checks;
  double seconds = 0;

  bool passed() const;
  // failures not marked as known
  bool unexpected() const;
};

const std::vector<std::string>& suite_names();
// throws std::invalid_argument for an unknown name
SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg);

nlohmann::json to_json(const SuiteConfig& cfg);
nlohmann::json to_json(const SuiteResult& r);
// suite,check,pass,known,detail
std::string summary_csv(const std::vector<SuiteResult>& results);

}  // namespace crlab
