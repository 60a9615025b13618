#pragma once

// Named verification batteries. Each returns a JSON report (schema_version 1)
// listing every check with its statistic and precomputed threshold.

#include <cstdint>
#include <string>
#include <vector>

#include "harness/stats.hpp"

namespace rproc {

const std::vector<std::string>& verify_suites();
bool is_verify_suite(const std::string& name);

struct SuiteResult {
  std::string suite;
  bool pass = false;
  std::vector<TestVerdict> checks;
};

// `scale` multiplies the default Monte Carlo sample sizes.
SuiteResult run_verify_suite(const std::string& name, std::uint64_t seed,
                             double scale = 1.0);
std::string suite_json(const SuiteResult& result, std::uint64_t seed);

}  // namespace rproc
