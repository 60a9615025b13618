#pragma once

// Flow moment tables: CSV output of verify_bounds and the markdown report.

#include <string>

#include "core/renorm_flow.hpp"

namespace rproc {

// Columns: level, alpha, mc_moment, mc_se, bound_phase1, bound_combined,
// bound_log, m0, m1, mc_log, mc_log_se. Missing values are empty fields.
std::string flow_csv(const BoundsCheck& check);
std::string flow_json(const BoundsCheck& check, const std::string& dist,
                      unsigned r, unsigned l, std::size_t samples,
                      std::uint64_t seed);

struct Report {
  std::string markdown;
  std::size_t rows = 0;
  std::size_t violations = 0;
};

// A row violates when an MC moment exceeds a bound by more than 4 standard
// errors. Throws kParse on malformed input; empty input gives an empty table.
Report report_from_csv(const std::string& csv);

}  // namespace rproc
