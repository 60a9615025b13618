#include "harness/report.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "harness/io.hpp"

namespace rproc {

std::string flow_csv(const BoundsCheck& check) {
  std::ostringstream out;
  out << "level,alpha,mc_moment,mc_se,bound_phase1,bound_combined,bound_log,m0,m1,"
         "mc_log,mc_log_se\n";
  for (const LevelMoments& row : check.rows) {
    const BoundReport& b = row.bounds;
    out << row.level << ',' << format_double(row.alpha) << ','
        << format_double(row.mc_moment) << ',' << format_double(row.mc_se) << ','
        << format_double(b.phase1) << ','
        << (b.combined ? format_double(*b.combined) : "") << ','
        << format_double(b.log_bound) << ','
        << (b.m0 ? std::to_string(*b.m0) : "") << ',' << b.m1 << ','
        << format_double(row.mc_log) << ',' << format_double(row.mc_log_se) << '\n';
  }
  return out.str();
}

std::string flow_json(const BoundsCheck& check, const std::string& dist,
                      unsigned r, unsigned l, std::size_t samples,
                      std::uint64_t seed) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "flow";
  doc["dist"] = dist;
  doc["r"] = r;
  doc["l"] = l;
  doc["samples"] = samples;
  doc["seed"] = seed;
  doc["se_multiplier"] = kSeMultiplier;
  doc["all_ok"] = check.all_ok;
  auto& rows = doc["rows"] = nlohmann::ordered_json::array();
  for (const LevelMoments& row : check.rows) {
    const BoundReport& b = row.bounds;
    nlohmann::ordered_json j;
    j["level"] = row.level;
    j["alpha"] = row.alpha;
    j["mc_moment"] = row.mc_moment;
    j["mc_se"] = row.mc_se;
    j["bound_phase1"] = b.phase1;
    j["bound_combined"] = b.combined ? nlohmann::ordered_json(*b.combined) : nullptr;
    j["bound_log"] = b.log_bound;
    j["m0"] = b.m0 ? nlohmann::ordered_json(*b.m0) : nullptr;
    j["m1"] = b.m1;
    j["mc_log"] = row.mc_log;
    j["mc_log_se"] = row.mc_log_se;
    j["ok"] = row.phase1_ok && row.combined_ok && row.log_ok;
    rows.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

namespace {

std::optional<double> field(const std::vector<std::string>& row,
                            const std::map<std::string, std::size_t>& col,
                            const std::string& name, bool required) {
  const auto it = col.find(name);
  if (it == col.end()) {
    if (required) fail(ErrorCode::kParse, "CSV lacks column '" + name + "'");
    return std::nullopt;
  }
  const std::string& text = row[it->second];
  if (text.empty()) {
    if (required) fail(ErrorCode::kParse, "empty value in column '" + name + "'");
    return std::nullopt;
  }
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    fail(ErrorCode::kParse, "bad number '" + text + "' in column '" + name + "'");
  }
  return v;
}

std::string cell(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

}  // namespace

Report report_from_csv(const std::string& csv) {
  Report report;
  std::ostringstream md;
  md << "| level | alpha | mc_moment | mc_se | bound_phase1 | bound_combined | "
        "mc_log | bound_log | status |\n"
     << "|---|---|---|---|---|---|---|---|---|\n";
  const CsvTable table = parse_csv(csv);
  if (table.header.empty()) {
    report.markdown = md.str();
    return report;
  }
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i) col[table.header[i]] = i;
  for (const auto& row : table.rows) {
    const auto level = field(row, col, "level", true);
    const auto alpha = field(row, col, "alpha", true);
    const auto mc = field(row, col, "mc_moment", true);
    const auto se = field(row, col, "mc_se", true);
    const auto phase1 = field(row, col, "bound_phase1", false);
    const auto combined = field(row, col, "bound_combined", false);
    const auto log_bound = field(row, col, "bound_log", false);
    const auto mc_log = field(row, col, "mc_log", false);
    const auto mc_log_se = field(row, col, "mc_log_se", false);
    std::string problems;
    const double slack = kSeMultiplier * *se;
    if (phase1 && *mc > *phase1 + slack) problems += " phase1";
    if (combined && *mc > *combined + slack) problems += " combined";
    if (log_bound && mc_log &&
        *mc_log > *log_bound + kSeMultiplier * mc_log_se.value_or(0.0)) {
      problems += " log";
    }
    ++report.rows;
    if (!problems.empty()) ++report.violations;
    md << "| " << static_cast<long>(*level) << " | " << cell(alpha) << " | "
       << cell(mc) << " | " << cell(se) << " | " << cell(phase1) << " | "
       << cell(combined) << " | " << cell(mc_log) << " | " << cell(log_bound)
       << " | " << (problems.empty() ? "ok" : "VIOLATION:" + problems) << " |\n";
  }
  report.markdown = md.str();
  return report;
}

}  // namespace rproc
