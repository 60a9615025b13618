#include "rproc/rproc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core/beta_sampler.hpp"
#include "core/error.hpp"
#include "core/inv_gauss.hpp"
#include "core/reinforced.hpp"
#include "core/renorm_flow.hpp"
#include "harness/io.hpp"
#include "harness/report.hpp"
#include "harness/verify.hpp"

struct rproc_graph {
  rproc::Graph graph;
};

namespace {

using rproc::ErrorCode;
using rproc::Index;
using json = nlohmann::ordered_json;

thread_local std::string last_error;

rproc_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return RPROC_INVALID_ARGUMENT;
    case ErrorCode::kNotPositiveDefinite: return RPROC_NOT_POSITIVE_DEFINITE;
    case ErrorCode::kNumerical: return RPROC_NUMERICAL;
    case ErrorCode::kIo: return RPROC_IO;
    case ErrorCode::kParse: return RPROC_PARSE;
    case ErrorCode::kOutOfRange: return RPROC_OUT_OF_RANGE;
  }
  return RPROC_INTERNAL;
}

template <class F>
rproc_status guarded(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const rproc::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return RPROC_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  rproc::require(p != nullptr, std::string(what) + " must not be NULL");
}

Index vertex_named(const rproc::Graph& g, const char* name) {
  if (name == nullptr || *name == '\0') return 0;
  return g.index_of(name);
}

rproc::IndexSet parse_subset(const rproc::Graph& g, const std::string& list) {
  rproc::IndexSet out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const std::string item = list.substr(start, comma - start);
    if (!item.empty()) out.push_back(g.index_of(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  rproc::require(!out.empty(), "subset must list at least one vertex");
  return out;
}

json matrix_json(const rproc::Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string path_output(const rproc::JumpPath& path,
                        const std::vector<std::string>& names, rproc_format format,
                        json header) {
  if (format == RPROC_FORMAT_JSON) {
    json states = json::array();
    for (Index v : path.states) states.push_back(names[static_cast<std::size_t>(v)]);
    header["states"] = std::move(states);
    header["waits"] = path.waits;
    return dump(header);
  }
  std::ostringstream out;
  rproc::write_path_csv(out, path, names);
  return out.str();
}

void check_format(rproc_format f) {
  rproc::require(f == RPROC_FORMAT_CSV || f == RPROC_FORMAT_JSON, "unknown output format");
}

}  // namespace

extern "C" {

const char* rproc_version(void) { return "1.0.0"; }

const char* rproc_status_name(rproc_status status) {
  switch (status) {
    case RPROC_OK: return "ok";
    case RPROC_INVALID_ARGUMENT: return "invalid argument";
    case RPROC_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case RPROC_NUMERICAL: return "numerical failure";
    case RPROC_IO: return "i/o error";
    case RPROC_PARSE: return "parse error";
    case RPROC_OUT_OF_RANGE: return "out of range";
    case RPROC_CHECK_FAILED: return "check failed";
    case RPROC_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rproc_last_error(void) { return last_error.c_str(); }

void rproc_string_free(char* s) { std::free(s); }

rproc_status rproc_graph_parse(const char* text, rproc_graph** out) {
  return guarded([&] {
    need(text, "json");
    need(out, "out");
    *out = new rproc_graph{rproc::parse_graph_json(text)};
    return RPROC_OK;
  });
}

rproc_status rproc_graph_load(const char* path, rproc_graph** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new rproc_graph{rproc::load_graph(path)};
    return RPROC_OK;
  });
}

void rproc_graph_free(rproc_graph* graph) { delete graph; }

size_t rproc_graph_num_vertices(const rproc_graph* graph) {
  return graph ? static_cast<size_t>(graph->graph.num_vertices()) : 0;
}

size_t rproc_graph_num_edges(const rproc_graph* graph) {
  return graph ? static_cast<size_t>(graph->graph.num_edges()) : 0;
}

size_t rproc_graph_max_degree(const rproc_graph* graph) {
  return graph ? static_cast<size_t>(graph->graph.max_degree()) : 0;
}

rproc_status rproc_graph_to_json(const rproc_graph* graph, char** out) {
  return guarded([&] {
    need(graph, "graph");
    need(out, "out");
    *out = dup_string(rproc::graph_to_json(graph->graph));
    return RPROC_OK;
  });
}

rproc_status rproc_subdivide(const rproc_graph* graph, unsigned r, char** out_json) {
  return guarded([&] {
    need(graph, "graph");
    need(out_json, "out");
    const rproc::SubdividedGraph sub(graph->graph, r);
    *out_json = dup_string(rproc::subdivision_to_json(sub, sub.inherited_weights()));
    return RPROC_OK;
  });
}

void rproc_beta_options_init(rproc_beta_options* options) {
  if (!options) return;
  options->seed = 0;
  options->samples = 1;
  options->format = RPROC_FORMAT_CSV;
}

rproc_status rproc_sample_beta(const rproc_graph* graph,
                               const rproc_beta_options* options, char** out) {
  return guarded([&] {
    need(graph, "graph");
    need(options, "options");
    need(out, "out");
    check_format(options->format);
    const rproc::WeightMatrix w = graph->graph.weight_matrix();
    rproc::Rng rng = rproc::make_stream(options->seed, 0);
    const auto& names = graph->graph.names();
    if (options->format == RPROC_FORMAT_JSON) {
      json doc;
      doc["schema_version"] = 1;
      doc["seed"] = options->seed;
      doc["vertices"] = names;
      json rows = json::array();
      for (size_t s = 0; s < options->samples; ++s) {
        const rproc::Vector beta = rproc::sample_beta(w, rng).beta;
        rows.push_back(std::vector<double>(beta.data(), beta.data() + beta.size()));
      }
      doc["samples"] = std::move(rows);
      *out = dup_string(dump(doc));
    } else {
      std::ostringstream text;
      rproc::write_beta_csv_header(text, names);
      for (size_t s = 0; s < options->samples; ++s) {
        rproc::write_beta_csv_row(text, rproc::sample_beta(w, rng).beta);
      }
      *out = dup_string(text.str());
    }
    return RPROC_OK;
  });
}

void rproc_simulate_options_init(rproc_simulate_options* options) {
  if (!options) return;
  options->model = RPROC_MODEL_VRJP;
  options->route = RPROC_VRJP_DIRECT;
  options->exchangeable_time = 0;
  options->start = nullptr;
  options->steps = 100;
  options->seed = 0;
  options->format = RPROC_FORMAT_CSV;
}

rproc_status rproc_simulate(const rproc_graph* graph,
                            const rproc_simulate_options* options, char** out) {
  return guarded([&] {
    need(graph, "graph");
    need(options, "options");
    need(out, "out");
    check_format(options->format);
    const rproc::Graph& g = graph->graph;
    const Index start = vertex_named(g, options->start);
    rproc::Rng rng = rproc::make_stream(options->seed, 0);
    json header;
    header["schema_version"] = 1;
    header["seed"] = options->seed;
    header["steps"] = options->steps;
    header["start"] = g.names()[static_cast<std::size_t>(start)];
    rproc::JumpPath path;
    switch (options->model) {
      case RPROC_MODEL_VRJP: {
        header["model"] = "vrjp";
        const rproc::WeightMatrix w = g.weight_matrix();
        if (options->route == RPROC_VRJP_MIXTURE) {
          header["route"] = "mixture";
          header["time_scale"] = "exchangeable";
          path = rproc::simulate_vrjp_mixture(w, start, options->steps, rng);
        } else {
          rproc::require(options->route == RPROC_VRJP_DIRECT, "unknown VRJP route");
          header["route"] = "direct";
          path = rproc::simulate_vrjp_direct(w, start, options->steps, rng);
          if (options->exchangeable_time) path = rproc::time_change(path, w.size());
          header["time_scale"] = options->exchangeable_time ? "exchangeable" : "original";
        }
        break;
      }
      case RPROC_MODEL_ERRW:
        header["model"] = "errw";
        path.states = rproc::simulate_errw(g, start, options->steps, rng);
        break;
      case RPROC_MODEL_MJP: {
        header["model"] = "mjp";
        const rproc::WeightMatrix w = g.weight_matrix();
        const rproc::MjpParams params(w, rproc::Vector::Ones(w.size()));
        path = rproc::simulate_mjp(params, start, options->steps, rng);
        break;
      }
      default:
        rproc::fail(ErrorCode::kInvalidArgument, "unknown model");
    }
    *out = dup_string(path_output(path, g.names(), options->format, std::move(header)));
    return RPROC_OK;
  });
}

rproc_status rproc_restrict_path(const rproc_graph* graph, const char* path_csv,
                                 const char* subset, rproc_format format,
                                 char** out) {
  return guarded([&] {
    need(graph, "graph");
    need(path_csv, "path_csv");
    need(subset, "subset");
    need(out, "out");
    check_format(format);
    const rproc::Graph& g = graph->graph;
    const rproc::CsvTable table = rproc::parse_csv(path_csv);
    rproc::require(table.header == std::vector<std::string>{"step", "vertex", "wait"},
                   "path CSV must have columns step,vertex,wait", ErrorCode::kParse);
    rproc::JumpPath path;
    bool waits_open = true;
    for (const auto& row : table.rows) {
      path.states.push_back(g.index_of(row[1]));
      if (row[2].empty()) {
        waits_open = false;
        continue;
      }
      rproc::require(waits_open, "a wait follows a row without one", ErrorCode::kParse);
      char* end = nullptr;
      const double t = std::strtod(row[2].c_str(), &end);
      rproc::require(end == row[2].c_str() + row[2].size() && t >= 0.0,
                     "bad wait '" + row[2] + "'", ErrorCode::kParse);
      path.waits.push_back(t);
    }
    const rproc::IndexSet j = parse_subset(g, subset);
    const rproc::JumpPath restricted =
        rproc::remove_self_loops(rproc::restrict_path(path, j));
    json header;
    header["schema_version"] = 1;
    header["subset"] = subset;
    *out = dup_string(path_output(restricted, g.names(), format, std::move(header)));
    return RPROC_OK;
  });
}

rproc_status rproc_restrict_weights(const rproc_graph* graph, const char* subset,
                                    const char* rho, size_t samples, uint64_t seed,
                                    char** out_json) {
  return guarded([&] {
    need(graph, "graph");
    need(subset, "subset");
    need(out_json, "out");
    const rproc::Graph& g = graph->graph;
    const rproc::IndexSet j = rproc::sorted_unique(parse_subset(g, subset), g.num_vertices());
    const Index pin = (rho && *rho) ? g.index_of(rho) : j.front();
    const rproc::WeightMatrix w = g.weight_matrix();
    const rproc::WiredWeights wired = rproc::wire_weights(w, j, pin);
    const rproc::IndexSet interior = rproc::complement(w.size(), j);
    const auto n_i = static_cast<Index>(interior.size());
    const auto names_of = [&g](const rproc::IndexSet& set) {
      std::vector<std::string> out;
      for (Index v : set) out.push_back(g.names()[static_cast<std::size_t>(v)]);
      return out;
    };
    json doc;
    doc["schema_version"] = 1;
    doc["seed"] = seed;
    doc["subset"] = names_of(j);
    doc["rho"] = g.names()[static_cast<std::size_t>(pin)];
    doc["interior"] = names_of(interior);
    doc["wired_vertices"] = names_of(wired.vertices);
    doc["wired_weights"] = matrix_json(wired.weights.matrix());
    rproc::Rng rng = rproc::make_stream(seed, 0);
    json draws = json::array();
    for (size_t s = 0; s < samples; ++s) {
      rproc::Vector beta_i(n_i);
      if (n_i > 0) beta_i = rproc::sample_beta(wired.weights, rng).beta.head(n_i);
      const rproc::WeightMatrix wj = rproc::effective_weights(w, beta_i, j);
      json item;
      item["beta_interior"] = std::vector<double>(beta_i.data(), beta_i.data() + n_i);
      item["effective_weights"] = matrix_json(wj.matrix());
      draws.push_back(std::move(item));
    }
    doc["samples"] = std::move(draws);
    *out_json = dup_string(dump(doc));
    return RPROC_OK;
  });
}

void rproc_flow_options_init(rproc_flow_options* options) {
  if (!options) return;
  options->r = 4;
  options->l = 0;
  options->alphas = nullptr;
  options->num_alphas = 0;
  options->dist = "gamma:a=1";
  options->samples = 10000;
  options->seed = 0;
  options->format = RPROC_FORMAT_CSV;
}

rproc_status rproc_flow(const rproc_flow_options* options, char** out) {
  return guarded([&] {
    need(options, "options");
    need(out, "out");
    check_format(options->format);
    rproc::require(options->num_alphas > 0 && options->alphas != nullptr,
                   "at least one alpha is required");
    const std::vector<double> alphas(options->alphas, options->alphas + options->num_alphas);
    const rproc::WeightDistribution dist =
        rproc::WeightDistribution::parse(options->dist ? options->dist : "");
    const rproc::BoundsCheck check = rproc::verify_bounds(
        options->r, options->l, alphas, dist, options->samples, options->seed);
    *out = dup_string(options->format == RPROC_FORMAT_JSON
                          ? rproc::flow_json(check, dist.describe(), options->r,
                                             options->l, options->samples, options->seed)
                          : rproc::flow_csv(check));
    if (!check.all_ok) {
      last_error = "a Monte Carlo moment exceeds its bound by more than 4 SE";
      return RPROC_CHECK_FAILED;
    }
    return RPROC_OK;
  });
}

void rproc_bounds_options_init(rproc_bounds_options* options) {
  if (!options) return;
  options->alpha = 0.25;
  options->moment = 1.0;
  options->mean_log = 0.0;
  options->r = 1;
  options->l = 0;
  options->c3 = 0.0;
  options->max_degree = 1;
  options->format = RPROC_FORMAT_JSON;
}

rproc_status rproc_bounds(const rproc_bounds_options* options, char** out) {
  return guarded([&] {
    need(options, "options");
    need(out, "out");
    check_format(options->format);
    const rproc::BoundReport b = rproc::moment_bound(options->alpha, options->moment,
                                                     options->mean_log, options->r,
                                                     options->l);
    std::optional<rproc::RecurrenceCheck> rec;
    if (options->c3 > 0.0) {
      rec = rproc::recurrence_threshold(options->max_degree, options->alpha, options->c3,
                                        options->moment, options->r, options->l);
    }
    if (options->format == RPROC_FORMAT_JSON) {
      json doc;
      doc["schema_version"] = 1;
      doc["alpha"] = b.alpha;
      doc["r"] = b.r;
      doc["l"] = b.l;
      doc["moment"] = b.moment;
      doc["mean_log"] = b.mean_log;
      doc["bound_phase1"] = b.phase1;
      doc["bound_combined"] = b.combined ? json(*b.combined) : json(nullptr);
      doc["bound_log"] = b.log_bound;
      doc["combined_log_terms"] = b.combined_log_terms;
      doc["log_terms"] = b.log_terms;
      doc["m0"] = b.m0 ? json(*b.m0) : json(nullptr);
      doc["m1"] = b.m1;
      doc["argmin_combined"] = b.combined ? json(b.argmin_combined) : json(nullptr);
      doc["argmin_log"] = b.argmin_log;
      if (rec) {
        doc["recurrence"] = {{"c3", options->c3},
                             {"max_degree", options->max_degree},
                             {"holds", rec->holds},
                             {"required_gap", rec->required_gap}};
      } else {
        doc["recurrence"] = nullptr;
      }
      *out = dup_string(dump(doc));
    } else {
      std::ostringstream text;
      text << "alpha,r,l,moment,mean_log,bound_phase1,bound_combined,bound_log,m0,m1,"
              "recurrence_holds,required_gap\n";
      text << rproc::format_double(b.alpha) << ',' << b.r << ',' << b.l << ','
           << rproc::format_double(b.moment) << ',' << rproc::format_double(b.mean_log)
           << ',' << rproc::format_double(b.phase1) << ','
           << (b.combined ? rproc::format_double(*b.combined) : "") << ','
           << rproc::format_double(b.log_bound) << ','
           << (b.m0 ? std::to_string(*b.m0) : "") << ',' << b.m1 << ','
           << (rec ? (rec->holds ? "true" : "false") : "") << ','
           << (rec ? std::to_string(rec->required_gap) : "") << '\n';
      *out = dup_string(text.str());
    }
    return RPROC_OK;
  });
}

rproc_status rproc_verify(const char* suite, uint64_t seed, double scale,
                          char** out_json) {
  return guarded([&] {
    need(suite, "suite");
    need(out_json, "out");
    if (!rproc::is_verify_suite(suite)) {
      std::string known;
      for (const auto& s : rproc::verify_suites()) known += (known.empty() ? "" : ", ") + s;
      rproc::fail(ErrorCode::kInvalidArgument,
                  std::string("unknown suite '") + suite + "' (known: " + known + ")");
    }
    const rproc::SuiteResult result = rproc::run_verify_suite(suite, seed, scale);
    *out_json = dup_string(rproc::suite_json(result, seed));
    if (!result.pass) {
      last_error = std::string("suite '") + suite + "' has failing checks";
      return RPROC_CHECK_FAILED;
    }
    return RPROC_OK;
  });
}

rproc_status rproc_report(const char* flow_csv, char** out_markdown,
                          size_t* violations) {
  return guarded([&] {
    need(flow_csv, "flow_csv");
    need(out_markdown, "out");
    const rproc::Report report = rproc::report_from_csv(flow_csv);
    *out_markdown = dup_string(report.markdown);
    if (violations) *violations = report.violations;
    if (report.violations > 0) {
      last_error = std::to_string(report.violations) + " row(s) violate a bound";
      return RPROC_CHECK_FAILED;
    }
    return RPROC_OK;
  });
}

double rproc_c_alpha(double alpha) {
  try {
    return rproc::c_alpha(alpha);
  } catch (const std::exception& e) {
    last_error = e.what();
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double rproc_frac_moment(double w, double alpha) {
  try {
    return rproc::frac_moment(w, alpha);
  } catch (const std::exception& e) {
    last_error = e.what();
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double rproc_log_moment(double w) {
  try {
    return rproc::log_moment(w);
  } catch (const std::exception& e) {
    last_error = e.what();
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double rproc_exp_integral_e1(double x) {
  try {
    return rproc::exp_integral_e1(x);
  } catch (const std::exception& e) {
    last_error = e.what();
    return std::numeric_limits<double>::quiet_NaN();
  }
}

rproc_status rproc_effective_weights(const double* w, size_t n, const double* beta_i,
                                     const size_t* j, size_t nj, double* out) {
  return guarded([&] {
    need(w, "w");
    need(out, "out");
    rproc::require(nj == 0 || j != nullptr, "j must not be NULL");
    rproc::require(nj >= n || beta_i != nullptr, "beta_i must not be NULL");
    const auto size = static_cast<Index>(n);
    rproc::Matrix m(size, size);
    for (Index a = 0; a < size; ++a) {
      for (Index b = 0; b < size; ++b) m(a, b) = w[a * size + b];
    }
    rproc::IndexSet subset;
    for (size_t k = 0; k < nj; ++k) subset.push_back(static_cast<Index>(j[k]));
    const auto n_i = static_cast<Index>(n > nj ? n - nj : 0);
    rproc::Vector beta(n_i);
    for (Index k = 0; k < n_i; ++k) beta(k) = beta_i[k];
    const rproc::WeightMatrix result =
        rproc::effective_weights(rproc::WeightMatrix(std::move(m)), beta, subset);
    const auto k = static_cast<Index>(nj);
    for (Index a = 0; a < k; ++a) {
      for (Index b = 0; b < k; ++b) out[a * k + b] = result(a, b);
    }
    return RPROC_OK;
  });
}

}  // extern "C"
