// rproc command-line front end. Talks to the library only through rproc.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rproc/rproc.h"

namespace {

using json = nlohmann::json;

// Exit codes: 0 ok, 1 a check or bound failed, 2 usage error, 3 input or
// output error, 4 numerical or internal failure.
int exit_code(rproc_status s) {
  switch (s) {
    case RPROC_OK: return 0;
    case RPROC_CHECK_FAILED: return 1;
    case RPROC_INVALID_ARGUMENT:
    case RPROC_OUT_OF_RANGE: return 2;
    case RPROC_IO:
    case RPROC_PARSE: return 3;
    default: return 4;
  }
}

struct Owned {
  char* p = nullptr;
  ~Owned() { rproc_string_free(p); }
};

struct GraphHandle {
  rproc_graph* g = nullptr;
  ~GraphHandle() { rproc_graph_free(g); }
};

class CliFailure : public std::runtime_error {
 public:
  CliFailure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void report_status(rproc_status s) {
  if (s != RPROC_OK) {
    std::cerr << "rproc: " << rproc_status_name(s);
    const std::string detail = rproc_last_error();
    if (!detail.empty()) std::cerr << ": " << detail;
    std::cerr << '\n';
  }
}

void check(rproc_status s) {
  if (s != RPROC_OK) {
    report_status(s);
    throw CliFailure(exit_code(s), "");
  }
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFailure(3, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw CliFailure(3, "cannot write '" + out + "'");
  file << text;
  if (!file) throw CliFailure(3, "write to '" + out + "' failed");
}

rproc_format parse_format(const std::string& f) {
  return f == "json" ? RPROC_FORMAT_JSON : RPROC_FORMAT_CSV;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw CliFailure(2, "bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

GraphHandle load_graph(const std::string& path) {
  GraphHandle h;
  if (path == "-") {
    check(rproc_graph_parse(read_text(path).c_str(), &h.g));
  } else {
    check(rproc_graph_load(path.c_str(), &h.g));
  }
  return h;
}

// Options every subcommand carries.
struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  std::string config;
};

void add_common(CLI::App* cmd, Common& c, bool seed_required, const char* default_format) {
  c.format = default_format;
  auto* seed = cmd->add_option("--seed", c.seed, "Random seed");
  if (seed_required) {
    seed->required();
  } else {
    seed->description("Random seed (accepted; this command is deterministic)");
  }
  cmd->add_option("--out", c.out, "Output file; '-' or absent for stdout");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--config", c.config,
                  "JSON file of option values; explicit flags override it");
}

// Turns {"r": 4, "alpha": [0.1, 0.25], "weights": true} into
// --r 4 --alpha 0.1,0.25 --weights.
std::vector<std::string> config_args(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw CliFailure(3, "config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw CliFailure(2, "config '" + path + "' must be a JSON object");
  std::vector<std::string> args;
  const auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number()) return v.dump();
    throw CliFailure(2, "unsupported config value " + v.dump());
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "subcommand" || key == "config") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) joined += (joined.empty() ? "" : ",") + scalar(item);
      args.push_back(joined);
    } else {
      args.push_back(scalar(value));
    }
  }
  return args;
}

// Config values go right after the subcommand so that later flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  const std::vector<std::string> extra = config_args(path);
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

std::string subdivision_csv(const std::string& text) {
  const json doc = json::parse(text);
  std::ostringstream out;
  out << "u,v,weight\n";
  for (const auto& e : doc.at("edges")) {
    out << e.at(0).get<std::string>() << ',' << e.at(1).get<std::string>() << ','
        << e.at(2).dump() << '\n';
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforced jump processes: restriction, mixtures and the weight flow"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(rproc_version()));

  // subdivide
  Common sub_c;
  std::string sub_graph;
  unsigned sub_r = 1;
  auto* sub = app.add_subcommand("subdivide", "Write the 2^r subdivision of a graph");
  sub->add_option("--graph", sub_graph, "Graph JSON ('-' for stdin)")->required();
  sub->add_option("--r", sub_r, "Subdivision level")->capture_default_str();
  add_common(sub, sub_c, false, "json");

  // sample-beta
  Common beta_c;
  std::string beta_graph;
  std::size_t beta_samples = 1;
  auto* beta = app.add_subcommand("sample-beta", "Draw beta fields from nu^W");
  beta->add_option("--graph", beta_graph, "Graph JSON ('-' for stdin)")->required();
  beta->add_option("--samples", beta_samples, "Number of draws")->capture_default_str();
  add_common(beta, beta_c, true, "csv");

  // simulate
  Common sim_c;
  std::string sim_graph, sim_model = "vrjp", sim_route = "direct", sim_start;
  std::size_t sim_steps = 100;
  bool sim_exchangeable = false;
  auto* sim = app.add_subcommand("simulate", "Simulate a VRJP, ERRW or Markov jump path");
  sim->add_option("--graph", sim_graph, "Graph JSON ('-' for stdin)")->required();
  sim->add_option("--model", sim_model, "Process")
      ->check(CLI::IsMember({"vrjp", "errw", "mjp"}))
      ->capture_default_str();
  sim->add_option("--route", sim_route, "VRJP sampler: direct or beta mixture")
      ->check(CLI::IsMember({"direct", "mixture"}))
      ->capture_default_str();
  sim->add_flag("--exchangeable-time", sim_exchangeable,
                "Direct VRJP: report waits in the exchangeable time scale");
  sim->add_option("--start", sim_start, "Start vertex id (default: first vertex)");
  sim->add_option("--steps", sim_steps, "Number of jumps")->capture_default_str();
  add_common(sim, sim_c, true, "csv");

  // restrict
  Common res_c;
  std::string res_graph, res_subset, res_path, res_rho;
  bool res_weights = false;
  std::size_t res_samples = 1;
  auto* res = app.add_subcommand(
      "restrict", "Restrict a path to a subset, or sample the restricted weights");
  res->add_option("--graph", res_graph, "Graph JSON ('-' for stdin)")->required();
  res->add_option("--subset", res_subset, "Comma-separated vertex ids of J")->required();
  res->add_option("--path", res_path, "Path CSV (step,vertex,wait) to restrict");
  res->add_flag("--weights", res_weights,
                "Sample beta on the complement and print the weights on J");
  res->add_option("--rho", res_rho, "Pinned vertex in J (default: first of J)");
  res->add_option("--samples", res_samples, "Draws in --weights mode")
      ->capture_default_str();
  add_common(res, res_c, true, "csv");

  // flow
  Common flow_c;
  std::string flow_graph, flow_alpha = "0.25", flow_dist = "gamma:a=1";
  unsigned flow_r = 4, flow_l = 0;
  std::size_t flow_samples = 10000;
  auto* flow = app.add_subcommand(
      "flow", "Monte Carlo moments of the weight flow against their bounds");
  flow->add_option("--graph", flow_graph,
                   "Base graph JSON; validated only, moments are per base edge");
  flow->add_option("--r", flow_r, "Starting level")->capture_default_str();
  flow->add_option("--l", flow_l, "Final level")->capture_default_str();
  flow->add_option("--alpha", flow_alpha, "Comma-separated alphas")->capture_default_str();
  flow->add_option("--dist", flow_dist, "gamma:a=<shape> or const:w=<value>")
      ->capture_default_str();
  flow->add_option("--samples", flow_samples, "Flow realizations")->capture_default_str();
  add_common(flow, flow_c, true, "csv");

  // bounds
  Common bnd_c;
  rproc_bounds_options bnd;
  rproc_bounds_options_init(&bnd);
  auto* bounds = app.add_subcommand("bounds", "Evaluate the moment bounds and minimizers");
  bounds->add_option("--alpha", bnd.alpha, "Moment exponent")->capture_default_str();
  bounds->add_option("--moment", bnd.moment, "E[W^alpha] at level r")->required();
  bounds->add_option("--mean-log", bnd.mean_log, "E[log W] at level r")->required();
  bounds->add_option("--r", bnd.r, "Starting level")->required();
  bounds->add_option("--l", bnd.l, "Final level")->capture_default_str();
  bounds->add_option("--c3", bnd.c3,
                     "Recurrence constant; enables the recurrence check (no default)");
  bounds->add_option("--max-degree", bnd.max_degree, "Maximal degree d")
      ->capture_default_str();
  add_common(bounds, bnd_c, false, "json");

  // verify
  Common ver_c;
  std::string ver_suite;
  double ver_scale = 1.0;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite,--suite", ver_suite,
                     "restriction-mjp, mixture-vrjp, errw-gamma, flow-oracle, "
                     "ig-appendix or bounds")
      ->required();
  verify->add_option("--scale", ver_scale, "Multiplier on Monte Carlo sample sizes")
      ->capture_default_str();
  add_common(verify, ver_c, true, "json");

  // report
  Common rep_c;
  std::string rep_input;
  auto* report = app.add_subcommand("report", "Markdown table of a flow CSV");
  report->add_option("input,--input", rep_input, "Flow CSV ('-' for stdin)")->required();
  add_common(report, rep_c, false, "csv");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }

    if (*sub) {
      GraphHandle g = load_graph(sub_graph);
      Owned text;
      check(rproc_subdivide(g.g, sub_r, &text.p));
      emit(sub_c.format == "json" ? std::string(text.p) : subdivision_csv(text.p), sub_c.out);
    } else if (*beta) {
      GraphHandle g = load_graph(beta_graph);
      rproc_beta_options o;
      rproc_beta_options_init(&o);
      o.seed = beta_c.seed;
      o.samples = beta_samples;
      o.format = parse_format(beta_c.format);
      Owned text;
      check(rproc_sample_beta(g.g, &o, &text.p));
      emit(text.p, beta_c.out);
    } else if (*sim) {
      GraphHandle g = load_graph(sim_graph);
      rproc_simulate_options o;
      rproc_simulate_options_init(&o);
      o.model = sim_model == "errw" ? RPROC_MODEL_ERRW
                : sim_model == "mjp" ? RPROC_MODEL_MJP
                                     : RPROC_MODEL_VRJP;
      o.route = sim_route == "mixture" ? RPROC_VRJP_MIXTURE : RPROC_VRJP_DIRECT;
      o.exchangeable_time = sim_exchangeable ? 1 : 0;
      o.start = sim_start.empty() ? nullptr : sim_start.c_str();
      o.steps = sim_steps;
      o.seed = sim_c.seed;
      o.format = parse_format(sim_c.format);
      Owned text;
      check(rproc_simulate(g.g, &o, &text.p));
      emit(text.p, sim_c.out);
    } else if (*res) {
      GraphHandle g = load_graph(res_graph);
      Owned text;
      if (res_weights == !res_path.empty()) {
        throw CliFailure(2, "restrict needs exactly one of --path and --weights");
      }
      if (res_weights) {
        check(rproc_restrict_weights(g.g, res_subset.c_str(),
                                     res_rho.empty() ? nullptr : res_rho.c_str(),
                                     res_samples, res_c.seed, &text.p));
      } else {
        const std::string csv = read_text(res_path);
        check(rproc_restrict_path(g.g, csv.c_str(), res_subset.c_str(),
                                  parse_format(res_c.format), &text.p));
      }
      emit(text.p, res_c.out);
    } else if (*flow) {
      if (!flow_graph.empty()) load_graph(flow_graph);
      const std::vector<double> alphas = parse_list(flow_alpha);
      rproc_flow_options o;
      rproc_flow_options_init(&o);
      o.r = flow_r;
      o.l = flow_l;
      o.alphas = alphas.data();
      o.num_alphas = alphas.size();
      o.dist = flow_dist.c_str();
      o.samples = flow_samples;
      o.seed = flow_c.seed;
      o.format = parse_format(flow_c.format);
      Owned text;
      const rproc_status s = rproc_flow(&o, &text.p);
      if (text.p) emit(text.p, flow_c.out);
      check(s);
    } else if (*bounds) {
      bnd.format = parse_format(bnd_c.format);
      Owned text;
      check(rproc_bounds(&bnd, &text.p));
      emit(text.p, bnd_c.out);
    } else if (*verify) {
      Owned text;
      const rproc_status s = rproc_verify(ver_suite.c_str(), ver_c.seed, ver_scale, &text.p);
      if (text.p) emit(text.p, ver_c.out);
      check(s);
    } else if (*report) {
      const std::string csv = read_text(rep_input);
      Owned text;
      std::size_t violations = 0;
      const rproc_status s = rproc_report(csv.c_str(), &text.p, &violations);
      if (text.p) {
        std::string body = text.p;
        if (rep_c.format == "json") {
          json doc;
          doc["schema_version"] = 1;
          doc["violations"] = violations;
          doc["markdown"] = body;
          body = doc.dump(2) + "\n";
        }
        emit(body, rep_c.out);
      }
      check(s);
    }
  } catch (const CliFailure& e) {
    if (*e.what()) std::cerr << "rproc: " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "rproc: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
