#include "harness/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace rproc {

namespace {

using nlohmann::json;

std::string vertex_id(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  fail(ErrorCode::kParse, "vertex ids must be strings or integers");
}

}  // namespace

Graph parse_graph_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid graph JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges") ||
      !doc["vertices"].is_array() || !doc["edges"].is_array()) {
    fail(ErrorCode::kParse, "graph JSON needs arrays \"vertices\" and \"edges\"");
  }
  std::vector<std::string> names;
  for (const json& v : doc["vertices"]) names.push_back(vertex_id(v));
  std::map<std::string, Index> index;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!index.emplace(names[i], static_cast<Index>(i)).second) {
      fail(ErrorCode::kParse, "duplicate vertex id '" + names[i] + "'");
    }
  }
  std::vector<Edge> edges;
  for (const json& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[2].is_number()) {
      fail(ErrorCode::kParse, "each edge must be [u, v, weight]");
    }
    const auto lookup = [&](const json& v) {
      const std::string id = vertex_id(v);
      const auto it = index.find(id);
      if (it == index.end()) fail(ErrorCode::kParse, "edge uses unknown vertex '" + id + "'");
      return it->second;
    };
    edges.push_back(Edge{lookup(e[0]), lookup(e[1]), e[2].get<double>()});
  }
  return Graph(std::move(names), std::move(edges));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Graph load_graph(const std::string& path) { return parse_graph_json(read_file(path)); }

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

std::string format_double(double x) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

namespace {

std::string edges_json(const std::vector<std::string>& names,
                       const std::vector<std::tuple<Index, Index, double>>& edges) {
  // Written by hand so weights keep round-trip precision.
  std::string out = "{\n  \"vertices\": [";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += (i ? ", " : "") + json(names[i]).dump();
  }
  out += "],\n  \"edges\": [";
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& [u, v, w] = edges[k];
    out += k ? ",\n    " : "\n    ";
    out += "[" + json(names[static_cast<std::size_t>(u)]).dump() + ", " +
           json(names[static_cast<std::size_t>(v)]).dump() + ", " + format_double(w) + "]";
  }
  out += edges.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

}  // namespace

std::string graph_to_json(const Graph& g) {
  std::vector<std::tuple<Index, Index, double>> edges;
  for (const Edge& e : g.edges()) edges.emplace_back(e.u, e.v, e.weight);
  return edges_json(g.names(), edges);
}

std::string subdivision_to_json(const SubdividedGraph& sg,
                                const std::vector<double>& edge_weights) {
  require(static_cast<Index>(edge_weights.size()) == sg.num_edges(),
          "need one weight per edge of E_r");
  std::vector<std::string> names;
  for (Index v = 0; v < sg.num_vertices(); ++v) names.push_back(sg.vertex_name(v));
  std::vector<std::tuple<Index, Index, double>> edges;
  for (Index k = 0; k < sg.num_edges(); ++k) {
    const auto [a, b] = sg.endpoints(sg.edges()[static_cast<std::size_t>(k)]);
    edges.emplace_back(sg.index_of(a), sg.index_of(b),
                       edge_weights[static_cast<std::size_t>(k)]);
  }
  return edges_json(names, edges);
}

void write_path_csv(std::ostream& out, const JumpPath& path,
                    const std::vector<std::string>& names) {
  out << "step,vertex,wait\n";
  for (std::size_t n = 0; n < path.states.size(); ++n) {
    out << n << ',' << names[static_cast<std::size_t>(path.states[n])] << ',';
    if (n < path.waits.size()) out << format_double(path.waits[n]);
    out << '\n';
  }
}

void write_states_csv(std::ostream& out, const IndexSet& states,
                      const std::vector<std::string>& names) {
  out << "step,vertex,wait\n";
  for (std::size_t n = 0; n < states.size(); ++n) {
    out << n << ',' << names[static_cast<std::size_t>(states[n])] << ",\n";
  }
}

void write_beta_csv_header(std::ostream& out, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
}

void write_beta_csv_row(std::ostream& out, const Vector& beta) {
  for (Index i = 0; i < beta.size(); ++i) out << (i ? "," : "") << format_double(beta(i));
  out << '\n';
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) {
        fail(ErrorCode::kParse, "CSV row has " + std::to_string(fields.size()) +
                                    " fields, header has " +
                                    std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

}  // namespace rproc
