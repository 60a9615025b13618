#pragma once

// Graph JSON and CSV serialization.

#include <iosfwd>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/jump_process.hpp"

namespace rproc {

// {"vertices": [...], "edges": [[u, v, w], ...]}; vertex ids may be strings
// or integers and are kept as strings.
Graph parse_graph_json(const std::string& text);
Graph load_graph(const std::string& path);
std::string graph_to_json(const Graph& g);
std::string subdivision_to_json(const SubdividedGraph& sg,
                                const std::vector<double>& edge_weights);

// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

std::string read_file(const std::string& path);
// Writes to `path`, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& text);

// step,vertex,wait with one row per state; the wait is empty when unknown.
void write_path_csv(std::ostream& out, const JumpPath& path,
                    const std::vector<std::string>& names);
void write_states_csv(std::ostream& out, const IndexSet& states,
                      const std::vector<std::string>& names);
// Header = vertex ids, one beta vector per row.
void write_beta_csv_header(std::ostream& out, const std::vector<std::string>& names);
void write_beta_csv_row(std::ostream& out, const Vector& beta);

// Minimal CSV reader: header plus rows of fields, no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable parse_csv(const std::string& text);

}  // namespace rproc
