#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gsp/error.hpp"
#include "gsp/graph.hpp"

namespace gsp::io {

/// Error tied to a line of an input file.
class ParseError : public InputError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : InputError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string strip_comment(const std::string& line) {
  std::string s = line.substr(0, line.find('#'));
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = s.find_first_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(s);
  while (std::getline(ss, cell, sep)) {
    std::size_t b = cell.find_first_not_of(" \t");
    std::size_t e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_number(const std::string& text, const std::string& file, std::size_t line,
                           const char* what) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(file, line, std::string("invalid ") + what + " '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v))
    throw ParseError(file, line, std::string("invalid ") + what + " '" + text + "'");
  return v;
}

struct EdgeList {
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::size_t> lines;
};

/// One edge per line: two whitespace-separated node IDs; '#' starts a comment.
inline EdgeList parse_edge_list(const std::string& text, const std::string& file) {
  EdgeList out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip_comment(raw);
    if (s.empty()) continue;
    std::istringstream fields(s);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.size() != 2)
      throw ParseError(file, line, "expected two node IDs, found " + std::to_string(tok.size()) + " fields");
    out.edges.emplace_back(tok[0], tok[1]);
    out.lines.push_back(line);
  }
  return out;
}

struct NodeTable {
  std::vector<std::string> ids;
  std::vector<double> c;
  std::vector<double> b;  // empty when the file has no b column
  std::unordered_map<std::string, int> index;
};

/// Header "node,c" or "node,c,b", then one comma-separated row per node.
inline NodeTable parse_node_table(const std::string& text, const std::string& file) {
  NodeTable out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool header = false, has_b = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip_comment(raw);
    if (s.empty()) continue;
    auto cells = split(s, ',');
    if (!header) {
      if (cells.size() == 2 && cells[0] == "node" && cells[1] == "c")
        has_b = false;
      else if (cells.size() == 3 && cells[0] == "node" && cells[1] == "c" && cells[2] == "b")
        has_b = true;
      else
        throw ParseError(file, line, "expected header 'node,c' or 'node,c,b'");
      header = true;
      continue;
    }
    if (cells.size() != (has_b ? 3u : 2u))
      throw ParseError(file, line, "expected " + std::string(has_b ? "3" : "2") + " columns, found " +
                                       std::to_string(cells.size()));
    if (cells[0].empty()) throw ParseError(file, line, "empty node ID");
    if (!out.index.emplace(cells[0], static_cast<int>(out.ids.size())).second)
      throw ParseError(file, line, "duplicate node '" + cells[0] + "'");
    out.ids.push_back(cells[0]);
    out.c.push_back(parse_number(cells[1], file, line, "count"));
    if (has_b) out.b.push_back(parse_number(cells[2], file, line, "baseline"));
  }
  if (!header) throw ParseError(file, line, "missing header 'node,c[,b]'");
  if (out.ids.empty()) throw ParseError(file, line, "no nodes");
  return out;
}

/// Builds the graph over the node table's index order. An edge naming a node
/// absent from the table is a dimension mismatch.
inline Graph build_graph(const EdgeList& edges, const NodeTable& nodes, const std::string& file) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(edges.edges.size());
  for (std::size_t i = 0; i < edges.edges.size(); ++i) {
    const auto& [a, b] = edges.edges[i];
    auto ia = nodes.index.find(a), ib = nodes.index.find(b);
    for (const auto* name : {&a, &b})
      if (!nodes.index.count(*name))
        throw DimensionError(file + ":" + std::to_string(edges.lines[i]) + ": node '" + *name +
                             "' does not appear in the signal file");
    if (ia->second == ib->second)
      throw ParseError(file, edges.lines[i], "self-loop on node '" + a + "'");
    pairs.emplace_back(ia->second, ib->second);
  }
  return Graph(static_cast<int>(nodes.ids.size()), pairs);
}

/// One node ID per line ('#' comments allowed).
inline std::vector<std::string> parse_id_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string s = strip_comment(raw);
    if (!s.empty()) out.push_back(s);
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

inline std::string edge_file_text(const Graph& g, const std::vector<std::string>& ids) {
  std::string s;
  for (const Edge& e : g.edges())
    s += ids[static_cast<std::size_t>(e.u)] + ' ' + ids[static_cast<std::size_t>(e.v)] + '\n';
  return s;
}

inline std::string node_file_text(const std::vector<std::string>& ids, std::span<const double> c,
                                  std::span<const double> b = {}) {
  std::string s = b.empty() ? "node,c\n" : "node,c,b\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    s += ids[i] + ',' + format_double(c[i]);
    if (!b.empty()) s += ',' + format_double(b[i]);
    s += '\n';
  }
  return s;
}

}  // namespace gsp::io
