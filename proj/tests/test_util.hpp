#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "gsp/graph.hpp"

namespace gsp::testing {

inline Graph path_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

inline Graph grid_graph(int rows, int cols) {
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      int v = r * cols + c;
      if (c + 1 < cols) e.emplace_back(v, v + 1);
      if (r + 1 < rows) e.emplace_back(v, v + cols);
    }
  return Graph(rows * cols, e);
}

/// Erdos-Renyi style graph; `density` is the edge probability.
inline Graph random_graph(std::mt19937_64& rng, int n, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) e.emplace_back(u, v);
  return Graph(n, e);
}

inline std::vector<double> uniform_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = d(rng);
  return x;
}

/// Connectivity by repeated relaxation over the induced edges, independent of
/// the BFS used by the library.
inline bool connected_by_closure(const Graph& g, const std::vector<int>& nodes) {
  if (nodes.size() <= 1) return true;
  std::vector<char> in(static_cast<std::size_t>(g.num_nodes()), 0), reach(in);
  for (int v : nodes) in[static_cast<std::size_t>(v)] = 1;
  reach[static_cast<std::size_t>(nodes[0])] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : g.edges()) {
      auto u = static_cast<std::size_t>(e.u), v = static_cast<std::size_t>(e.v);
      if (!in[u] || !in[v]) continue;
      if (reach[u] != reach[v]) {
        reach[u] = reach[v] = 1;
        changed = true;
      }
    }
  }
  for (int v : nodes)
    if (!reach[static_cast<std::size_t>(v)]) return false;
  return true;
}

/// Every connected subset of size <= k by scanning all bitmasks (n <= 16).
inline std::vector<std::vector<int>> brute_connected_subsets(const Graph& g, int k) {
  std::vector<std::vector<int>> out;
  const int n = g.num_nodes();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (int v = 0; v < n; ++v)
      if (mask & (1u << v)) s.push_back(v);
    if (static_cast<int>(s.size()) > k) continue;
    if (connected_by_closure(g, s)) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gsp::testing
