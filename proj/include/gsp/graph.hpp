#pragma once

#include <algorithm>
#include <compare>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsp/error.hpp"

namespace gsp {

/// Dense real vector over the nodes of a graph.
using NodeVector = std::vector<double>;

/// Undirected edge, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph over nodes 0..n-1 with nonnegative edge costs.
///
/// Immutable after construction. Duplicate edges (in either orientation) are
/// dropped, keeping the first occurrence and its cost; self-loops and
/// out-of-range endpoints are rejected.
class Graph {
 public:
  Graph(int n, const std::vector<std::pair<int, int>>& edges,
        const std::vector<double>& costs = {})
      : n_(n) {
    if (n < 1) throw InputError("graph must have at least one node");
    if (!costs.empty() && costs.size() != edges.size())
      throw InputError("edge cost count does not match edge count");

    std::vector<std::pair<Edge, std::size_t>> keyed;
    keyed.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto [a, b] = edges[i];
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw InputError("edge endpoint out of range: (" + std::to_string(a) + ", " +
                         std::to_string(b) + ")");
      if (a == b) throw InputError("self-loop on node " + std::to_string(a));
      double c = costs.empty() ? 1.0 : costs[i];
      if (!std::isfinite(c) || c < 0.0)
        throw InputError("edge cost must be finite and nonnegative");
      keyed.push_back({Edge{std::min(a, b), std::max(a, b)}, i});
    }
    // Stable dedup keeping the first occurrence of each unordered pair.
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::size_t> keep;
    keep.reserve(keyed.size());
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
      keep.push_back(keyed[i].second);
    }
    std::sort(keep.begin(), keep.end());
    edges_.reserve(keep.size());
    costs_.reserve(keep.size());
    for (std::size_t idx : keep) {
      auto [a, b] = edges[idx];
      edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
      costs_.push_back(costs.empty() ? 1.0 : costs[idx]);
    }
    build_adjacency();
  }

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::span<const double> costs() const { return costs_; }
  double cost(int e) const { return costs_[static_cast<std::size_t>(e)]; }

  std::span<const int> neighbors(int u) const {
    auto b = offsets_[static_cast<std::size_t>(u)];
    auto e = offsets_[static_cast<std::size_t>(u) + 1];
    return {adj_nodes_.data() + b, e - b};
  }
  /// Edge ids aligned with neighbors(u).
  std::span<const int> incident_edges(int u) const {
    auto b = offsets_[static_cast<std::size_t>(u)];
    auto e = offsets_[static_cast<std::size_t>(u) + 1];
    return {adj_edges_.data() + b, e - b};
  }

  /// Same topology with a different cost vector.
  Graph with_costs(const std::vector<double>& costs) const {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(edges_.size());
    for (const auto& e : edges_) pairs.emplace_back(e.u, e.v);
    return Graph(n_, pairs, costs);
  }

 private:
  void build_adjacency() {
    std::vector<std::size_t> degree(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& e : edges_) {
      ++degree[static_cast<std::size_t>(e.u)];
      ++degree[static_cast<std::size_t>(e.v)];
    }
    offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int u = 0; u < n_; ++u)
      offsets_[static_cast<std::size_t>(u) + 1] =
          offsets_[static_cast<std::size_t>(u)] + degree[static_cast<std::size_t>(u)];
    adj_nodes_.resize(offsets_.back());
    adj_edges_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (int id = 0; id < num_edges(); ++id) {
      const auto& e = edges_[static_cast<std::size_t>(id)];
      auto& fu = fill[static_cast<std::size_t>(e.u)];
      adj_nodes_[fu] = e.v;
      adj_edges_[fu++] = id;
      auto& fv = fill[static_cast<std::size_t>(e.v)];
      adj_nodes_[fv] = e.u;
      adj_edges_[fv++] = id;
    }
  }

  int n_;
  std::vector<Edge> edges_;
  std::vector<double> costs_;
  std::vector<std::size_t> offsets_;
  std::vector<int> adj_nodes_;
  std::vector<int> adj_edges_;
};

/// Sorted set of distinct node indices.
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(std::initializer_list<int> members) : SupportSet(std::vector<int>(members)) {}
  explicit SupportSet(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && members_.front() < 0)
      throw InputError("negative node index in support set");
  }

  /// Indices whose entries exceed `threshold`.
  static SupportSet positive_entries(std::span<const double> x, double threshold) {
    std::vector<int> m;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] > threshold) m.push_back(static_cast<int>(i));
    return SupportSet(std::move(m));
  }
  /// Indices whose entries have magnitude above `threshold`.
  static SupportSet nonzero_entries(std::span<const double> x, double threshold) {
    std::vector<int> m;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::abs(x[i]) > threshold) m.push_back(static_cast<int>(i));
    return SupportSet(std::move(m));
  }
  static SupportSet from_mask(std::uint32_t mask) {
    std::vector<int> m;
    for (int i = 0; mask != 0; ++i, mask >>= 1)
      if (mask & 1u) m.push_back(i);
    return SupportSet(std::move(m));
  }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(int v) const { return std::binary_search(members_.begin(), members_.end(), v); }
  const std::vector<int>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  int operator[](std::size_t i) const { return members_[i]; }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;
  /// Smaller sets first, then lexicographic on the sorted member list.
  static bool size_then_lex_less(const SupportSet& a, const SupportSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.members_ < b.members_;
  }

 private:
  std::vector<int> members_;
};

inline void check_support(const Graph& g, const SupportSet& s) {
  if (!s.empty() && s.members().back() >= g.num_nodes())
    throw InputError("support member " + std::to_string(s.members().back()) +
                     " out of range for graph with " + std::to_string(g.num_nodes()) +
                     " nodes");
}

inline void check_dimension(const Graph& g, std::span<const double> x, const char* what) {
  if (x.size() != static_cast<std::size_t>(g.num_nodes()))
    throw InputError(std::string(what) + " length " + std::to_string(x.size()) +
                     " does not match node count " + std::to_string(g.num_nodes()));
}

/// Partition of `s` into maximal connected induced subsets, ordered by
/// smallest member.
inline std::vector<SupportSet> connected_components(const Graph& g, const SupportSet& s) {
  check_support(g, s);
  std::vector<SupportSet> out;
  if (s.empty()) return out;
  // 0 = not in s, 1 = unvisited member, 2 = visited
  std::vector<std::uint8_t> state(static_cast<std::size_t>(g.num_nodes()), 0);
  for (int v : s) state[static_cast<std::size_t>(v)] = 1;
  std::vector<int> stack;
  for (int root : s) {
    if (state[static_cast<std::size_t>(root)] != 1) continue;
    std::vector<int> comp;
    state[static_cast<std::size_t>(root)] = 2;
    stack.push_back(root);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int w : g.neighbors(u)) {
        if (state[static_cast<std::size_t>(w)] == 1) {
          state[static_cast<std::size_t>(w)] = 2;
          stack.push_back(w);
        }
      }
    }
    out.emplace_back(std::move(comp));
  }
  return out;
}

/// True iff the subgraph induced by `s` has at most one component.
inline bool is_connected(const Graph& g, const SupportSet& s) {
  check_support(g, s);
  if (s.size() <= 1) return true;
  return connected_components(g, s).size() == 1;
}

inline constexpr int kMaxEnumerationNodes = 24;

/// Calls `visit(SupportSet)` once for every nonempty connected node set of
/// size at most k. Extension-set enumeration: each set is grown only from its
/// smallest member, through exclusive neighbourhoods, so no set repeats.
template <typename Visitor>
void for_each_connected_subset(const Graph& g, int k, Visitor&& visit) {
  const int n = g.num_nodes();
  if (n > kMaxEnumerationNodes)
    throw CapacityError("connected-subset enumeration limited to " +
                        std::to_string(kMaxEnumerationNodes) + " nodes, got " +
                        std::to_string(n));
  if (k < 1) throw InputError("k must be at least 1");
  k = std::min(k, n);

  std::vector<std::uint32_t> nbr(static_cast<std::size_t>(n), 0);
  for (const auto& e : g.edges()) {
    nbr[static_cast<std::size_t>(e.u)] |= 1u << e.v;
    nbr[static_cast<std::size_t>(e.v)] |= 1u << e.u;
  }

  auto extend = [&](auto& self, std::uint32_t sub, std::uint32_t ext, std::uint32_t sub_nbr,
                    std::uint32_t above, int size) -> void {
    visit(SupportSet::from_mask(sub));
    if (size == k) return;
    while (ext != 0) {
      int w = __builtin_ctz(ext);
      ext &= ext - 1;
      std::uint32_t excl = nbr[static_cast<std::size_t>(w)] & ~sub & ~sub_nbr & above;
      self(self, sub | (1u << w), ext | excl, sub_nbr | nbr[static_cast<std::size_t>(w)], above,
           size + 1);
    }
  };

  for (int v = 0; v < n; ++v) {
    std::uint32_t above = (v + 1 >= 32) ? 0u : ~((1u << (v + 1)) - 1u);
    std::uint32_t nv = nbr[static_cast<std::size_t>(v)];
    extend(extend, 1u << v, nv & above, nv, above, 1);
  }
}

/// Every nonempty connected set with at most k nodes (n <= 24).
inline std::vector<SupportSet> enumerate_connected_subsets(const Graph& g, int k) {
  std::vector<SupportSet> out;
  for_each_connected_subset(g, k, [&](SupportSet s) { out.push_back(std::move(s)); });
  return out;
}

/// Copy of `x` with entries outside `s` zeroed.
inline NodeVector restrict_to(std::span<const double> x, const SupportSet& s) {
  NodeVector out(x.size(), 0.0);
  for (int i : s) out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  return out;
}

inline double squared_norm_on(std::span<const double> x, const SupportSet& s) {
  double acc = 0.0;
  for (int i : s) acc += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  return acc;
}

inline double squared_norm(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

}  // namespace gsp
