#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <tuple>
#include <vector>

#include "gsp/detail/indexed_heap.hpp"
#include "gsp/detail/pairing_heap.hpp"
#include "gsp/error.hpp"
#include "gsp/graph.hpp"

namespace gsp {

/// Prize-collecting Steiner tree instance: a view over a graph, one prize per
/// node and one cost per edge (indexed like graph.edges()).
struct PcstInstance {
  const Graph& graph;
  std::span<const double> prizes;
  std::span<const double> edge_costs;
};

struct PcstSolution {
  SupportSet nodes;
  std::vector<Edge> tree_edges;
  /// Cost of tree_edges plus prizes of the nodes left out.
  double objective = 0.0;
};

inline void validate(const PcstInstance& inst) {
  if (inst.graph.num_nodes() < 1) throw InputError("PCST instance has an empty graph");
  if (inst.prizes.size() != static_cast<std::size_t>(inst.graph.num_nodes()))
    throw InputError("PCST prize vector length does not match node count");
  if (inst.edge_costs.size() != static_cast<std::size_t>(inst.graph.num_edges()))
    throw InputError("PCST edge cost vector length does not match edge count");
  for (double p : inst.prizes)
    if (!std::isfinite(p) || p < 0.0) throw InputError("PCST prizes must be finite and >= 0");
  for (double c : inst.edge_costs)
    if (!std::isfinite(c) || c < 0.0) throw InputError("PCST edge costs must be finite and >= 0");
}

/// Cost of the chosen tree plus the prizes it forfeits.
inline double pcst_objective(const PcstInstance& inst, const SupportSet& nodes,
                             std::span<const int> tree_edge_ids) {
  double cost = 0.0;
  for (int e : tree_edge_ids) cost += inst.edge_costs[static_cast<std::size_t>(e)];
  double forfeited = std::accumulate(inst.prizes.begin(), inst.prizes.end(), 0.0);
  for (int v : nodes) forfeited -= inst.prizes[static_cast<std::size_t>(v)];
  return cost + std::max(0.0, forfeited);
}

namespace detail {

/// Unrooted Goemans-Williamson moat growing followed by strong pruning.
///
/// Every node starts as an active cluster. An active cluster grows its moat at
/// unit rate and deactivates once its moats exhaust its prize sum. Each edge is
/// split into two parts, one per endpoint, kept in the endpoint cluster's
/// pairing heap keyed by the time the part would be covered. When a part fires
/// the edge is re-examined: it either merges the two clusters, or both parts
/// are rescheduled from the uncovered remainder. Heaps of inactive clusters
/// are frozen and shifted forward when they are merged back into an active
/// cluster. The merge edges form a forest; strong pruning then keeps the
/// subtree of maximum net worth (prizes minus edge costs) over all trees and
/// all choices of root.
class GoemansWilliamson {
 public:
  PcstSolution solve(const PcstInstance& inst) {
    grow(inst);
    return prune(inst);
  }

 private:
  struct Cluster {
    bool active = true;
    double start = 0.0;
    double end = 0.0;
    double deactivation = 0.0;
    double prize = 0.0;
    double sub_moat = 0.0;
    double moat = 0.0;  // final once merged
    int merged_into = -1;
    int heap = -1;
    int skip = -1;
    double skip_sum = 0.0;
  };

  void grow(const PcstInstance& inst) {
    const Graph& g = inst.graph;
    const int n = g.num_nodes();
    const int m = g.num_edges();
    clusters_.assign(static_cast<std::size_t>(n), Cluster{});
    clusters_.reserve(2 * static_cast<std::size_t>(n));
    heaps_.clear();
    heaps_.reserve(4 * static_cast<std::size_t>(m) + 1);
    part_stamp_.assign(2 * static_cast<std::size_t>(m), 0);
    edge_dead_.assign(static_cast<std::size_t>(m), 0);
    forest_.clear();
    edge_events_.reset(2 * static_cast<std::size_t>(n));
    deact_events_.reset(2 * static_cast<std::size_t>(n));
    now_ = 0.0;
    num_active_ = n;

    for (int v = 0; v < n; ++v) {
      Cluster& c = clusters_[static_cast<std::size_t>(v)];
      c.prize = inst.prizes[static_cast<std::size_t>(v)];
      c.deactivation = c.prize;
      deact_events_.set(v, c.deactivation);
    }
    for (int e = 0; e < m; ++e) {
      const Edge& ed = g.edge(e);
      double half = inst.edge_costs[static_cast<std::size_t>(e)] / 2.0;
      auto& cu = clusters_[static_cast<std::size_t>(ed.u)];
      cu.heap = heaps_.insert(cu.heap, half, 2 * e, 0);
      auto& cv = clusters_[static_cast<std::size_t>(ed.v)];
      cv.heap = heaps_.insert(cv.heap, half, 2 * e + 1, 0);
    }
    for (int v = 0; v < n; ++v) refresh(v);

    while (num_active_ > 0) {
      double t_edge = edge_events_.empty() ? kInf : edge_events_.top_key();
      double t_deact = deact_events_.empty() ? kInf : deact_events_.top_key();
      if (t_edge == kInf && t_deact == kInf) break;
      if (t_edge <= t_deact) {
        now_ = t_edge;
        handle_edge_event(inst, edge_events_.top());
      } else {
        const int c = deact_events_.top();
        deact_events_.erase(c);
        edge_events_.erase(c);
        now_ = t_deact;
        Cluster& cl = clusters_[static_cast<std::size_t>(c)];
        cl.active = false;
        cl.end = t_deact;
        --num_active_;
      }
    }
  }

  void refresh(int c) {
    const Cluster& cl = clusters_[static_cast<std::size_t>(c)];
    if (cl.active && cl.merged_into < 0 && cl.heap >= 0)
      edge_events_.set(c, heaps_.top(cl.heap).value);
    else
      edge_events_.erase(c);
  }

  double root_moat(int c) const {
    const Cluster& cl = clusters_[static_cast<std::size_t>(c)];
    return (cl.active ? now_ : cl.end) - cl.start;
  }

  /// Total moat covering `node` and the id of its outermost cluster.
  std::pair<double, int> moat_sum(int node) {
    path_.clear();
    step_.clear();
    double total = 0.0;
    int cur = node;
    while (clusters_[static_cast<std::size_t>(cur)].merged_into >= 0) {
      Cluster& cl = clusters_[static_cast<std::size_t>(cur)];
      double d;
      int next;
      if (cl.skip >= 0) {
        d = cl.skip_sum;
        next = cl.skip;
      } else {
        d = cl.moat;
        next = cl.merged_into;
      }
      path_.push_back(cur);
      step_.push_back(d);
      total += d;
      cur = next;
    }
    double rest = total;
    for (std::size_t i = 0; i < path_.size(); ++i) {
      Cluster& cl = clusters_[static_cast<std::size_t>(path_[i])];
      cl.skip = cur;
      cl.skip_sum = rest;
      rest -= step_[i];
    }
    return {total + root_moat(cur), cur};
  }

  void handle_edge_event(const PcstInstance& inst, int c) {
    Cluster& cl = clusters_[static_cast<std::size_t>(c)];
    const auto top = heaps_.top(cl.heap);
    cl.heap = heaps_.delete_min(cl.heap);
    refresh(c);

    const int part = top.payload;
    const int e = part >> 1;
    if (top.stamp != part_stamp_[static_cast<std::size_t>(part)] ||
        edge_dead_[static_cast<std::size_t>(e)])
      return;
    const int other = part ^ 1;
    const Edge& ed = inst.graph.edge(e);
    const int node_here = (part & 1) ? ed.v : ed.u;
    const int node_there = (part & 1) ? ed.u : ed.v;

    auto [sum_here, root_here] = moat_sum(node_here);
    auto [sum_there, root_there] = moat_sum(node_there);
    if (root_here == root_there) {
      edge_dead_[static_cast<std::size_t>(e)] = 1;
      return;
    }
    const double cost = inst.edge_costs[static_cast<std::size_t>(e)];
    const double remainder = cost - sum_here - sum_there;
    if (remainder <= cost * 1e-10) {
      merge(root_here, root_there, e);
      return;
    }

    Cluster& here = clusters_[static_cast<std::size_t>(root_here)];
    Cluster& there = clusters_[static_cast<std::size_t>(root_there)];
    const int stamp_here = ++part_stamp_[static_cast<std::size_t>(part)];
    const int stamp_there = ++part_stamp_[static_cast<std::size_t>(other)];
    if (there.active) {
      const double when = now_ + remainder / 2.0;
      here.heap = heaps_.insert(here.heap, when, part, stamp_here);
      there.heap = heaps_.insert(there.heap, when, other, stamp_there);
    } else {
      // The far side is frozen: its part fires as soon as it is reactivated.
      here.heap = heaps_.insert(here.heap, now_ + remainder, part, stamp_here);
      there.heap = heaps_.insert(there.heap, there.end, other, stamp_there);
    }
    refresh(root_here);
    refresh(root_there);
  }

  void merge(int a, int b, int edge_id) {
    const int id = static_cast<int>(clusters_.size());
    clusters_.push_back(Cluster{});
    Cluster merged;
    merged.start = now_;
    for (int child : {a, b}) {
      Cluster& cl = clusters_[static_cast<std::size_t>(child)];
      if (cl.active) {
        cl.active = false;
        cl.end = now_;
        --num_active_;
      } else {
        heaps_.add_to_all(cl.heap, now_ - cl.end);
      }
      cl.moat = cl.end - cl.start;
      cl.merged_into = id;
      merged.prize += cl.prize;
      merged.sub_moat += cl.sub_moat + cl.moat;
      merged.heap = heaps_.meld(merged.heap, cl.heap);
      cl.heap = -1;
      edge_events_.erase(child);
      deact_events_.erase(child);
    }
    merged.deactivation = now_ + std::max(0.0, merged.prize - merged.sub_moat);
    clusters_[static_cast<std::size_t>(id)] = merged;
    ++num_active_;
    edge_events_.grow(clusters_.size());
    deact_events_.grow(clusters_.size());
    deact_events_.set(id, merged.deactivation);
    edge_dead_[static_cast<std::size_t>(edge_id)] = 1;
    forest_.push_back(edge_id);
    refresh(id);
  }

  PcstSolution prune(const PcstInstance& inst) {
    const Graph& g = inst.graph;
    const auto n = static_cast<std::size_t>(g.num_nodes());
    // Forest adjacency in CSR form.
    std::vector<std::size_t> off(n + 1, 0);
    for (int e : forest_) {
      ++off[static_cast<std::size_t>(g.edge(e).u) + 1];
      ++off[static_cast<std::size_t>(g.edge(e).v) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) off[i + 1] += off[i];
    std::vector<int> adj_edge(off.back());
    {
      std::vector<std::size_t> fill(off.begin(), off.end() - 1);
      for (int e : forest_) {
        adj_edge[fill[static_cast<std::size_t>(g.edge(e).u)]++] = e;
        adj_edge[fill[static_cast<std::size_t>(g.edge(e).v)]++] = e;
      }
    }
    auto other_end = [&](int e, int v) { return g.edge(e).u == v ? g.edge(e).v : g.edge(e).u; };
    auto prize = [&](int v) { return inst.prizes[static_cast<std::size_t>(v)]; };
    auto cost = [&](int e) { return inst.edge_costs[static_cast<std::size_t>(e)]; };

    std::vector<int> parent(n, -1), parent_edge(n, -1), order;
    std::vector<double> down(n, 0.0), full(n, 0.0);
    std::vector<std::uint8_t> seen(n, 0);
    order.reserve(n);

    // Rooted traversal of the tree containing `root`; fills order/parent/down.
    auto root_tree = [&](int root) {
      order.clear();
      parent[static_cast<std::size_t>(root)] = -1;
      parent_edge[static_cast<std::size_t>(root)] = -1;
      order.push_back(root);
      for (std::size_t i = 0; i < order.size(); ++i) {
        int v = order[i];
        seen[static_cast<std::size_t>(v)] = 1;
        for (std::size_t j = off[static_cast<std::size_t>(v)]; j < off[static_cast<std::size_t>(v) + 1]; ++j) {
          int e = adj_edge[j];
          int w = other_end(e, v);
          if (w == parent[static_cast<std::size_t>(v)]) continue;
          parent[static_cast<std::size_t>(w)] = v;
          parent_edge[static_cast<std::size_t>(w)] = e;
          order.push_back(w);
        }
      }
      for (std::size_t i = order.size(); i-- > 0;) {
        int v = order[i];
        down[static_cast<std::size_t>(v)] = prize(v);
      }
      for (std::size_t i = order.size(); i-- > 1;) {
        int v = order[i];
        double gain = down[static_cast<std::size_t>(v)] - cost(parent_edge[static_cast<std::size_t>(v)]);
        if (gain > 0.0) down[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])] += gain;
      }
    };

    double best_value = -kInf;
    int best_node = -1;
    for (std::size_t r = 0; r < n; ++r) {
      if (seen[r]) continue;
      root_tree(static_cast<int>(r));
      full[r] = down[r];
      for (std::size_t i = 1; i < order.size(); ++i) {
        auto v = static_cast<std::size_t>(order[i]);
        auto p = static_cast<std::size_t>(parent[v]);
        double c = cost(parent_edge[v]);
        double without_v = full[p] - std::max(0.0, down[v] - c);
        full[v] = down[v] + std::max(0.0, without_v - c);
      }
      for (int v : order) {
        double val = full[static_cast<std::size_t>(v)];
        if (val > best_value || (val == best_value && v < best_node)) {
          best_value = val;
          best_node = v;
        }
      }
    }

    // Re-root at the best node and keep the strictly profitable subtrees.
    root_tree(best_node);
    std::vector<int> keep{best_node};
    std::vector<int> tree_edge_ids;
    std::vector<int> stack{best_node};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (std::size_t j = off[static_cast<std::size_t>(v)]; j < off[static_cast<std::size_t>(v) + 1]; ++j) {
        int e = adj_edge[j];
        int w = other_end(e, v);
        if (w == parent[static_cast<std::size_t>(v)]) continue;
        if (down[static_cast<std::size_t>(w)] - cost(e) > 0.0) {
          keep.push_back(w);
          tree_edge_ids.push_back(e);
          stack.push_back(w);
        }
      }
    }
    PcstSolution sol;
    sol.nodes = SupportSet(std::move(keep));
    std::sort(tree_edge_ids.begin(), tree_edge_ids.end());
    for (int e : tree_edge_ids) sol.tree_edges.push_back(g.edge(e));
    sol.objective = pcst_objective(inst, sol.nodes, tree_edge_ids);
    return sol;
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<Cluster> clusters_;
  PairingHeapPool heaps_;
  std::vector<int> part_stamp_;
  std::vector<std::uint8_t> edge_dead_;
  std::vector<int> forest_;
  IndexedMinHeap edge_events_;   // active clusters keyed by their next edge event
  IndexedMinHeap deact_events_;  // active clusters keyed by deactivation time
  std::vector<int> path_;
  std::vector<double> step_;
  double now_ = 0.0;
  int num_active_ = 0;
};

}  // namespace detail

/// Goemans-Williamson 2-approximation for unrooted PCST. Deterministic.
inline PcstSolution pcst_gw(const PcstInstance& inst) {
  validate(inst);
  detail::GoemansWilliamson gw;
  return gw.solve(inst);
}

inline constexpr int kMaxExactPcstNodes = 16;

/// Exact PCST optimum by enumerating every connected node set; the tree on a
/// node set is the minimum spanning tree of its induced subgraph. Ties go to
/// the lexicographically smallest node set. The empty solution is taken only
/// when strictly better than every nonempty one.
inline PcstSolution pcst_exact(const PcstInstance& inst) {
  validate(inst);
  const Graph& g = inst.graph;
  if (g.num_nodes() > kMaxExactPcstNodes)
    throw CapacityError("pcst_exact is limited to " + std::to_string(kMaxExactPcstNodes) +
                        " nodes");
  std::vector<int> by_cost(static_cast<std::size_t>(g.num_edges()));
  std::iota(by_cost.begin(), by_cost.end(), 0);
  std::stable_sort(by_cost.begin(), by_cost.end(), [&](int a, int b) {
    return inst.edge_costs[static_cast<std::size_t>(a)] <
           inst.edge_costs[static_cast<std::size_t>(b)];
  });
  const double total_prize = std::accumulate(inst.prizes.begin(), inst.prizes.end(), 0.0);

  PcstSolution best;
  best.objective = total_prize;
  bool have_nonempty = false;
  std::vector<int> dsu(static_cast<std::size_t>(g.num_nodes()));
  auto find = [&](int x) {
    while (dsu[static_cast<std::size_t>(x)] != x) {
      dsu[static_cast<std::size_t>(x)] = dsu[static_cast<std::size_t>(dsu[static_cast<std::size_t>(x)])];
      x = dsu[static_cast<std::size_t>(x)];
    }
    return x;
  };

  for_each_connected_subset(g, g.num_nodes(), [&](const SupportSet& s) {
    std::iota(dsu.begin(), dsu.end(), 0);
    std::vector<int> tree;
    double cost = 0.0;
    for (int e : by_cost) {
      const Edge& ed = g.edge(e);
      if (!s.contains(ed.u) || !s.contains(ed.v)) continue;
      int a = find(ed.u), b = find(ed.v);
      if (a == b) continue;
      dsu[static_cast<std::size_t>(a)] = b;
      tree.push_back(e);
      cost += inst.edge_costs[static_cast<std::size_t>(e)];
    }
    double kept = 0.0;
    for (int v : s) kept += inst.prizes[static_cast<std::size_t>(v)];
    double obj = cost + (total_prize - kept);
    const double tol = 1e-12 * (1.0 + std::abs(best.objective));
    bool better;
    if (!have_nonempty)
      better = obj <= best.objective + tol;
    else if (obj < best.objective - tol)
      better = true;
    else if (obj <= best.objective + tol)
      better = std::lexicographical_compare(s.begin(), s.end(), best.nodes.begin(), best.nodes.end());
    else
      better = false;
    if (better) {
      have_nonempty = true;
      best.nodes = s;
      std::sort(tree.begin(), tree.end());
      best.tree_edges.clear();
      for (int e : tree) best.tree_edges.push_back(g.edge(e));
      best.objective = obj;
    }
  });
  return best;
}

/// PCST under a node budget: bisects a multiplier on all prizes (at most 32
/// steps, geometric midpoints) and keeps the feasible GW tree (|nodes| <=
/// budget) with the largest prize mass. The best single node is always a
/// candidate. Objective is reported under the unscaled instance.
inline PcstSolution pcst_budgeted(const PcstInstance& inst, int budget) {
  validate(inst);
  const Graph& g = inst.graph;
  const int n = g.num_nodes();
  if (budget < 1 || budget > n)
    throw InputError("PCST budget must lie in [1, " + std::to_string(n) + "], got " +
                     std::to_string(budget));

  const auto prizes = inst.prizes;
  auto mass_of = [&](const SupportSet& s) {
    double m = 0.0;
    for (int v : s) m += prizes[static_cast<std::size_t>(v)];
    return m;
  };

  int best_single = 0;
  for (int v = 1; v < n; ++v)
    if (prizes[static_cast<std::size_t>(v)] > prizes[static_cast<std::size_t>(best_single)])
      best_single = v;
  SupportSet best_nodes{best_single};
  std::vector<Edge> best_edges;
  double best_mass = prizes[static_cast<std::size_t>(best_single)];

  const double p_max = best_mass;
  if (p_max <= 0.0) {
    PcstSolution sol{best_nodes, {}, 0.0};
    sol.objective = pcst_objective(inst, sol.nodes, {});
    return sol;
  }
  double p_min = p_max;
  for (double p : prizes)
    if (p > 0.0) p_min = std::min(p_min, p);
  double total_cost = 0.0;
  double c_min = std::numeric_limits<double>::infinity();
  for (double c : inst.edge_costs) {
    total_cost += c;
    if (c > 0.0) c_min = std::min(c_min, c);
  }

  detail::GoemansWilliamson gw;
  std::vector<double> scaled(prizes.size());
  auto attempt = [&](double lambda) {
    for (std::size_t i = 0; i < prizes.size(); ++i) scaled[i] = lambda * prizes[i];
    PcstInstance scaled_inst{g, scaled, inst.edge_costs};
    PcstSolution sol = gw.solve(scaled_inst);
    if (sol.nodes.size() > static_cast<std::size_t>(budget)) return false;
    double m = mass_of(sol.nodes);
    bool better = m > best_mass ||
                  (m == best_mass && SupportSet::size_then_lex_less(sol.nodes, best_nodes));
    if (better) {
      best_mass = m;
      best_nodes = std::move(sol.nodes);
      best_edges = std::move(sol.tree_edges);
    }
    return true;
  };

  const double hi0 = total_cost > 0.0 ? 2.0 * total_cost / p_min : 1.0;
  double hi = hi0;
  if (!attempt(hi)) {
    double lo = std::isfinite(c_min) ? c_min / (4.0 * p_max) : hi * 1e-12;
    attempt(lo);
    for (int step = 0; step < 32 && hi > lo * (1.0 + 1e-3); ++step) {
      double mid = std::sqrt(lo * hi);
      if (attempt(mid))
        lo = mid;
      else
        hi = mid;
    }
  }

  PcstSolution sol;
  sol.nodes = std::move(best_nodes);
  sol.tree_edges = std::move(best_edges);
  std::vector<int> ids;
  for (const Edge& e : sol.tree_edges) {
    for (int id : g.incident_edges(e.u))
      if (g.edge(id) == e) {
        ids.push_back(id);
        break;
      }
  }
  sol.objective = pcst_objective(inst, sol.nodes, ids);
  return sol;
}

}  // namespace gsp
