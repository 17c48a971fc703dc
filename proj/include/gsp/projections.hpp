#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gsp/error.hpp"
#include "gsp/graph.hpp"
#include "gsp/pcst.hpp"

namespace gsp {

/// Parameters of the connected-subgraph model: supports of at most k nodes,
/// with the enlarged budgets and approximation constants of the head and
/// tail oracles.
struct ModelParams {
  int k = 1;
  int head_budget = 2;
  int tail_budget = 5;
  double c_head = std::sqrt(1.0 / 14.0);
  double c_tail = std::sqrt(7.0);

  static ModelParams for_sparsity(int k) {
    if (k < 1) throw InputError("sparsity k must be >= 1, got " + std::to_string(k));
    ModelParams p;
    p.k = k;
    p.head_budget = 2 * k;
    p.tail_budget = 5 * k;
    return p;
  }
};

/// c_head^2 > 1 - 1/(1 + c_tail)^2, the precondition for geometric convergence.
inline bool check_c_condition(double c_head, double c_tail) {
  return c_head * c_head > 1.0 - 1.0 / ((1.0 + c_tail) * (1.0 + c_tail));
}
inline bool check_c_condition(const ModelParams& p) { return check_c_condition(p.c_head, p.c_tail); }

inline constexpr int kMaxExactProjectionNodes = 16;

/// Best support in M(G,k) for b by enumeration: maximizes ||b_S||, ties go to
/// the smaller set, then the lexicographically smaller one.
inline SupportSet project_exact(const Graph& g, std::span<const double> b, int k) {
  check_dimension(g, b, "projection input");
  if (g.num_nodes() > kMaxExactProjectionNodes)
    throw CapacityError("project_exact is limited to " +
                        std::to_string(kMaxExactProjectionNodes) + " nodes");
  SupportSet best;
  double best_mass = -1.0;
  for_each_connected_subset(g, k, [&](const SupportSet& s) {
    double mass = squared_norm_on(b, s);
    double tol = 1e-12 * (1.0 + best_mass);
    if (mass > best_mass + tol ||
        (mass >= best_mass - tol && SupportSet::size_then_lex_less(s, best))) {
      best_mass = mass;
      best = s;
    }
  });
  return best;
}

namespace detail {

inline SupportSet budgeted_projection(const Graph& g, std::span<const double> b, int budget) {
  check_dimension(g, b, "projection input");
  std::vector<double> prizes(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!std::isfinite(b[i])) throw NumericError("non-finite entry in projection input");
    prizes[i] = b[i] * b[i];
  }
  std::vector<double> unit(static_cast<std::size_t>(g.num_edges()), 1.0);
  int cap = std::min(budget, g.num_nodes());
  return pcst_budgeted(PcstInstance{g, prizes, unit}, cap).nodes;
}

}  // namespace detail

/// Head approximation: a support of at most 2k nodes capturing a constant
/// fraction of the best achievable norm over M(G,k).
inline SupportSet head_approx(const Graph& g, std::span<const double> b, const ModelParams& p) {
  return detail::budgeted_projection(g, b, p.head_budget);
}

/// Tail approximation: a support of at most 5k nodes whose residual is within
/// a constant factor of the best residual over M(G,k).
inline SupportSet tail_approx(const Graph& g, std::span<const double> b, const ModelParams& p) {
  return detail::budgeted_projection(g, b, p.tail_budget);
}

using SupportOracle = std::function<SupportSet(const Graph&, std::span<const double>)>;

/// The pair of projections a solver uses for its head and tail steps.
struct Oracles {
  SupportOracle head;
  SupportOracle tail;
};

inline Oracles approximate_oracles(const ModelParams& p) {
  return {[p](const Graph& g, std::span<const double> b) { return head_approx(g, b, p); },
          [p](const Graph& g, std::span<const double> b) { return tail_approx(g, b, p); }};
}

/// Exact projection in both roles (small graphs only).
inline Oracles exact_oracles(int k) {
  if (k < 1) throw InputError("sparsity k must be >= 1, got " + std::to_string(k));
  auto exact = [k](const Graph& g, std::span<const double> b) { return project_exact(g, b, k); };
  return {exact, exact};
}

}  // namespace gsp
