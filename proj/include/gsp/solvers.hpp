#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gsp/error.hpp"
#include "gsp/graph.hpp"
#include "gsp/projections.hpp"
#include "gsp/scan_statistics.hpp"

namespace gsp {

enum class Halting { SUPPORT_STABLE, RESIDUAL, MAX_ITERS_ONLY };

inline const char* to_string(Halting h) {
  switch (h) {
    case Halting::SUPPORT_STABLE: return "support_stable";
    case Halting::RESIDUAL: return "residual";
    case Halting::MAX_ITERS_ONLY: return "max_iters_only";
  }
  return "?";
}

struct SolverConfig {
  int k = 1;
  double eta = 1.0;
  int max_iters = 50;
  double tol = 1e-6;
  Halting halting = Halting::SUPPORT_STABLE;
  int inner_max_iters = 500;
  double inner_tol = 1e-8;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (k < 1) throw InputError("k must be >= 1, got " + std::to_string(k));
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("eta must be positive");
    if (max_iters < 1) throw InputError("max_iters must be >= 1");
    if (!(tol > 0.0)) throw InputError("tol must be positive");
    if (inner_max_iters < 1) throw InputError("inner_max_iters must be >= 1");
    if (!(inner_tol > 0.0)) throw InputError("inner_tol must be positive");
  }
};

struct IterationRecord {
  SupportSet omega;
  SupportSet support;  // tail output S^{i+1}
  double objective = 0.0;
  double step_norm = 0.0;  // ||x^{i+1} - x^i||
  bool inner_converged = true;
  int inner_iterations = 0;
};

struct SolverRun {
  NodeVector estimate;
  SupportSet support;
  std::vector<IterationRecord> trace;
  int iterations = 0;
  double wall_time = 0.0;
};

inline constexpr double kSupportThreshold = 1e-8;
inline constexpr double kCancellationThreshold = 1e-12;

struct RestrictedResult {
  NodeVector x;
  bool converged = true;
  int iterations = 0;
};

/// Minimizes obj over vectors supported on psi, starting from `start`
/// restricted to psi. The toy objective uses its closed form w_psi. The scan
/// statistics use projected gradient on the box [0,1]^psi with halving
/// backtracking (Armijo constant 1e-4), stopping once the projected gradient
/// step has norm <= inner_tol.
inline RestrictedResult restricted_minimize(const ScanObjective& obj, const SupportSet& psi,
                                            const SolverConfig& cfg,
                                            std::span<const double> start = {}) {
  const std::size_t n = obj.size();
  if (psi.empty()) throw InputError("restricted minimization needs a nonempty support");
  if (psi.members().back() >= static_cast<int>(n))
    throw InputError("support index out of range for objective");
  if (!start.empty() && start.size() != n)
    throw InputError("start vector has the wrong length");
  RestrictedResult res;
  res.x.assign(n, 0.0);
  if (obj.kind() == StatKind::TOY_QUADRATIC) {
    for (int i : psi) res.x[static_cast<std::size_t>(i)] = obj.weights()[static_cast<std::size_t>(i)];
    return res;
  }

  const auto& idx = psi.members();
  const std::size_t m = idx.size();
  std::vector<double> x(m, 0.0), g(m), trial(m);
  if (!start.empty())
    for (std::size_t j = 0; j < m; ++j)
      x[j] = std::clamp(start[static_cast<std::size_t>(idx[j])], 0.0, 1.0);
  auto project = [](double v) { return std::clamp(v, 0.0, 1.0); };

  double f = obj.value_on(idx, x);
  res.converged = false;
  int it = 0;
  for (; it < cfg.inner_max_iters; ++it) {
    obj.gradient_on(idx, x, g);
    double pg = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double d = x[j] - project(x[j] - g[j]);
      pg += d * d;
    }
    if (std::sqrt(pg) <= cfg.inner_tol) {
      res.converged = true;
      break;
    }
    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      double decrease = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        trial[j] = project(x[j] - t * g[j]);
        decrease += g[j] * (trial[j] - x[j]);
      }
      double ft = obj.value_on(idx, trial);
      if (ft <= f + 1e-4 * decrease) {
        x.swap(trial);
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no representable descent step left
  }
  res.iterations = it;
  for (std::size_t j = 0; j < m; ++j) res.x[static_cast<std::size_t>(idx[j])] = x[j];
  return res;
}

/// Called after every iteration with the iteration index and x^{i+1}.
using IterateObserver = std::function<void(int, std::span<const double>)>;

namespace detail {

enum class Variant { IHT, GHTP };

// The oracles square their input; anything that overflows there is a numeric failure.
inline void check_squarable(std::span<const double> v, const char* what) {
  for (double a : v)
    if (!std::isfinite(a * a)) throw NumericError(std::string(what) + " overflows");
}

inline SolverRun run_solver(Variant variant, const Graph& g, const ScanObjective& obj,
                            const SolverConfig& cfg, const Oracles& oracles,
                            const IterateObserver& observe) {
  cfg.validate();
  if (obj.size() != static_cast<std::size_t>(g.num_nodes()))
    throw InputError("objective has length " + std::to_string(obj.size()) + " but graph has " +
                     std::to_string(g.num_nodes()) + " nodes");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = obj.size();
  SolverRun run;
  NodeVector x(n, 0.0), grad, b(n);
  SupportSet prev_support;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    IterationRecord rec;
    try {
      grad = obj.gradient(x);
      check_squarable(grad, "gradient");
      rec.omega = oracles.head(g, grad);
      b = x;
      for (int i : rec.omega) b[static_cast<std::size_t>(i)] -= cfg.eta * grad[static_cast<std::size_t>(i)];
      if (variant == Variant::GHTP) {
        SupportSet psi = SupportSet::nonzero_entries(b, kCancellationThreshold);
        if (psi.empty()) {
          std::fill(b.begin(), b.end(), 0.0);
        } else {
          auto inner = restricted_minimize(obj, psi, cfg, x);
          b = std::move(inner.x);
          rec.inner_converged = inner.converged;
          rec.inner_iterations = inner.iterations;
        }
      }
      check_squarable(b, "proxy");
      rec.support = oracles.tail(g, b);
      NodeVector next = restrict_to(b, rec.support);
      double step = 0.0;
      for (std::size_t i = 0; i < n; ++i) step += (next[i] - x[i]) * (next[i] - x[i]);
      rec.step_norm = std::sqrt(step);
      rec.objective = obj.value(next);
      x = std::move(next);
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(iter) + ": " + e.what());
    }
    if (observe) observe(iter, x);
    SupportSet support = SupportSet::nonzero_entries(x, 0.0);
    run.trace.push_back(std::move(rec));
    run.iterations = iter;
    const double step = run.trace.back().step_norm;
    bool halt = false;
    switch (cfg.halting) {
      case Halting::SUPPORT_STABLE: halt = support == prev_support && step <= cfg.tol; break;
      case Halting::RESIDUAL: halt = step <= cfg.tol; break;
      case Halting::MAX_ITERS_ONLY: break;
    }
    prev_support = std::move(support);
    if (halt) break;
  }
  run.estimate = std::move(x);
  run.support = SupportSet::positive_entries(run.estimate, kSupportThreshold);
  run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace detail

/// Graph-IHT: x <- (x - eta grad_Omega f(x)) restricted to the tail support,
/// with Omega the head support of the gradient. Starts from x = 0.
inline SolverRun graph_iht(const Graph& g, const ScanObjective& obj, const SolverConfig& cfg,
                           std::optional<Oracles> oracles = std::nullopt,
                           const IterateObserver& observe = {}) {
  Oracles o = oracles ? *oracles : approximate_oracles(ModelParams::for_sparsity(cfg.k));
  return detail::run_solver(detail::Variant::IHT, g, obj, cfg, o, observe);
}

/// Graph-GHTP: like Graph-IHT, but minimizes f over the support of the
/// gradient step before the tail projection.
inline SolverRun graph_ghtp(const Graph& g, const ScanObjective& obj, const SolverConfig& cfg,
                            std::optional<Oracles> oracles = std::nullopt,
                            const IterateObserver& observe = {}) {
  Oracles o = oracles ? *oracles : approximate_oracles(ModelParams::for_sparsity(cfg.k));
  return detail::run_solver(detail::Variant::GHTP, g, obj, cfg, o, observe);
}

struct ConvergenceConstants {
  double alpha0 = 0.0;
  double beta0 = 0.0;        // delta (1 + c_head)
  double beta0_alt = 0.0;    // xi (1 + c_head); the two readings disagree
  double alpha = 0.0;
  double beta = 0.0;
  bool geometric = false;
};

/// Contraction constants of the estimation-error recursion
/// ||x^{i+1} - x*|| <= alpha ||x^i - x*|| + beta ||grad_I f(x*)||.
/// With exact_oracles set, alpha takes the reduced form
/// sqrt(2)/(1 - delta) ((2 - eta/xi) delta + 1 - eta/xi).
inline ConvergenceConstants convergence_constants(double c_head, double c_tail, double xi,
                                                  double delta, double eta,
                                                  bool exact_oracles = false) {
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("delta must lie in (0, 1), got " + std::to_string(delta));
  if (!(xi > 0.0)) throw DomainError("xi must be positive");
  ConvergenceConstants cc;
  cc.alpha0 = c_head * (1.0 - delta) - delta;
  if (!(cc.alpha0 > 0.0))
    throw DomainError("alpha0 = c_head(1 - delta) - delta = " + std::to_string(cc.alpha0) +
                      " is not positive");
  const double slack = 1.0 - cc.alpha0 * cc.alpha0;
  if (!(slack > 0.0)) throw DomainError("1 - alpha0^2 is not positive");
  cc.beta0 = delta * (1.0 + c_head);
  cc.beta0_alt = xi * (1.0 + c_head);
  const double r = (2.0 - eta / xi) * delta + 1.0 - eta / xi;
  const double root2 = std::sqrt(2.0);
  const double scale = (1.0 + c_tail) / (1.0 - delta);
  if (exact_oracles)
    cc.alpha = root2 / (1.0 - delta) * r;
  else
    cc.alpha = root2 * scale * (std::sqrt(slack) + r);
  cc.beta = scale * ((1.0 + 2.0 * root2) * xi + (2.0 - 2.0 * root2) * eta +
                     root2 * cc.beta0 / cc.alpha0 + root2 * cc.alpha0 * cc.beta0 / std::sqrt(slack));
  cc.geometric = cc.alpha < 1.0;
  return cc;
}

inline constexpr int kMaxProbeNodes = 16;

/// Empirical lower bound on the WRSC constant: the largest observed
/// ||x - y - xi (grad_S f(x) - grad_S f(y))|| / ||x - y|| over random S in
/// M(G,k) and x, y with entries uniform in [0,1] on S.
inline double wrsc_probe(const ScanObjective& obj, const Graph& g, int k, double xi, int trials,
                         std::uint64_t seed) {
  if (trials < 1) throw InputError("trials must be >= 1");
  if (g.num_nodes() > kMaxProbeNodes)
    throw CapacityError("wrsc_probe is limited to " + std::to_string(kMaxProbeNodes) + " nodes");
  if (obj.size() != static_cast<std::size_t>(g.num_nodes()))
    throw InputError("objective and graph sizes differ");
  const auto supports = enumerate_connected_subsets(g, k);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, supports.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = obj.size();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const SupportSet& s = supports[pick(rng)];
    NodeVector x(n, 0.0), y(n, 0.0);
    for (int i : s) x[static_cast<std::size_t>(i)] = unit(rng);
    for (int i : s) y[static_cast<std::size_t>(i)] = unit(rng);
    NodeVector gx = obj.gradient(x), gy = obj.gradient(y);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = x[i] - y[i];
      double r = d;
      if (s.contains(static_cast<int>(i))) r -= xi * (gx[i] - gy[i]);
      num += r * r;
      den += d * d;
    }
    if (den > 0.0) worst = std::max(worst, std::sqrt(num / den));
  }
  return worst;
}

}  // namespace gsp
