#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "gsp/error.hpp"
#include "gsp/graph.hpp"
#include "gsp/pcst.hpp"
#include "gsp/projections.hpp"
#include "gsp/scan_statistics.hpp"
#include "gsp/solvers.hpp"
#include "gsp/synth.hpp"

namespace gsp::bench {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::string table;  // CSV; blocks separated by "# <name>" lines
  std::vector<Check> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

struct BenchOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  int scaling_repeats = 3;
  int k_sweep_repeats = 2;
};

/// Fixed decimals, for human-readable check details.
inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// 17 significant digits, enough to round-trip any double.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Table {
 public:
  explicit Table(const std::string& name, const std::string& header) {
    out_ << "# " << name << '\n' << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cols) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cols), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_same_v<T, bool>)
      return v ? "1" : "0";
    else if constexpr (std::is_floating_point_v<T>)
      return fmt(v);
    else if constexpr (std::is_integral_v<T>)
      return std::to_string(v);
    else
      return std::string(v);
  }
  std::ostringstream out_;
};

/// Independent stream per (seed, tag, trial).
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

inline Graph random_graph(std::mt19937_64& rng, int n, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return Graph(n, edges);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// ---------------------------------------------------------------------------
// Oracle guarantees: head and tail approximations against exhaustive search.

inline Check check_oracle_guarantees(const BenchOptions& opt, std::string& table, int trials = 240) {
  Table t("oracle_guarantees",
          "trial,n,m,k,head_size,head_norm_ratio,tail_size,tail_residual_ratio,ok");
  const double ch2 = 1.0 / 14.0, ct2 = 7.0;
  int violations = 0;
  double worst_head = std::numeric_limits<double>::infinity(), worst_tail = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    auto rng = stream(opt.seed, 1, static_cast<std::uint64_t>(trial));
    const int n = uniform_int(rng, 3, 12);
    const double density = std::uniform_real_distribution<double>(0.2, 0.6)(rng);
    Graph g = random_graph(rng, n, density);
    const int k = uniform_int(rng, 1, std::min(n, 4));
    NodeVector b(static_cast<std::size_t>(n), 0.0);
    switch (trial % 3) {
      case 0: {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& v : b) v = u(rng);
        break;
      }
      case 1: {
        std::normal_distribution<double> noise(0.0, 0.3);
        for (auto& v : b) v = noise(rng);
        const int center = uniform_int(rng, 0, n - 1);
        b[static_cast<std::size_t>(center)] += 3.0;
        for (int w : g.neighbors(center)) b[static_cast<std::size_t>(w)] += 2.0;
        break;
      }
      default: {
        std::exponential_distribution<double> e(1.0);
        for (auto& v : b) v = e(rng) * e(rng);
        break;
      }
    }
    const ModelParams p = ModelParams::for_sparsity(k);
    SupportSet head = head_approx(g, b, p);
    SupportSet tail = tail_approx(g, b, p);
    SupportSet best = project_exact(g, b, k);
    const double total = squared_norm(b);
    const double opt_mass = squared_norm_on(b, best);
    const double head_mass = squared_norm_on(b, head);
    double opt_res = 0.0, tail_res = 0.0;
    for (int i = 0; i < n; ++i) {
      double v2 = b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
      if (!best.contains(i)) opt_res += v2;
      if (!tail.contains(i)) tail_res += v2;
    }
    const double slack = 1e-12 * (1.0 + total);
    bool ok = head.size() <= static_cast<std::size_t>(p.head_budget) &&
              tail.size() <= static_cast<std::size_t>(p.tail_budget) &&
              head_mass >= ch2 * opt_mass - slack && tail_res <= ct2 * opt_res + slack;
    for (const auto& s : {head, tail})
      for (const auto& comp : connected_components(g, s))
        if (comp.empty()) ok = false;
    double head_ratio = opt_mass > 0.0 ? std::sqrt(head_mass / opt_mass) : 1.0;
    double tail_ratio = opt_res > 0.0 ? std::sqrt(tail_res / opt_res) : (tail_res > slack ? 1e300 : 0.0);
    worst_head = std::min(worst_head, head_ratio);
    worst_tail = std::max(worst_tail, tail_ratio);
    if (!ok) ++violations;
    t.row(trial, n, g.num_edges(), k, head.size(), head_ratio, tail.size(), tail_ratio, ok);
  }
  table += t.str();
  return {"oracle guarantees (head >= sqrt(1/14) opt, tail <= sqrt(7) opt, budgets 2k/5k)",
          violations == 0,
          std::to_string(trials) + " trials, " + std::to_string(violations) +
              " violations, min head ratio " + fmt(worst_head) + ", max tail ratio " + fmt(worst_tail)};
}

// ---------------------------------------------------------------------------
// PCST: GW objective within twice the exact optimum.

inline Check check_pcst_ratio(const BenchOptions& opt, std::string& table, int trials = 240) {
  Table t("pcst_ratio", "trial,n,m,gw_objective,exact_objective,ratio,ok");
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    auto rng = stream(opt.seed, 2, static_cast<std::uint64_t>(trial));
    const int n = uniform_int(rng, 1, 12);
    Graph g = random_graph(rng, n, std::uniform_real_distribution<double>(0.2, 0.6)(rng));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> prizes(static_cast<std::size_t>(n));
    std::vector<double> costs(static_cast<std::size_t>(g.num_edges()));
    if (trial % 2 == 0) {
      for (auto& x : prizes) x = u(rng) < 0.3 ? 0.0 : 5.0 * u(rng);
      for (auto& c : costs) c = 0.1 + 3.0 * u(rng);
    } else {
      for (auto& x : prizes) {
        double b = 2.0 * u(rng) - 1.0;
        x = b * b;
      }
      std::fill(costs.begin(), costs.end(), 0.25 + u(rng));
    }
    PcstInstance inst{g, prizes, costs};
    const double gw = pcst_gw(inst).objective;
    const double ex = pcst_exact(inst).objective;
    const bool ok = gw <= 2.0 * ex + 1e-9;
    const double ratio = ex > 0.0 ? gw / ex : (gw > 0.0 ? 1e300 : 1.0);
    worst = std::max(worst, ratio);
    if (!ok) ++violations;
    t.row(trial, n, g.num_edges(), gw, ex, ratio, ok);
  }
  table += t.str();
  return {"PCST GW objective <= 2 x exact optimum", violations == 0,
          std::to_string(trials) + " instances, " + std::to_string(violations) +
              " violations, worst ratio " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// Analytic gradients against central finite differences.

inline Check check_gradients(const BenchOptions& opt, std::string& table, int points = 50) {
  Table t("gradients", "statistic,point,max_abs_error,max_scaled_error,ok");
  const int n = 30;
  const double h = 1e-6;
  int failures = 0;
  double worst = 0.0;
  for (StatKind kind : {StatKind::EMS, StatKind::KULLDORFF, StatKind::EBP}) {
    auto rng = stream(opt.seed, 3, static_cast<std::uint64_t>(kind));
    NodeVector raw(n), base(n);
    if (kind == StatKind::EMS) {
      std::normal_distribution<double> z(0.0, 1.0);
      for (int i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = z(rng) + (i >= 10 && i < 16 ? 3.0 : 0.0);
    } else {
      for (auto& c : raw) c = uniform_int(rng, 0, 10);
      std::uniform_real_distribution<double> u(1.0, 5.0);
      for (auto& b : base) b = u(rng);
    }
    ScanObjective obj = make_objective(kind, raw, kind == StatKind::EMS ? NodeVector{} : base);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int pt = 0; pt < points; ++pt) {
      NodeVector x(n);
      for (auto& v : x) v = u(rng);
      NodeVector g = obj.gradient(x);
      double max_abs = 0.0, max_scaled = 0.0;
      for (int i = 0; i < n; ++i) {
        NodeVector xp = x, xm = x;
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        const double fd = (obj.value(xp) - obj.value(xm)) / (2.0 * h);
        const double err = std::abs(g[static_cast<std::size_t>(i)] - fd);
        max_abs = std::max(max_abs, err);
        max_scaled = std::max(max_scaled, err / std::max(1e-5 * std::abs(fd), 1e-8));
      }
      const bool ok = max_scaled <= 1.0;
      if (!ok) ++failures;
      worst = std::max(worst, max_scaled);
      t.row(std::string(to_string(kind)), pt, max_abs, max_scaled, ok);
    }
  }
  table += t.str();
  return {"gradients match central differences (rel 1e-5, abs floor 1e-8)", failures == 0,
          std::to_string(3 * points) + " points, " + std::to_string(failures) +
              " failures, worst error/tolerance " + fmt(worst)};
}

// ---------------------------------------------------------------------------

inline Check check_c_condition_values(std::string& table) {
  Table t("c_condition", "c_head,c_tail,value,expected");
  const double a = check_c_condition(std::sqrt(1.0 / 14.0), std::sqrt(7.0));
  const double b = check_c_condition(1.0, 1.0);
  t.row(std::sqrt(1.0 / 14.0), std::sqrt(7.0), static_cast<bool>(a), false);
  t.row(1.0, 1.0, static_cast<bool>(b), true);
  table += t.str();
  return {"c condition: false for (sqrt(1/14), sqrt(7)), true for (1, 1)", !a && b,
          std::string("stock constants -> ") + (a ? "true" : "false") + ", exact -> " +
              (b ? "true" : "false")};
}

// ---------------------------------------------------------------------------
// WRSC: sampled delta against the closed form for EMS.

inline Check check_wrsc(const BenchOptions& opt, std::string& table, int instances = 20,
                        int triples = 60) {
  Table t("wrsc", "instance,n,k,c_hat,xi,delta_hat,delta_formula,ok");
  int failures = 0, cases = 0;
  double worst = 0.0;
  const int k = 3;
  for (int inst = 0; inst < instances; ++inst) {
    auto rng = stream(opt.seed, 4, static_cast<std::uint64_t>(inst));
    const int n = uniform_int(rng, 6, 12);
    Graph g = inst % 2 == 0 ? build_topology(Topology::path(n), rng)
                            : random_graph(rng, n, std::uniform_real_distribution<double>(0.3, 0.6)(rng));
    // Draw counts until both xi values lie inside the formula's domain.
    NodeVector c;
    std::normal_distribution<double> z(0.0, 1.0);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      NodeVector raw(static_cast<std::size_t>(n));
      for (auto& v : raw) v = z(rng);
      raw[0] += 1.0;
      c = normalize_counts_ems(raw);
      double ch = ems_c_hat(c);
      if (0.5 < 2.0 * (1.0 - ch * ch)) break;
    }
    ScanObjective obj = ScanObjective::ems(c);
    const double ch = ems_c_hat(c);
    for (double xi : {0.25, 0.5}) {
      const double formula = wrsc_delta_ems(xi, ch);
      const double probe = wrsc_probe(obj, g, k, xi, triples, rng());
      const bool ok = probe <= formula + 1e-6;
      ++cases;
      if (!ok) ++failures;
      worst = std::max(worst, probe / formula);
      t.row(inst, n, k, ch, xi, probe, formula, ok);
    }
  }
  table += t.str();
  return {"EMS sampled WRSC delta <= closed-form delta + 1e-6", failures == 0,
          std::to_string(cases) + " (instance, xi) cases, " + std::to_string(failures) +
              " exceed the closed form, worst delta_hat/delta " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// Per-iteration contraction on the toy objective with exact projections.

inline Check check_contraction(const BenchOptions& opt, std::string& table, int trials = 60) {
  Table t("contraction", "trial,algo,n,k,delta_hat,alpha,iteration,error_before,error_after,ok");
  int failures = 0, steps = 0;
  for (int trial = 0; trial < trials; ++trial) {
    auto rng = stream(opt.seed, 5, static_cast<std::uint64_t>(trial));
    const int n = uniform_int(rng, 3, 12);
    Graph g = build_topology(Topology::path(n), rng);
    const int k = uniform_int(rng, 1, std::min(4, n));
    SupportSet truth = sample_connected_cluster(g, uniform_int(rng, 1, k), rng);
    NodeVector w(static_cast<std::size_t>(n), 0.0);
    std::uniform_real_distribution<double> mag(0.2, 2.0);
    for (int v : truth) w[static_cast<std::size_t>(v)] = (rng() % 2 ? 1.0 : -1.0) * mag(rng);
    ScanObjective obj = ScanObjective::toy_quadratic(w);
    const double delta_hat = wrsc_probe(obj, g, k, 1.0, 50, rng());
    // delta must lie strictly inside (0, 1); the identity Hessian gives 0.
    const double delta = std::max(delta_hat, 1e-9);
    const double alpha = convergence_constants(1.0, 1.0, 1.0, delta, 1.0).alpha;
    SolverConfig cfg;
    cfg.k = k;
    cfg.max_iters = 10;
    for (AlgoKind algo : {AlgoKind::IHT, AlgoKind::GHTP}) {
      double before = std::sqrt(squared_norm(w));
      auto observe = [&](int iter, std::span<const double> x) {
        double e = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) e += (x[i] - w[i]) * (x[i] - w[i]);
        const double after = std::sqrt(e);
        const bool ok = after <= alpha * before;
        ++steps;
        if (!ok) ++failures;
        t.row(trial, std::string(to_string(algo)), n, k, delta_hat, alpha, iter, before, after, ok);
        before = after;
      };
      if (algo == AlgoKind::IHT)
        graph_iht(g, obj, cfg, exact_oracles(k), observe);
      else
        graph_ghtp(g, obj, cfg, exact_oracles(k), observe);
    }
  }
  table += t.str();
  return {"toy objective contracts by alpha every iteration (exact projections)", failures == 0,
          std::to_string(steps) + " iterations checked, " + std::to_string(failures) + " failures"};
}

// ---------------------------------------------------------------------------
// Synthetic grid family: iterations to halt and recovery under flip noise.

inline SyntheticSpec grid_family(std::uint64_t seed, double noise) {
  SyntheticSpec spec;
  spec.topology = Topology::grid(20, 20);
  spec.cluster_size = 15;
  spec.mu = 3.0;
  spec.mode = SignalMode::BINARY;
  spec.noise_flip_fraction = noise;
  spec.seed = seed;
  return spec;
}

inline void trial_rows(Table& t, const std::string& label, const TrialTable& tt) {
  for (const auto& r : tt.trials)
    t.row(label, r.trial, r.seed, r.ok, r.iterations, r.metrics.precision, r.metrics.recall,
          r.metrics.f_measure);
}

inline Check check_iteration_count(const BenchOptions& opt, std::string& table, int trials = 20) {
  Table t("iterations", "noise,trial,seed,ok,iterations,precision,recall,f_measure");
  SolverConfig cfg;
  cfg.k = 15;
  TrialTable tt = run_trials(grid_family(opt.seed * 1000, 0.0), StatKind::EMS, AlgoKind::GHTP, cfg,
                             trials, opt.threads);
  trial_rows(t, "0", tt);
  table += t.str();
  const bool ok = tt.failures == 0 && tt.iterations.median <= 10.0;
  return {"GHTP/EMS on 20x20 grid halts within 10 iterations (median)", ok,
          "median iterations " + fmt(tt.iterations.median) + " over " + std::to_string(trials) +
              " seeds, " + std::to_string(tt.failures) + " failed runs"};
}

inline std::vector<Check> check_recovery(const BenchOptions& opt, std::string& table,
                                         int trials = 20) {
  Table t("recovery", "noise,trial,seed,ok,iterations,precision,recall,f_measure");
  Table s("recovery_summary", "noise,mean_precision,mean_recall,mean_f_measure,median_iterations,failures");
  SolverConfig cfg;
  cfg.k = 15;
  std::vector<double> f;
  int failures = 0;
  for (double noise : {0.0, 0.02, 0.04, 0.06, 0.08, 0.10}) {
    TrialTable tt = run_trials(grid_family(opt.seed * 1000, noise), StatKind::EMS, AlgoKind::GHTP,
                               cfg, trials, opt.threads);
    trial_rows(t, fmt(noise), tt);
    s.row(noise, tt.precision.mean, tt.recall.mean, tt.f_measure.mean, tt.iterations.median,
          tt.failures);
    f.push_back(tt.f_measure.mean);
    failures += tt.failures;
  }
  table += s.str();
  table += t.str();
  bool monotone = true;
  std::string curve;
  for (std::size_t i = 0; i < f.size(); ++i) {
    curve += (i ? " " : "") + fixed(f[i], 4);
    if (i > 0 && f[i] > f[i - 1] + 0.05) monotone = false;
  }
  return {{"mean F-measure >= 0.8 without noise", failures == 0 && f[0] >= 0.8,
           "mean F " + fmt(f[0]) + ", failed runs " + std::to_string(failures)},
          {"F-measure non-increasing in flip noise (0.05 slack per step)", monotone,
           "mean F over noise {0,.02,.04,.06,.08,.10}: " + curve}};
}

// ---------------------------------------------------------------------------
// Wall time of Graph-IHT against n and k.

inline std::vector<Check> check_scaling(const BenchOptions& opt, std::string& table,
                                        int repeats_n, int repeats_k) {
  SolverConfig cfg;
  cfg.max_iters = 10;
  cfg.halting = Halting::MAX_ITERS_ONLY;
  auto by_n = scalability_sweep({10000, 20000, 40000}, {50}, AlgoKind::IHT, cfg, 50, opt.seed,
                                repeats_n);
  std::vector<int> ks;
  for (int k = 50; k <= 1000; k += 50) ks.push_back(k);
  auto by_k = scalability_sweep({10000}, ks, AlgoKind::IHT, cfg, 50, opt.seed, repeats_k);
  std::string csv = "sweep,n,k,seconds,iterations,support_size\n";
  for (const auto& r : by_n)
    csv += "n," + std::to_string(r.n) + "," + std::to_string(r.k) + "," + fmt(r.seconds) + "," +
           std::to_string(r.iterations) + "," + std::to_string(r.support_size) + "\n";
  for (const auto& r : by_k)
    csv += "k," + std::to_string(r.n) + "," + std::to_string(r.k) + "," + fmt(r.seconds) + "," +
           std::to_string(r.iterations) + "," + std::to_string(r.support_size) + "\n";
  table += csv;
  double worst_doubling = 0.0;
  std::string ratios;
  for (std::size_t i = 1; i < by_n.size(); ++i) {
    double r = by_n[i].seconds / by_n[i - 1].seconds;
    worst_doubling = std::max(worst_doubling, r);
    ratios += (i > 1 ? ", " : "") + fixed(r, 3);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : by_k) {
    lo = std::min(lo, r.seconds);
    hi = std::max(hi, r.seconds);
  }
  return {{"IHT wall time per doubling of n <= 2.5x (path, k=50, 10 iterations)",
           worst_doubling <= 2.5, "ratios " + ratios},
          {"IHT wall time max/min over k in {50..1000} <= 3 (n=10000)", hi / lo <= 3.0,
           "max/min " + fixed(hi / lo, 3)}};
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"oracles", "convergence", "recovery", "scaling"};
  return names;
}

inline SuiteResult run_suite(const std::string& name, const BenchOptions& opt) {
  SuiteResult r;
  r.suite = name;
  if (name == "oracles") {
    r.checks.push_back(check_oracle_guarantees(opt, r.table));
    r.checks.push_back(check_pcst_ratio(opt, r.table));
    r.checks.push_back(check_gradients(opt, r.table));
    r.checks.push_back(check_c_condition_values(r.table));
  } else if (name == "convergence") {
    r.checks.push_back(check_wrsc(opt, r.table));
    r.checks.push_back(check_contraction(opt, r.table));
    r.checks.push_back(check_iteration_count(opt, r.table));
  } else if (name == "recovery") {
    for (auto& c : check_recovery(opt, r.table)) r.checks.push_back(std::move(c));
  } else if (name == "scaling") {
    for (auto& c : check_scaling(opt, r.table, opt.scaling_repeats, opt.k_sweep_repeats))
      r.checks.push_back(std::move(c));
  } else {
    throw InputError("unknown bench suite '" + name + "' (expected oracles, convergence, recovery or scaling)");
  }
  return r;
}

/// Drops one CSV column (by header name) from every block of a table.
inline std::string drop_column(const std::string& table, const std::string& column) {
  std::istringstream in(table);
  std::ostringstream out;
  std::string line;
  long drop = -1;
  bool expect_header = true;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      out << line << '\n';
      expect_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (expect_header) {
      drop = -1;
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] == column) drop = static_cast<long>(i);
      expect_header = false;
    }
    for (std::size_t i = 0, w = 0; i < cells.size(); ++i) {
      if (static_cast<long>(i) == drop) continue;
      out << (w++ ? "," : "") << cells[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gsp::bench
