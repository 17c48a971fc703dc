#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gsp/error.hpp"
#include "gsp/graph.hpp"
#include "gsp/scan_statistics.hpp"
#include "gsp/solvers.hpp"

namespace gsp {

enum class TopologyKind { GRID, PATH, RANDOM_GEOMETRIC };

struct Topology {
  TopologyKind kind = TopologyKind::GRID;
  int rows = 0;
  int cols = 0;
  int n = 0;  // PATH and RANDOM_GEOMETRIC
  double radius = 0.0;

  static Topology grid(int rows, int cols) { return {TopologyKind::GRID, rows, cols, 0, 0.0}; }
  static Topology path(int n) { return {TopologyKind::PATH, 0, 0, n, 0.0}; }
  static Topology random_geometric(int n, double radius) {
    return {TopologyKind::RANDOM_GEOMETRIC, 0, 0, n, radius};
  }
  int num_nodes() const { return kind == TopologyKind::GRID ? rows * cols : n; }
};

enum class SignalMode { CONTINUOUS, BINARY };

struct SyntheticSpec {
  Topology topology = Topology::grid(20, 20);
  int cluster_size = 15;
  double mu = 3.0;
  double noise_flip_fraction = 0.0;
  SignalMode mode = SignalMode::BINARY;
  std::uint64_t seed = 0;
};

struct SyntheticInstance {
  Graph graph;
  NodeVector counts;
  SupportSet truth;
};

inline Graph build_topology(const Topology& t, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> edges;
  switch (t.kind) {
    case TopologyKind::GRID: {
      if (t.rows < 1 || t.cols < 1) throw InputError("grid dimensions must be positive");
      for (int r = 0; r < t.rows; ++r)
        for (int c = 0; c < t.cols; ++c) {
          int v = r * t.cols + c;
          if (c + 1 < t.cols) edges.emplace_back(v, v + 1);
          if (r + 1 < t.rows) edges.emplace_back(v, v + t.cols);
        }
      return Graph(t.rows * t.cols, edges);
    }
    case TopologyKind::PATH: {
      if (t.n < 1) throw InputError("path length must be positive");
      edges.reserve(static_cast<std::size_t>(t.n));
      for (int i = 0; i + 1 < t.n; ++i) edges.emplace_back(i, i + 1);
      return Graph(t.n, edges);
    }
    case TopologyKind::RANDOM_GEOMETRIC: {
      if (t.n < 1) throw InputError("node count must be positive");
      if (!(t.radius > 0.0)) throw InputError("radius must be positive");
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> px(static_cast<std::size_t>(t.n)), py(px);
      for (int i = 0; i < t.n; ++i) {
        px[static_cast<std::size_t>(i)] = unit(rng);
        py[static_cast<std::size_t>(i)] = unit(rng);
      }
      // Bucket points into cells of side >= radius; neighbors lie in adjacent cells.
      const int cells = std::max(1, std::min(t.n, static_cast<int>(1.0 / t.radius)));
      auto cell_of = [&](double v) { return std::min(cells - 1, static_cast<int>(v * cells)); };
      std::vector<std::vector<int>> bucket(static_cast<std::size_t>(cells * cells));
      for (int i = 0; i < t.n; ++i)
        bucket[static_cast<std::size_t>(cell_of(py[static_cast<std::size_t>(i)]) * cells +
                                        cell_of(px[static_cast<std::size_t>(i)]))]
            .push_back(i);
      const double r2 = t.radius * t.radius;
      for (int i = 0; i < t.n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        int cx = cell_of(px[si]), cy = cell_of(py[si]);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) continue;
            for (int j : bucket[static_cast<std::size_t>(ny * cells + nx)]) {
              if (j <= i) continue;
              const auto sj = static_cast<std::size_t>(j);
              double ddx = px[si] - px[sj], ddy = py[si] - py[sj];
              if (ddx * ddx + ddy * ddy <= r2) edges.emplace_back(i, j);
            }
          }
      }
      std::sort(edges.begin(), edges.end());
      return Graph(t.n, edges);
    }
  }
  throw InputError("unknown topology");
}

/// Connected set of exactly `size` nodes grown from a uniform start node by
/// repeatedly adding a uniformly chosen frontier node. Restarts from a new
/// start node when the start's component is too small.
inline SupportSet sample_connected_cluster(const Graph& g, int size, std::mt19937_64& rng) {
  const int n = g.num_nodes();
  if (size < 1 || size > n)
    throw InputError("cluster size must lie in [1, " + std::to_string(n) + "], got " +
                     std::to_string(size));
  std::uniform_int_distribution<int> start_dist(0, n - 1);
  std::vector<std::uint8_t> state(static_cast<std::size_t>(n), 0);  // 1 member, 2 frontier
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::fill(state.begin(), state.end(), 0);
    std::vector<int> members, frontier;
    auto add = [&](int v) {
      state[static_cast<std::size_t>(v)] = 1;
      members.push_back(v);
      for (int w : g.neighbors(v))
        if (state[static_cast<std::size_t>(w)] == 0) {
          state[static_cast<std::size_t>(w)] = 2;
          frontier.push_back(w);
        }
    };
    add(start_dist(rng));
    while (static_cast<int>(members.size()) < size && !frontier.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
      std::size_t j = pick(rng);
      int v = frontier[j];
      frontier[j] = frontier.back();
      frontier.pop_back();
      add(v);
    }
    if (static_cast<int>(members.size()) == size) return SupportSet(std::move(members));
  }
  throw InputError("could not grow a connected cluster of " + std::to_string(size) + " nodes");
}

inline SyntheticInstance generate_instance(const SyntheticSpec& spec) {
  if (!std::isfinite(spec.mu)) throw InputError("mu must be finite");
  if (!(spec.noise_flip_fraction >= 0.0 && spec.noise_flip_fraction <= 1.0))
    throw InputError("noise fraction must lie in [0, 1]");
  const int n = spec.topology.num_nodes();
  if (spec.cluster_size > n)
    throw InputError("cluster size " + std::to_string(spec.cluster_size) + " exceeds node count " +
                     std::to_string(n));
  std::mt19937_64 rng(spec.seed);
  Graph g = build_topology(spec.topology, rng);
  SupportSet truth = sample_connected_cluster(g, spec.cluster_size, rng);
  NodeVector counts(static_cast<std::size_t>(n), 0.0);
  if (spec.mode == SignalMode::CONTINUOUS) {
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int v : truth) counts[static_cast<std::size_t>(v)] = spec.mu;
    for (auto& c : counts) c += noise(rng);
  } else {
    for (int v : truth) counts[static_cast<std::size_t>(v)] = 1.0;
    const auto flips = static_cast<std::size_t>(std::llround(spec.noise_flip_fraction * n));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = 0; i < flips; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
      std::swap(order[i], order[pick(rng)]);
      auto& c = counts[static_cast<std::size_t>(order[i])];
      c = 1.0 - c;
    }
  }
  return {std::move(g), std::move(counts), std::move(truth)};
}

/// Baselines for the Poisson statistics: the global mean count for EBP and
/// the constant 1 for Kulldorff.
inline NodeVector default_baselines(StatKind kind, std::span<const double> counts) {
  if (kind == StatKind::EBP) {
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean = counts.empty() ? 0.0 : mean / static_cast<double>(counts.size());
    return NodeVector(counts.size(), mean);
  }
  return NodeVector(counts.size(), 1.0);
}

inline ScanObjective make_objective(StatKind kind, std::span<const double> counts,
                                    std::span<const double> baselines = {}) {
  NodeVector c(counts.begin(), counts.end());
  switch (kind) {
    case StatKind::EMS: return ScanObjective::ems(normalize_counts_ems(c));
    case StatKind::TOY_QUADRATIC: return ScanObjective::toy_quadratic(std::move(c));
    case StatKind::KULLDORFF:
    case StatKind::EBP: {
      NodeVector b = baselines.empty() ? default_baselines(kind, c)
                                       : NodeVector(baselines.begin(), baselines.end());
      return kind == StatKind::EBP ? ScanObjective::ebp(std::move(c), std::move(b))
                                   : ScanObjective::kulldorff(std::move(c), std::move(b));
    }
  }
  throw InputError("unknown statistic");
}

struct DetectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

inline DetectionMetrics score_detection(const SupportSet& truth, const SupportSet& detected) {
  std::size_t overlap = 0;
  for (int v : detected)
    if (truth.contains(v)) ++overlap;
  DetectionMetrics m;
  if (!detected.empty()) m.precision = static_cast<double>(overlap) / static_cast<double>(detected.size());
  if (!truth.empty()) m.recall = static_cast<double>(overlap) / static_cast<double>(truth.size());
  if (m.precision + m.recall > 0.0)
    m.f_measure = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

/// The connected component of `support` with the largest total estimate
/// (ties to the component with the smallest member).
inline SupportSet best_component(const Graph& g, const SupportSet& support,
                                 std::span<const double> estimate) {
  SupportSet best;
  double best_mass = -std::numeric_limits<double>::infinity();
  for (auto& comp : connected_components(g, support)) {
    double mass = 0.0;
    for (int v : comp) mass += estimate[static_cast<std::size_t>(v)];
    if (mass > best_mass) {
      best_mass = mass;
      best = std::move(comp);
    }
  }
  return best;
}

enum class AlgoKind { IHT, GHTP };

inline const char* to_string(AlgoKind a) { return a == AlgoKind::IHT ? "iht" : "ghtp"; }

inline SolverRun run_algorithm(AlgoKind algo, const Graph& g, const ScanObjective& obj,
                               const SolverConfig& cfg) {
  return algo == AlgoKind::IHT ? graph_iht(g, obj, cfg) : graph_ghtp(g, obj, cfg);
}

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  DetectionMetrics metrics;
  int iterations = 0;
  double wall_time = 0.0;
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population
};

inline Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(v.size()));
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  s.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  return s;
}

struct TrialTable {
  std::vector<TrialResult> trials;
  Summary precision, recall, f_measure, iterations, wall_time;
  int failures = 0;
};

/// Runs one solver per trial on instances seeded spec.seed + trial. Trials
/// may run on several threads; results are aggregated in trial order.
inline TrialTable run_trials(const SyntheticSpec& spec, StatKind stat, AlgoKind algo,
                             const SolverConfig& cfg, int n_trials, int threads = 1) {
  if (n_trials < 1) throw InputError("n_trials must be >= 1");
  TrialTable table;
  table.trials.resize(static_cast<std::size_t>(n_trials));
  auto one = [&](int t) {
    TrialResult& r = table.trials[static_cast<std::size_t>(t)];
    r.trial = t;
    r.seed = spec.seed + static_cast<std::uint64_t>(t);
    try {
      SyntheticSpec s = spec;
      s.seed = r.seed;
      SyntheticInstance inst = generate_instance(s);
      ScanObjective obj = make_objective(stat, inst.counts);
      SolverRun run = run_algorithm(algo, inst.graph, obj, cfg);
      SupportSet detected = best_component(inst.graph, run.support, run.estimate);
      r.metrics = score_detection(inst.truth, detected);
      r.iterations = run.iterations;
      r.wall_time = run.wall_time;
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  };
  threads = std::clamp(threads, 1, n_trials);
  if (threads == 1) {
    for (int t = 0; t < n_trials; ++t) one(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int t = next++; t < n_trials; t = next++) one(t);
      });
    for (auto& th : pool) th.join();
  }
  std::vector<double> p, r, f, it, wt;
  for (const auto& tr : table.trials) {
    if (!tr.ok) {
      ++table.failures;
      continue;
    }
    p.push_back(tr.metrics.precision);
    r.push_back(tr.metrics.recall);
    f.push_back(tr.metrics.f_measure);
    it.push_back(tr.iterations);
    wt.push_back(tr.wall_time);
  }
  table.precision = summarize(p);
  table.recall = summarize(r);
  table.f_measure = summarize(f);
  table.iterations = summarize(it);
  table.wall_time = summarize(wt);
  return table;
}

struct TimingRow {
  int n = 0;
  int k = 0;
  double seconds = 0.0;
  int iterations = 0;
  std::size_t support_size = 0;
};

/// Solver wall time per (n, k) on path graphs with a planted binary cluster.
/// Each cell keeps the fastest of `repeats` runs.
inline std::vector<TimingRow> scalability_sweep(const std::vector<int>& sizes,
                                                const std::vector<int>& k_values, AlgoKind algo,
                                                SolverConfig cfg, int cluster_size = 50,
                                                std::uint64_t seed = 0, int repeats = 1,
                                                StatKind stat = StatKind::EMS) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw InputError("sizes must be ascending");
  std::vector<TimingRow> rows;
  for (int n : sizes) {
    SyntheticSpec spec;
    spec.topology = Topology::path(n);
    spec.cluster_size = std::min(cluster_size, n);
    spec.mode = SignalMode::BINARY;
    spec.seed = seed;
    SyntheticInstance inst = generate_instance(spec);
    ScanObjective obj = make_objective(stat, inst.counts);
    for (int k : k_values) {
      cfg.k = k;
      TimingRow row{n, k, std::numeric_limits<double>::infinity(), 0, 0};
      for (int rep = 0; rep < std::max(1, repeats); ++rep) {
        SolverRun run = run_algorithm(algo, inst.graph, obj, cfg);
        row.seconds = std::min(row.seconds, run.wall_time);
        row.iterations = run.iterations;
        row.support_size = run.support.size();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace gsp
