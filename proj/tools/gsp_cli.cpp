// gsp: connected-subgraph detection from the command line.
//
//   gsp detect   --graph G.edges --signal S.nodes.csv --stat ems --k 15 --algo ghtp --out r.json
//   gsp simulate --topology grid --rows 20 --cols 20 --cluster-size 15 --seed 7 --out-prefix sim
//   gsp evaluate --truth sim.truth --detected r.json
//   gsp bench    --suite oracles --seed 1 --out oracles.csv
//
// Exit codes: 0 ok, 1 a bench threshold failed, 2 bad input, 3 dimension
// mismatch, 4 numeric failure.

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsp/gsp.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "gsp 1.0.0";

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw gsp::Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// SOURCE_DATE_EPOCH pins the timestamp so manifests can be reproduced exactly.
std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(env));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string& command, json config) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["generator"] = "std::mt19937_64";
  m["config"] = std::move(config);
  m["inputs"] = json::object();
  m["outputs"] = json::object();
  m["timestamp"] = timestamp();
  return m;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    gsp::io::write_text(out, text);
}

std::vector<std::string> ids_of(const gsp::SupportSet& s, const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  for (int v : s) out.push_back(ids[static_cast<std::size_t>(v)]);
  return out;
}

gsp::StatKind parse_stat(const std::string& s) {
  if (s == "ems") return gsp::StatKind::EMS;
  if (s == "kulldorff") return gsp::StatKind::KULLDORFF;
  if (s == "ebp") return gsp::StatKind::EBP;
  throw gsp::InputError("unknown statistic '" + s + "'");
}

// ---------------------------------------------------------------------------

struct DetectArgs {
  std::string graph, signal, stat = "ems", algo = "ghtp", out = "-";
  int k = 0;
  double eta = 1.0;
  int max_iters = 50;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

int cmd_detect(const DetectArgs& a) {
  if (a.k < 1) throw gsp::InputError("k must be >= 1, got " + std::to_string(a.k));
  const gsp::StatKind stat = parse_stat(a.stat);
  const gsp::AlgoKind algo = a.algo == "iht" ? gsp::AlgoKind::IHT : gsp::AlgoKind::GHTP;

  const std::string graph_text = gsp::io::read_text(a.graph);
  const std::string signal_text = gsp::io::read_text(a.signal);
  auto nodes = gsp::io::parse_node_table(signal_text, a.signal);
  auto edges = gsp::io::parse_edge_list(graph_text, a.graph);
  gsp::Graph g = gsp::io::build_graph(edges, nodes, a.graph);

  gsp::SolverConfig cfg;
  cfg.k = a.k;
  cfg.eta = a.eta;
  cfg.max_iters = a.max_iters;
  cfg.tol = a.tol;
  cfg.rng_seed = a.seed;
  cfg.validate();

  gsp::ScanObjective obj = gsp::make_objective(stat, nodes.c, nodes.b);
  gsp::SolverRun run = gsp::run_algorithm(algo, g, obj, cfg);
  gsp::SupportSet best = gsp::best_component(g, run.support, run.estimate);

  json config{{"stat", a.stat},
              {"k", a.k},
              {"algo", gsp::to_string(algo)},
              {"eta", a.eta},
              {"max_iters", a.max_iters},
              {"tol", a.tol},
              {"seed", a.seed},
              {"halting", gsp::to_string(cfg.halting)},
              {"inner_max_iters", cfg.inner_max_iters},
              {"inner_tol", cfg.inner_tol},
              {"baselines", nodes.b.empty() ? "default" : "file"}};
  json m = manifest("detect", std::move(config));
  m["inputs"]["graph"] = {{"path", a.graph}, {"sha256", sha256_hex(graph_text)}};
  m["inputs"]["signal"] = {{"path", a.signal}, {"sha256", sha256_hex(signal_text)}};
  m["outputs"]["result"] = a.out;
  m["node_ids"] = nodes.ids;

  json trace = json::array();
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    const auto& r = run.trace[i];
    trace.push_back({{"iteration", i + 1},
                     {"objective", r.objective},
                     {"step_norm", r.step_norm},
                     {"omega_size", r.omega.size()},
                     {"support_size", r.support.size()},
                     {"inner_converged", r.inner_converged},
                     {"inner_iterations", r.inner_iterations}});
  }

  json result;
  result["manifest"] = std::move(m);
  result["support"] = ids_of(best, nodes.ids);
  result["raw_support"] = ids_of(run.support, nodes.ids);
  result["estimate"] = run.estimate;
  result["score"] = obj.statistic(run.estimate);
  result["trace"] = std::move(trace);
  result["iterations"] = run.iterations;
  result["wall_time_s"] = run.wall_time;
  emit(a.out, result.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string topology = "grid", mode = "binary", out_prefix;
  int rows = 20, cols = 20, n = 100;
  double radius = 0.1;
  int cluster_size = 15;
  double mu = 3.0, noise = 0.0;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  gsp::SyntheticSpec spec;
  json topo;
  if (a.topology == "grid") {
    spec.topology = gsp::Topology::grid(a.rows, a.cols);
    topo = {{"kind", "grid"}, {"rows", a.rows}, {"cols", a.cols}};
  } else if (a.topology == "path") {
    spec.topology = gsp::Topology::path(a.n);
    topo = {{"kind", "path"}, {"n", a.n}};
  } else {
    spec.topology = gsp::Topology::random_geometric(a.n, a.radius);
    topo = {{"kind", "rgg"}, {"n", a.n}, {"radius", a.radius}};
  }
  if (a.cluster_size < 1) throw gsp::InputError("cluster size must be >= 1");
  spec.cluster_size = a.cluster_size;
  spec.mu = a.mu;
  spec.noise_flip_fraction = a.noise;
  spec.mode = a.mode == "continuous" ? gsp::SignalMode::CONTINUOUS : gsp::SignalMode::BINARY;
  spec.seed = a.seed;

  gsp::SyntheticInstance inst = gsp::generate_instance(spec);
  std::vector<std::string> ids;
  for (int v = 0; v < inst.graph.num_nodes(); ++v) ids.push_back(std::to_string(v));

  std::map<std::string, std::string> files{
      {"edges", gsp::io::edge_file_text(inst.graph, ids)},
      {"nodes", gsp::io::node_file_text(ids, inst.counts)},
      {"truth", ""}};
  for (int v : inst.truth) files["truth"] += ids[static_cast<std::size_t>(v)] + "\n";
  const std::map<std::string, std::string> paths{{"edges", a.out_prefix + ".edges"},
                                                 {"nodes", a.out_prefix + ".nodes.csv"},
                                                 {"truth", a.out_prefix + ".truth"}};

  json config{{"topology", topo},  {"cluster_size", a.cluster_size}, {"mu", a.mu},
              {"noise", a.noise},  {"mode", a.mode},                 {"seed", a.seed}};
  json m = manifest("simulate", std::move(config));
  for (const auto& [key, text] : files) {
    gsp::io::write_text(paths.at(key), text);
    m["outputs"][key] = {{"path", paths.at(key)}, {"sha256", sha256_hex(text)}};
  }
  m["num_nodes"] = inst.graph.num_nodes();
  m["num_edges"] = inst.graph.num_edges();
  gsp::io::write_text(a.out_prefix + ".manifest.json", m.dump(2) + "\n");
  std::cout << inst.graph.num_nodes() << " nodes, " << inst.graph.num_edges() << " edges, truth size "
            << inst.truth.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

// A node list, or a detect result (its "support" field).
std::vector<std::string> read_support(const std::string& path) {
  const std::string text = gsp::io::read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw gsp::InputError(path + ": " + e.what());
    }
    if (!j.contains("support") || !j["support"].is_array())
      throw gsp::InputError(path + ": no 'support' array");
    std::vector<std::string> out;
    for (const auto& v : j["support"]) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    return out;
  }
  return gsp::io::parse_id_list(text);
}

int cmd_evaluate(const std::string& truth_file, const std::string& detected_file, const std::string& out) {
  auto truth_ids = read_support(truth_file);
  auto detected_ids = read_support(detected_file);
  std::map<std::string, int> index;
  auto to_set = [&](const std::vector<std::string>& ids) {
    std::vector<int> v;
    for (const auto& id : ids) v.push_back(index.emplace(id, static_cast<int>(index.size())).first->second);
    return gsp::SupportSet(v);
  };
  gsp::SupportSet truth = to_set(truth_ids), detected = to_set(detected_ids);
  gsp::DetectionMetrics m = gsp::score_detection(truth, detected);
  std::size_t overlap = 0;
  for (int v : detected)
    if (truth.contains(v)) ++overlap;
  json j{{"precision", m.precision},       {"recall", m.recall},
         {"f_measure", m.f_measure},       {"truth_size", truth.size()},
         {"detected_size", detected.size()}, {"overlap", overlap}};
  emit(out, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_bench(const std::string& suite, std::uint64_t seed, const std::string& out, int threads) {
  const auto& names = gsp::bench::suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end())
    throw gsp::InputError("unknown suite '" + suite + "' (expected oracles, convergence, recovery or scaling)");
  gsp::bench::BenchOptions opt;
  opt.seed = seed;
  opt.threads = std::max(1, threads);
  gsp::bench::SuiteResult r = gsp::bench::run_suite(suite, opt);
  emit(out, r.table);
  for (const auto& c : r.checks)
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  if (!out.empty() && out != "-") {
    json m = manifest("bench", {{"suite", suite}, {"seed", seed}, {"threads", opt.threads}});
    m["outputs"]["table"] = {{"path", out}, {"sha256", sha256_hex(r.table)}};
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    m["checks"] = std::move(checks);
    gsp::io::write_text(out + ".manifest.json", m.dump(2) + "\n");
  }
  return r.passed() ? 0 : 1;
}

int default_threads() {
  if (const char* env = std::getenv("GSP_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const gsp::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const gsp::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const gsp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connected-subgraph detection with graph-structured sparsity"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  DetectArgs d;
  auto* detect = app.add_subcommand("detect", "Detect an anomalous connected subgraph");
  detect->add_option("--graph", d.graph, "Edge file")->required();
  detect->add_option("--signal", d.signal, "Node file (node,c[,b])")->required();
  detect->add_option("--stat", d.stat)->check(CLI::IsMember({"ems", "kulldorff", "ebp"}));
  detect->add_option("--k", d.k, "Sparsity")->required();
  detect->add_option("--algo", d.algo)->check(CLI::IsMember({"iht", "ghtp"}));
  detect->add_option("--eta", d.eta);
  detect->add_option("--max-iters", d.max_iters);
  detect->add_option("--tol", d.tol);
  detect->add_option("--seed", d.seed);
  detect->add_option("--out", d.out, "Result JSON ('-' for stdout)");

  SimulateArgs s;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic instance");
  simulate->add_option("--topology", s.topology)->check(CLI::IsMember({"grid", "path", "rgg"}));
  simulate->add_option("--rows", s.rows);
  simulate->add_option("--cols", s.cols);
  simulate->add_option("--n", s.n);
  simulate->add_option("--radius", s.radius);
  simulate->add_option("--cluster-size", s.cluster_size);
  simulate->add_option("--mu", s.mu);
  simulate->add_option("--noise", s.noise);
  simulate->add_option("--mode", s.mode)->check(CLI::IsMember({"binary", "continuous"}));
  simulate->add_option("--seed", s.seed);
  simulate->add_option("--out-prefix", s.out_prefix)->required();

  std::string truth_file, detected_file, eval_out = "-";
  auto* evaluate = app.add_subcommand("evaluate", "Score a detection against ground truth");
  evaluate->add_option("--truth", truth_file)->required();
  evaluate->add_option("--detected", detected_file)->required();
  evaluate->add_option("--out", eval_out);

  std::string suite, bench_out = "-";
  std::uint64_t bench_seed = 1;
  int threads = default_threads();
  auto* bench = app.add_subcommand("bench", "Run an acceptance suite");
  bench->add_option("--suite", suite, "oracles, convergence, recovery or scaling")->required();
  bench->add_option("--seed", bench_seed);
  bench->add_option("--out", bench_out, "Table output ('-' for stdout)");
  bench->add_option("--threads", threads, "Worker threads (default: $GSP_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*detect) return guarded([&] { return cmd_detect(d); });
  if (*simulate) return guarded([&] { return cmd_simulate(s); });
  if (*evaluate) return guarded([&] { return cmd_evaluate(truth_file, detected_file, eval_out); });
  return guarded([&] { return cmd_bench(suite, bench_seed, bench_out, threads); });
}
