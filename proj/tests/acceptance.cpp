// Runs acceptance criteria 1-10 and prints one PASS/FAIL line per criterion.
// Exit status is nonzero if any criterion fails.
//
//   acceptance [--seed N] [--threads N]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "gsp/bench.hpp"

using namespace gsp;
using namespace gsp::bench;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome combine(const std::vector<Check>& checks) {
  Outcome o{true, ""};
  for (const auto& c : checks) {
    o.pass = o.pass && c.pass;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string(c.pass ? "" : "[failed] ") + c.detail;
  }
  return o;
}

int failures = 0;

void report(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s | %s | %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", id,
              title.c_str(), o.detail.c_str(), secs, budget_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  BenchOptions opt;
  opt.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    if (flag == "--seed") opt.seed = std::strtoull(argv[i + 1], nullptr, 10);
    else if (flag == "--threads") opt.threads = std::max(1, std::atoi(argv[i + 1]));
    else {
      std::fprintf(stderr, "unknown flag %s\n", argv[i]);
      return 2;
    }
  }

  // Tables in the order run_suite assembles them, for the determinism rerun.
  std::string oracles, convergence, recovery, scaling;
  std::vector<Check> oracle_checks(4), convergence_checks(3);

  report(1, "head/tail oracle guarantees on random graphs, zero violations", 60, [&] {
    oracle_checks[0] = check_oracle_guarantees(opt, oracles);
    return combine({oracle_checks[0]});
  });
  report(2, "GW objective <= 2 x exact optimum + 1e-9", 60, [&] {
    oracle_checks[1] = check_pcst_ratio(opt, oracles);
    return combine({oracle_checks[1]});
  });
  report(3, "analytic vs central-difference gradients (rel 1e-5, floor 1e-8)", 10, [&] {
    oracle_checks[2] = check_gradients(opt, oracles);
    return combine({oracle_checks[2]});
  });
  report(4, "EMS empirical WRSC delta <= closed-form delta + 1e-6", 60, [&] {
    convergence_checks[0] = check_wrsc(opt, convergence);
    return combine({convergence_checks[0]});
  });
  report(5, "per-iteration contraction with exact oracles on toy paths", 30, [&] {
    convergence_checks[1] = check_contraction(opt, convergence);
    return combine({convergence_checks[1]});
  });
  report(6, "GHTP/EMS median iterations-to-halt <= 10", 120, [&] {
    convergence_checks[2] = check_iteration_count(opt, convergence);
    return combine({convergence_checks[2]});
  });
  report(7, "recovery: mean F >= 0.8 at noise 0, non-increasing within 0.05", 300,
         [&] { return combine(check_recovery(opt, recovery)); });
  report(8, "IHT time per doubling of n <= 2.5, k-sweep max/min <= 3", 300, [&] {
    return combine(check_scaling(opt, scaling, opt.scaling_repeats, opt.k_sweep_repeats));
  });
  report(9, "c-condition false for stock constants, true for exact", 1, [&] {
    oracle_checks[3] = check_c_condition_values(oracles);
    return combine({oracle_checks[3]});
  });

  report(10, "same seed reproduces byte-identical suite tables", 300, [&] {
    Outcome o{true, ""};
    auto compare = [&](const std::string& name, const std::string& first, const std::string& second) {
      const bool same = first == second;
      o.pass = o.pass && same;
      o.detail += (o.detail.empty() ? "" : ", ") + name + (same ? " identical" : " DIFFERS");
    };
    BenchOptions single = opt;
    single.threads = 1;
    compare("oracles", oracles, run_suite("oracles", single).table);
    compare("convergence", convergence, run_suite("convergence", single).table);
    compare("recovery", recovery, run_suite("recovery", single).table);
    BenchOptions quick = single;
    quick.scaling_repeats = 1;
    quick.k_sweep_repeats = 1;
    compare("scaling (seconds column dropped)", drop_column(scaling, "seconds"),
            drop_column(run_suite("scaling", quick).table, "seconds"));
    return o;
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
