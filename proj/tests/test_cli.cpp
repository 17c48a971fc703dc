#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gsp/io.hpp"
#include "gsp/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gsp_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }
  std::string read(const std::string& name) const { return gsp::io::read_text(path(name)); }

  Result run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && SOURCE_DATE_EPOCH=0 '" GSP_CLI_PATH "' " + args +
                            " > stdout.txt 2> stderr.txt";
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read("stdout.txt"), read("stderr.txt")};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DetectToyPicksHighestCount) {
  write("toy.edges", "left mid\nmid right\n");
  write("toy.csv", "node,c\nleft,1\nmid,2\nright,9\n");
  auto r = run("detect --graph toy.edges --signal toy.csv --stat ems --k 1 --out r.json");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(read("r.json"));
  EXPECT_EQ(j["support"], json::array({"right"}));
  for (const char* key : {"manifest", "support", "estimate", "score", "trace", "iterations", "wall_time_s"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["manifest"]["node_ids"], json::array({"left", "mid", "right"}));
  EXPECT_EQ(j["manifest"]["inputs"]["graph"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(j["manifest"]["timestamp"], "1970-01-01T00:00:00Z");
  EXPECT_EQ(j["trace"].size(), j["iterations"].get<std::size_t>());
}

TEST_F(Cli, DetectAllStatisticsOnSimulatedGrid) {
  ASSERT_EQ(run("simulate --topology grid --rows 15 --cols 15 --cluster-size 10 --seed 3 --out-prefix s").code, 0);
  for (std::string stat : {"ems", "kulldorff", "ebp"})
    for (std::string algo : {"iht", "ghtp"}) {
      auto r = run("detect --graph s.edges --signal s.nodes.csv --k 10 --stat " + stat + " --algo " + algo);
      ASSERT_EQ(r.code, 0) << r.err;
      json j = json::parse(r.out);
      EXPECT_FALSE(j["support"].empty()) << stat << " " << algo;
      EXPECT_EQ(j["estimate"].size(), 225u);
    }
}

TEST_F(Cli, ExitCodes) {
  write("bad.edges", "a b\na b c\n");
  write("ok.edges", "a b\n");
  write("ghost.edges", "a b\nb ghost\n");
  write("n.csv", "node,c\na,1\nb,2\n");
  write("neg.csv", "node,c\na,-1\nb,2\n");
  write("huge.csv", "node,c,b\na,1e308,1e-300\nb,1e308,1e-300\n");
  write("badnum.csv", "node,c\na,1\nb,two\n");

  auto r = run("detect --graph bad.edges --signal n.csv --k 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.edges:2"), std::string::npos) << r.err;
  EXPECT_EQ(run("detect --graph ok.edges --signal n.csv --k 0").code, 2);
  EXPECT_EQ(run("detect --graph ok.edges --signal badnum.csv --k 1").code, 2);
  EXPECT_EQ(run("detect --graph ok.edges --signal neg.csv --k 1 --stat kulldorff").code, 2);
  EXPECT_EQ(run("detect --graph missing.edges --signal n.csv --k 1").code, 2);
  EXPECT_EQ(run("detect --graph ok.edges --signal n.csv --k 1 --stat nope").code, 2);
  EXPECT_EQ(run("detect --graph ghost.edges --signal n.csv --k 1").code, 3);
  EXPECT_EQ(run("detect --graph ok.edges --signal huge.csv --k 1 --stat ebp").code, 4);
  EXPECT_EQ(run("bench --suite nope").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, SimulateGridDeterministic) {
  ASSERT_EQ(run("simulate --topology grid --rows 20 --cols 20 --cluster-size 15 --seed 5 --out-prefix a").code, 0);
  ASSERT_EQ(run("simulate --topology grid --rows 20 --cols 20 --cluster-size 15 --seed 5 --out-prefix b").code, 0);
  for (const char* ext : {".edges", ".nodes.csv", ".truth"}) EXPECT_EQ(read(std::string("a") + ext), read(std::string("b") + ext));
  EXPECT_EQ(gsp::io::parse_edge_list(read("a.edges"), "a").edges.size(), 760u);
  EXPECT_EQ(gsp::io::parse_node_table(read("a.nodes.csv"), "a").ids.size(), 400u);
  json m = json::parse(read("a.manifest.json"));
  EXPECT_EQ(m["command"], "simulate");
  EXPECT_EQ(m["config"]["seed"], 5);
}

TEST_F(Cli, SimulateFullNoiseFlipsReports) {
  ASSERT_EQ(run("simulate --seed 2 --noise 0 --out-prefix clean").code, 0);
  ASSERT_EQ(run("simulate --seed 2 --noise 1 --out-prefix flip").code, 0);
  auto a = gsp::io::parse_node_table(read("clean.nodes.csv"), "a");
  auto b = gsp::io::parse_node_table(read("flip.nodes.csv"), "b");
  ASSERT_EQ(a.c.size(), b.c.size());
  for (std::size_t i = 0; i < a.c.size(); ++i) EXPECT_EQ(b.c[i], 1.0 - a.c[i]);
}

// Files written by simulate parse back into the in-memory instance, field by field.
TEST_F(Cli, SimulateRoundTrip) {
  struct Case {
    std::string args;
    gsp::SyntheticSpec spec;
  };
  std::vector<Case> cases(3);
  cases[0].args = "--topology grid --rows 8 --cols 11 --cluster-size 9 --mu 2.5 --mode continuous --seed 21";
  cases[0].spec.topology = gsp::Topology::grid(8, 11);
  cases[0].spec.cluster_size = 9;
  cases[0].spec.mu = 2.5;
  cases[0].spec.mode = gsp::SignalMode::CONTINUOUS;
  cases[0].spec.seed = 21;
  cases[1].args = "--topology path --n 50 --cluster-size 6 --noise 0.1 --seed 4";
  cases[1].spec.topology = gsp::Topology::path(50);
  cases[1].spec.cluster_size = 6;
  cases[1].spec.noise_flip_fraction = 0.1;
  cases[1].spec.seed = 4;
  cases[2].args = "--topology rgg --n 120 --radius 0.2 --cluster-size 12 --mode continuous --seed 8";
  cases[2].spec.topology = gsp::Topology::random_geometric(120, 0.2);
  cases[2].spec.cluster_size = 12;
  cases[2].spec.mode = gsp::SignalMode::CONTINUOUS;
  cases[2].spec.seed = 8;

  for (const auto& c : cases) {
    ASSERT_EQ(run("simulate " + c.args + " --out-prefix rt").code, 0) << c.args;
    auto inst = gsp::generate_instance(c.spec);
    auto nodes = gsp::io::parse_node_table(read("rt.nodes.csv"), "n");
    gsp::Graph g = gsp::io::build_graph(gsp::io::parse_edge_list(read("rt.edges"), "e"), nodes, "e");
    EXPECT_EQ(g.num_nodes(), inst.graph.num_nodes());
    EXPECT_TRUE(std::ranges::equal(g.edges(), inst.graph.edges()));
    EXPECT_EQ(nodes.c, inst.counts);
    std::vector<int> truth;
    for (const auto& id : gsp::io::parse_id_list(read("rt.truth"))) truth.push_back(nodes.index.at(id));
    EXPECT_EQ(gsp::SupportSet(truth), inst.truth);
  }
}

TEST_F(Cli, EvaluateExamples) {
  write("t.txt", "a\nb\nc\n");
  write("same.txt", "c\nb\na\n");
  write("other.txt", "x\ny\n");
  std::string truth, det;
  for (int i = 0; i < 15; ++i) truth += "n" + std::to_string(i) + "\n";
  for (int i = 6; i < 16; ++i) det += "n" + std::to_string(i) + "\n";
  write("t15.txt", truth);
  write("d10.txt", det);

  auto same = run("evaluate --truth t.txt --detected same.txt");
  ASSERT_EQ(same.code, 0) << same.err;
  EXPECT_EQ(json::parse(same.out)["f_measure"], 1.0);
  EXPECT_EQ(json::parse(run("evaluate --truth t.txt --detected other.txt").out)["f_measure"], 0.0);
  json m = json::parse(run("evaluate --truth t15.txt --detected d10.txt").out);
  EXPECT_NEAR(m["precision"].get<double>(), 0.9, 1e-15);
  EXPECT_NEAR(m["recall"].get<double>(), 0.6, 1e-15);
  EXPECT_NEAR(m["f_measure"].get<double>(), 0.72, 1e-15);
}

TEST_F(Cli, EvaluateReadsDetectOutput) {
  ASSERT_EQ(run("simulate --seed 1 --out-prefix s").code, 0);
  ASSERT_EQ(run("detect --graph s.edges --signal s.nodes.csv --k 15 --out r.json").code, 0);
  auto r = run("evaluate --truth s.truth --detected r.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GE(json::parse(r.out)["f_measure"].get<double>(), 0.8);
}

TEST_F(Cli, BenchOraclesPassesAndIsRepeatable) {
  auto a = run("bench --suite oracles --seed 1 --threads 2 --out a.csv");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(run("bench --suite oracles --seed 1 --threads 1 --out b.csv").code, 0);
  EXPECT_EQ(read("a.csv"), read("b.csv"));
  EXPECT_NE(a.err.find("PASS"), std::string::npos);
  json m = json::parse(read("a.csv.manifest.json"));
  EXPECT_EQ(m["config"]["suite"], "oracles");
}
