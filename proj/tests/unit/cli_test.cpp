#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "netcrop_cli/cli.hpp"

namespace netcrop {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "netcrop");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("netcrop_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SimulateThenSelectRoundTrip) {
  const auto sim = invoke({"simulate", "--model", "sbm", "--n", "200", "--k", "3", "--alpha", "0.4", "--beta", "0.1",
                           "--seed", "5", "--quiet"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto sel = invoke({"select-blockmodel", "--kmax", "5", "--report", path("r.json"), "--quiet"}, sim.out);
  ASSERT_EQ(sel.code, 0) << sel.err;
  EXPECT_EQ(sel.out.rfind("winner\t", 0), 0u);
  const auto doc = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_TRUE(doc.contains("final_winner"));
  EXPECT_EQ(doc["candidates"].size(), 10u);
  EXPECT_EQ(doc["config"]["edges"], "-");
}

TEST_F(CliTest, EchoesPaperSplitForDblpSizedInput) {
  ASSERT_EQ(invoke({"simulate", "--model", "sbm", "--n", "4057", "--k", "2", "--mean-degree", "8", "--seed", "1",
                    "--out", path("g.txt"), "--quiet"})
                .code,
            0);
  const auto sel = invoke({"select-blockmodel", "--edges", path("g.txt"), "--kmax", "2", "--ptest", "0.02", "--reps",
                           "1", "--seed", "7", "--report", path("r.json"), "--quiet"});
  ASSERT_EQ(sel.code, 0) << sel.err;
  const auto doc = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(doc["config"]["o"], 3247);
  EXPECT_EQ(doc["config"]["s"], 3);
}

TEST_F(CliTest, ThreadCountLeavesReportUnchanged) {
  const auto sim = invoke({"simulate", "--model", "dcbm", "--n", "300", "--k", "2", "--alpha", "0.2", "--seed", "3"});
  ASSERT_EQ(sim.code, 0);
  std::string first;
  for (const char* threads : {"1", "8"}) {
    const auto sel = invoke({"tune-rsc", "--k", "2", "--tau-grid", "0,0.5,1", "--reps", "2", "--seed", "9",
                             "--threads", threads, "--report", path("r.json"), "--quiet"},
                            sim.out);
    ASSERT_EQ(sel.code, 0) << sel.err;
    const auto text = slurp(path("r.json"));
    if (first.empty()) {
      first = text;
    } else {
      EXPECT_EQ(text, first);
    }
  }
}

TEST_F(CliTest, TuneRscWritesLabels) {
  const auto sim = invoke({"simulate", "--model", "dcbm", "--n", "200", "--k", "2", "--alpha", "0.3", "--beta", "0.1",
                           "--seed", "4", "--quiet"});
  const auto sel = invoke({"tune-rsc", "--k", "2", "--tau-grid", "0:1:0.5", "--labels-out", path("l.csv"), "--report",
                           path("r.json"), "--quiet"},
                          sim.out);
  ASSERT_EQ(sel.code, 0) << sel.err;
  const auto doc = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(doc["candidates"].size(), 3u);
  std::istringstream labels(slurp(path("l.csv")));
  std::string line;
  int lines = 0;
  while (std::getline(labels, line)) ++lines;
  EXPECT_EQ(lines, 201);
}

TEST_F(CliTest, ConfigFileAndTimings) {
  const auto sim = invoke({"simulate", "--model", "rdpg", "--n", "200", "--d", "2", "--seed", "2", "--quiet"});
  std::ofstream(path("c.json")) << R"({"eigen": {"dense_threshold": 10}, "kmeans": {"restarts": 3}})";
  const auto ok = invoke({"select-rdpg", "--dmax", "3", "--config", path("c.json"), "--record-timings", "--report",
                          path("r.json"), "--quiet"},
                         sim.out);
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto doc = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_FALSE(doc["timings_ms"].empty());
  EXPECT_EQ(doc["config"]["eigen_dense_threshold"], 10);

  std::ofstream(path("bad.json")) << R"({"eigen": {"dense_treshold": 10}})";
  EXPECT_EQ(invoke({"select-rdpg", "--config", path("bad.json"), "--report", path("r.json"), "--quiet"}, sim.out).code, 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"select-blockmodel", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({"select-blockmodel", "--loss", "l1"}).code, 2);
  EXPECT_EQ(invoke({"select-blockmodel", "--ptest", "0.1", "--overlap", "5", "--subnets", "2", "--report",
                    path("r.json")},
                   "0 1\n")
                .code,
            2);
  EXPECT_EQ(invoke({"select-blockmodel", "--edges", path("missing.txt"), "--report", path("r.json")}).code, 3);
  EXPECT_EQ(invoke({"select-blockmodel", "--report", path("r.json")}, "0 1\n1 x\n").code, 3);
  EXPECT_EQ(invoke({"select-blockmodel", "--report", path("r.json")}, "-3 1\n").code, 3);
  EXPECT_EQ(invoke({"tune-rsc", "--tau-grid", "1:0:0.1"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, SimulateIsSeeded) {
  const auto a = invoke({"simulate", "--model", "latent", "--n", "80", "--d", "2", "--seed", "11", "--quiet"});
  const auto b = invoke({"simulate", "--model", "latent", "--n", "80", "--d", "2", "--seed", "11", "--quiet"});
  const auto c = invoke({"simulate", "--model", "latent", "--n", "80", "--d", "2", "--seed", "12", "--quiet"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(a.out.rfind("# nodes 80", 0), 0u);
}

}  // namespace
}  // namespace netcrop
