#include <limits>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "netcrop/report.hpp"

namespace netcrop {
namespace {

using Model = CandidateModel;

SelectionReport sample_report() {
  SelectionReport r;
  r.config = {{"pipeline", std::string("tune-rsc")},
              {"n", std::int64_t{10}},
              {"p_test", 0.1},
              {"seed", std::string("18446744073709551615")},
              {"tau_grid", std::vector<double>{0.5, 0.5, 1.0}},
              {"flag", true}};
  r.candidates = {Model::rsc(0.5), Model::rsc(0.5), Model::rsc(1.0)};
  r.repetitions = {{Model::rsc(0.5), {2.0, 2.0, std::numeric_limits<double>::infinity()}},
                   {Model::rsc(1.0), {3.0, 3.0, 1.5}}};
  r.final_winner = Model::rsc(0.5);
  r.warnings = {"repetition 0: RSC(tau=1): failed"};
  return r;
}

TEST(Report, KeyOrderAndValues) {
  const auto doc = nlohmann::ordered_json::parse(report_to_json(sample_report()));
  std::vector<std::string> keys;
  for (const auto& [key, value] : doc.items()) keys.push_back(key);
  EXPECT_EQ(keys, (std::vector<std::string>{"config", "candidates", "repetitions", "final_winner", "timings_ms", "warnings"}));
  EXPECT_EQ(doc["config"]["seed"], "18446744073709551615");
  EXPECT_EQ(doc["config"]["n"], 10);
  EXPECT_EQ(doc["config"]["flag"], true);
  EXPECT_EQ(doc["config"]["tau_grid"].size(), 3u);
  EXPECT_EQ(doc["candidates"].get<std::vector<std::string>>(),
            (std::vector<std::string>{"RSC(tau=0.5)", "RSC(tau=0.5)#1", "RSC(tau=1)"}));
  EXPECT_TRUE(doc["repetitions"][0]["losses"]["RSC(tau=1)"].is_null());
  EXPECT_EQ(doc["repetitions"][1]["winner"], "RSC(tau=1)");
  EXPECT_EQ(doc["repetitions"][1]["losses"]["RSC(tau=1)"], 1.5);
  EXPECT_EQ(doc["final_winner"], "RSC(tau=0.5)");
  EXPECT_TRUE(doc["timings_ms"].empty());
  EXPECT_EQ(doc["warnings"].size(), 1u);
}

TEST(Report, MeanLosses) {
  const auto means = sample_report().mean_losses();
  EXPECT_DOUBLE_EQ(means[0], 2.5);
  EXPECT_TRUE(std::isinf(means[2]));
}

TEST(Report, SerializationIsStable) {
  auto r = sample_report();
  r.timings_ms = {{"split", 1.25}};
  const auto text = report_to_json(r);
  EXPECT_EQ(text, report_to_json(r));
  EXPECT_NE(text.find("\"split\": 1.25"), std::string::npos);
}

}  // namespace
}  // namespace netcrop
