#include "netcrop/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

namespace netcrop {

namespace {

using Json = nlohmann::ordered_json;

Json loss_value(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::vector<std::string> candidate_labels(const SelectionReport& report) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    std::string name = report.candidates[i].name();
    if (std::find(names.begin(), names.end(), name) != names.end()) name += "#" + std::to_string(i);
    names.push_back(std::move(name));
  }
  return names;
}

std::string report_to_json(const SelectionReport& report, int indent) {
  const auto names = candidate_labels(report);
  Json doc;
  Json config = Json::object();
  for (const auto& [key, value] : report.config) {
    std::visit([&](const auto& v) { config[key] = v; }, value);
  }
  doc["config"] = std::move(config);
  doc["candidates"] = names;
  Json reps = Json::array();
  for (const auto& rep : report.repetitions) {
    Json entry;
    const auto pos = std::find(report.candidates.begin(), report.candidates.end(), rep.winner) - report.candidates.begin();
    entry["winner"] = names[static_cast<std::size_t>(pos)];
    Json losses = Json::object();
    for (std::size_t c = 0; c < names.size(); ++c) losses[names[c]] = loss_value(rep.losses[c]);
    entry["losses"] = std::move(losses);
    reps.push_back(std::move(entry));
  }
  doc["repetitions"] = std::move(reps);
  doc["final_winner"] = report.final_winner.name();
  Json timings = Json::object();
  for (const auto& [phase, ms] : report.timings_ms) timings[phase] = ms;
  doc["timings_ms"] = std::move(timings);
  doc["warnings"] = report.warnings;
  return doc.dump(indent);
}

void write_report(std::ostream& out, const SelectionReport& report) { out << report_to_json(report) << '\n'; }

}  // namespace netcrop
