#pragma once

#include <iosfwd>
#include <string>

#include "netcrop/selection.hpp"

namespace netcrop {

/// Keys in fixed order: config, candidates, repetitions, final_winner,
/// timings_ms, warnings. Infinite losses are written as null.
std::string report_to_json(const SelectionReport& report, int indent = 2);
void write_report(std::ostream& out, const SelectionReport& report);

/// Display names, with "#i" appended to repeated names (duplicate tau values).
std::vector<std::string> candidate_labels(const SelectionReport& report);

}  // namespace netcrop
