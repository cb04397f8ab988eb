#pragma once

#include <iosfwd>

namespace netcrop::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

/// Entry point of the `netcrop` tool. Streams are injectable for tests; the
/// edge list is read from `in` when --edges is "-" or absent.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace netcrop::cli
