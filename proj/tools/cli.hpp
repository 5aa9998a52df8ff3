#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polpath::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4, kSelftestFailed = 5 };

/// Runs one CLI invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "0", "1.25", "pi", "pi/2", "3pi/4", "-pi/8" style angles (radians).
double parse_angle(const std::string& text);

}  // namespace polpath::cli
