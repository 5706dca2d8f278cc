#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kstw::cli {

// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// "x1,x2,..." or "lo:hi:n" (n points, endpoints included).
std::vector<double> parse_grid(const std::string& text, const std::string& flag);

}  // namespace kstw::cli
