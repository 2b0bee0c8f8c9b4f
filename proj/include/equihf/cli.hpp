// Command-line front end. Exit codes: 0 all verdicts pass, 1 a verdict failed,
// 2 input or usage error.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace equihf {

inline constexpr const char* kReportSchema = "equihf-report/1";

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace equihf
