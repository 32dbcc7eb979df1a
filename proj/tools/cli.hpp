#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ddcalc::cli {

// Exit codes: 0 success, 1 usage, 2 domain/precondition, 3 tolerance or
// failed verification.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitTolerance = 3;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Shortest round-trip decimal; integral values keep a trailing ".0".
std::string format_number(double v);

}  // namespace ddcalc::cli
