#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sslab::cli {

// Exit codes: 0 success, 1 internal error, 2 audit findings, 3 inconclusive,
// 64 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitFindings = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kExitUsage = 64;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sslab::cli
