#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tubal::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;
inline constexpr int kSolver = 4;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "<n>" is an absolute count; "<fraction>f" is rounded against `total` entries.
/// Returns nullopt on malformed input.
std::optional<std::size_t> parse_card(const std::string& text, std::size_t total);

} // namespace tubal::cli
