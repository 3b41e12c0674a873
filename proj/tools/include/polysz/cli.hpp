#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polysz::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kHypothesis = 1;  // a mathematical precondition or hypothesis failed
constexpr int kUsage = 2;       // bad arguments, unparsable input, missing files

// args excludes the program name. Normal output goes to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Writes through a temporary file in the same directory followed by a rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace polysz::cli
