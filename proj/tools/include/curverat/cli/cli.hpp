#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curverat::cli {

enum ExitCode : int { kOk = 0, kAssertion = 1, kUsage = 2, kIo = 3 };

// Runs one command line (program name excluded). Results go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

// lowercase hex SHA-256 of a file's bytes; throws on I/O failure
std::string sha256_file(const std::string& path);

}  // namespace curverat::cli
