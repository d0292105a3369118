#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netinfer::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

/// Runs the command line `args` (without the program name). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace netinfer::cli
