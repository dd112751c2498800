#pragma once

// Output-file plumbing for the CLI: directory resolution and write-then-
// rename commits so an interrupted run never leaves a partial artifact.

#include <filesystem>
#include <string>

namespace unitrig::cli {

/// -o flag > UNITRIG_OUT_DIR environment variable > current directory.
std::filesystem::path resolve_outdir(const std::string& flag_value);

/// Writes `content` to <dir>/<name> atomically (temp file + rename).
/// Returns the final path.
std::filesystem::path commit_file(const std::filesystem::path& dir, const std::string& name,
                                  const std::string& content);

}  // namespace unitrig::cli
