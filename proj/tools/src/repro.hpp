#pragma once

// Figure reproduction: runs the matching preset, writes plot-ready CSV, and
// emits a metrics JSON grading each reference number pass/fail.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace unitrig::cli {

std::vector<std::string> repro_figure_ids();

/// Returns 0 when every reference check passes, 1 otherwise.
/// Unknown figure ids are the caller's problem (checked against
/// repro_figure_ids() before dispatch).
int run_repro(const std::string& figure, const std::filesystem::path& outdir,
              std::optional<std::uint64_t> seed_override, std::optional<int> runs_override,
              std::ostream& out);

}  // namespace unitrig::cli
