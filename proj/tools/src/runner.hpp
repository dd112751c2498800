#pragma once

// Executes a parsed scenario document: runs its analysis, writes the result
// artifacts, and prints a short summary. Shared by the run/dc/tran/mc/tune/
// gate subcommands.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "unitrig/scenario.hpp"

namespace unitrig::cli {

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<GateKind> gate_kind;
};

struct RunConfig {
    std::string stem;  // artifact file name stem
    std::filesystem::path outdir;
    std::string format = "csv";  // "csv" or "json"
    RunOverrides overrides;
};

/// Returns the process exit code: 0 on success, 1 when a gate run decodes
/// against its truth table.
int execute_analysis(const ScenarioDoc& doc, const RunConfig& config, std::ostream& out);

/// Prints diagnostics to `err`, optionally as a JSON array.
void print_diagnostics(const std::vector<Diagnostic>& diagnostics, bool json, std::ostream& err);

}  // namespace unitrig::cli
