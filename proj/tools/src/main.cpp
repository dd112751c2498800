#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "output.hpp"
#include "presets.hpp"
#include "repro.hpp"
#include "runner.hpp"
#include "unitrig/scenario.hpp"

namespace {

using namespace unitrig;
using namespace unitrig::cli;

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
    std::string scenario_path;
    std::string preset;
    std::string outdir;
    std::string format = "csv";
    bool json_diag = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_format = true) {
    cmd->add_option("scenario", args.scenario_path, "scenario file (.scn)");
    cmd->add_option("--preset", args.preset, "built-in scenario preset");
    cmd->add_option("-o,--out", args.outdir, "output directory (default: $UNITRIG_OUT_DIR or .)");
    if (with_format) {
        cmd->add_option("--format", args.format, "primary artifact format")
            ->check(CLI::IsMember({"csv", "json"}));
    }
    cmd->add_flag("--json-diag", args.json_diag, "print diagnostics as JSON");
}

std::string list_presets() {
    std::string names;
    for (const std::string& name : preset_names()) {
        names += names.empty() ? name : ", " + name;
    }
    return names;
}

/// Resolves the scenario text and artifact stem, or reports a usage error.
int load_text(const CommonArgs& args, std::string& text, std::string& stem) {
    if (!args.preset.empty() && !args.scenario_path.empty()) {
        std::cerr << "error: give either a scenario file or --preset, not both\n";
        return kExitUsage;
    }
    if (!args.preset.empty()) {
        const std::optional<std::string> preset = preset_text(args.preset);
        if (!preset.has_value()) {
            std::cerr << "error: unknown preset \"" << args.preset
                      << "\"; valid presets: " << list_presets() << "\n";
            return kExitUsage;
        }
        text = *preset;
        stem = args.preset;
        return kExitOk;
    }
    if (args.scenario_path.empty()) {
        std::cerr << "error: a scenario file or --preset is required\n";
        return kExitUsage;
    }
    std::ifstream in(args.scenario_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read scenario file \"" << args.scenario_path << "\"\n";
        return kExitUsage;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
    stem = std::filesystem::path(args.scenario_path).stem().string();
    return kExitOk;
}

/// Parses and validates; prints diagnostics. Returns kExitOk only when the
/// document is runnable.
int load_doc(const CommonArgs& args, ScenarioDoc& doc) {
    std::string text;
    std::string stem;
    if (const int rc = load_text(args, text, stem); rc != kExitOk) {
        return rc;
    }
    ParseResult parsed = parse_scenario(text);
    std::vector<Diagnostic> diagnostics = std::move(parsed.diagnostics);
    if (parsed.doc.has_value()) {
        std::vector<Diagnostic> more = validate_scenario(*parsed.doc);
        diagnostics.insert(diagnostics.end(), more.begin(), more.end());
    }
    if (!diagnostics.empty()) {
        print_diagnostics(diagnostics, args.json_diag, std::cerr);
    }
    if (!parsed.doc.has_value() || has_errors(diagnostics)) {
        return kExitDiagnostics;
    }
    doc = std::move(*parsed.doc);
    return kExitOk;
}

template <typename Request>
bool analysis_is(const ScenarioDoc& doc) {
    return std::holds_alternative<Request>(doc.analysis);
}

int run_checked(const CommonArgs& args, const RunOverrides& overrides,
                const char* required_type) {
    ScenarioDoc doc;
    if (const int rc = load_doc(args, doc); rc != kExitOk) {
        return rc;
    }
    if (required_type != nullptr) {
        const bool match = (std::string(required_type) == "dc_sweep" &&
                            analysis_is<DcSweepRequest>(doc)) ||
                           (std::string(required_type) == "transient" &&
                            analysis_is<TransientRequest>(doc)) ||
                           (std::string(required_type) == "monte_carlo" &&
                            analysis_is<MonteCarloRequest>(doc)) ||
                           (std::string(required_type) == "tunability" &&
                            analysis_is<TunabilityRequest>(doc)) ||
                           (std::string(required_type) == "gate" && analysis_is<GateRequest>(doc));
        if (!match) {
            std::cerr << "error: this subcommand needs a scenario with a " << required_type
                      << " analysis (use `run` for any analysis type)\n";
            return kExitUsage;
        }
    }
    std::string text;
    RunConfig config;
    if (const int rc = load_text(args, text, config.stem); rc != kExitOk) {
        return rc;
    }
    config.outdir = resolve_outdir(args.outdir);
    config.format = args.format;
    config.overrides = overrides;
    try {
        return execute_analysis(doc, config, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiagnostics;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "unitrig: behavioral simulator for unipolar current-mode Schmitt triggers and "
        "spike-polarity logic gates"};
    app.require_subcommand(1);

    // validate
    CommonArgs validate_args;
    CLI::App* cmd_validate = app.add_subcommand("validate", "parse and validate a scenario");
    cmd_validate->add_option("scenario", validate_args.scenario_path, "scenario file")
        ->required();
    cmd_validate->add_flag("--json-diag", validate_args.json_diag, "print diagnostics as JSON");

    // run + typed aliases
    CommonArgs run_args, dc_args, tran_args, mc_args, tune_args, gate_args;
    CLI::App* cmd_run = app.add_subcommand("run", "run whatever analysis the scenario declares");
    add_common(cmd_run, run_args);
    CLI::App* cmd_dc = app.add_subcommand("dc", "run a dc_sweep scenario");
    add_common(cmd_dc, dc_args);
    CLI::App* cmd_tran = app.add_subcommand("tran", "run a transient scenario");
    add_common(cmd_tran, tran_args);
    CLI::App* cmd_mc = app.add_subcommand("mc", "run a monte_carlo scenario");
    add_common(cmd_mc, mc_args);
    std::uint64_t mc_seed = 0;
    int mc_runs = 0;
    CLI::Option* mc_seed_opt = cmd_mc->add_option("--seed", mc_seed, "override the scenario seed");
    CLI::Option* mc_runs_opt = cmd_mc->add_option("--runs", mc_runs, "override the run count");
    CLI::App* cmd_tune = app.add_subcommand("tune", "run a tunability scenario");
    add_common(cmd_tune, tune_args);
    CLI::App* cmd_gate = app.add_subcommand("gate", "run a gate scenario");
    add_common(cmd_gate, gate_args);
    std::string gate_kind;
    cmd_gate->add_option("--kind", gate_kind, "gate kind override (and, or, nand, nor, xor)");

    // repro
    std::string repro_figure;
    std::string repro_outdir;
    std::uint64_t repro_seed = 0;
    int repro_runs = 0;
    CLI::App* cmd_repro =
        app.add_subcommand("repro", "reproduce a reference figure and grade the results");
    cmd_repro->add_option("figure", repro_figure, "figure id (fig2a..fig5)")->required();
    cmd_repro->add_option("-o,--out", repro_outdir, "output directory");
    CLI::Option* repro_seed_opt =
        cmd_repro->add_option("--seed", repro_seed, "override the Monte Carlo seed (fig2c)");
    CLI::Option* repro_runs_opt =
        cmd_repro->add_option("--runs", repro_runs, "override the Monte Carlo run count (fig2c)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (cmd_validate->parsed()) {
        std::string text;
        std::string stem;
        CommonArgs args = validate_args;
        if (const int rc = load_text(args, text, stem); rc != kExitOk) {
            return rc;
        }
        ParseResult parsed = parse_scenario(text);
        std::vector<Diagnostic> diagnostics = std::move(parsed.diagnostics);
        if (parsed.doc.has_value()) {
            std::vector<Diagnostic> more = validate_scenario(*parsed.doc);
            diagnostics.insert(diagnostics.end(), more.begin(), more.end());
        }
        print_diagnostics(diagnostics, args.json_diag, std::cerr);
        if (!parsed.doc.has_value() || has_errors(diagnostics)) {
            return kExitDiagnostics;
        }
        std::cout << "ok\n";
        return kExitOk;
    }
    if (cmd_run->parsed()) {
        return run_checked(run_args, {}, nullptr);
    }
    if (cmd_dc->parsed()) {
        return run_checked(dc_args, {}, "dc_sweep");
    }
    if (cmd_tran->parsed()) {
        return run_checked(tran_args, {}, "transient");
    }
    if (cmd_mc->parsed()) {
        RunOverrides overrides;
        if (mc_seed_opt->count() > 0) {
            overrides.seed = mc_seed;
        }
        if (mc_runs_opt->count() > 0) {
            if (mc_runs < 1) {
                std::cerr << "error: --runs must be >= 1\n";
                return kExitUsage;
            }
            overrides.runs = mc_runs;
        }
        return run_checked(mc_args, overrides, "monte_carlo");
    }
    if (cmd_tune->parsed()) {
        return run_checked(tune_args, {}, "tunability");
    }
    if (cmd_gate->parsed()) {
        RunOverrides overrides;
        if (!gate_kind.empty()) {
            const std::optional<GateKind> kind = gate_from_string(gate_kind);
            if (!kind.has_value()) {
                std::cerr << "error: unknown gate kind \"" << gate_kind
                          << "\"; valid kinds: and, or, nand, nor, xor\n";
                return kExitUsage;
            }
            overrides.gate_kind = kind;
        }
        return run_checked(gate_args, overrides, "gate");
    }
    if (cmd_repro->parsed()) {
        const std::vector<std::string> figures = repro_figure_ids();
        if (std::find(figures.begin(), figures.end(), repro_figure) == figures.end()) {
            std::cerr << "error: unknown figure \"" << repro_figure << "\"; valid figures:";
            for (const std::string& f : figures) {
                std::cerr << " " << f;
            }
            std::cerr << "\n";
            return kExitUsage;
        }
        std::optional<std::uint64_t> seed_override;
        std::optional<int> runs_override;
        if (repro_seed_opt->count() > 0) {
            seed_override = repro_seed;
        }
        if (repro_runs_opt->count() > 0) {
            if (repro_runs < 1) {
                std::cerr << "error: --runs must be >= 1\n";
                return kExitUsage;
            }
            runs_override = repro_runs;
        }
        try {
            return run_repro(repro_figure, resolve_outdir(repro_outdir), seed_override,
                             runs_override, std::cout);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitDiagnostics;
        }
    }
    return kExitUsage;
}
