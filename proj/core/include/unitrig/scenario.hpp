#pragma once

// Parser, validator, and canonical serializer for the scenario file format.
// The format is strict: unknown keys are errors and every current or time
// needs an explicit unit suffix (pA; s, ms, us), so a silent typo can never
// change the physics of a run. See docs/scenario.md for the grammar.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unitrig/analysis.hpp"
#include "unitrig/logic.hpp"
#include "unitrig/network.hpp"

namespace unitrig {

struct SourceLoc {
    int line = 0;
    int column = 0;
};

struct Diagnostic {
    enum class Severity : std::uint8_t { Error, Warning };
    Severity severity = Severity::Error;
    SourceLoc loc;
    std::string message;
    std::string identifier;  // offending id or key, when one exists
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);
std::string format_diagnostic(const Diagnostic& d);

// --- declarations ----------------------------------------------------------

struct SourceDecl {
    enum class Kind : std::uint8_t { Constant, Triangle, Spikes };
    Kind kind = Kind::Constant;
    PicoAmp level = 0.0;  // constant
    PicoAmp lo = 0.0;     // triangle
    PicoAmp hi = 0.0;
    Seconds period = 1.0;
    Encoding encoding{};    // spikes
    SpikeProgram program{};

    friend bool operator==(const SourceDecl&, const SourceDecl&) = default;
};

struct TriggerDecl {
    SchmittParams params{};
    Calibration cal = Calibration::identity();
    DynamicsConfig dyn{};
    bool inverted = false;

    friend bool operator==(const TriggerDecl&, const TriggerDecl&) = default;
};

struct HeavisideDecl {
    PicoAmp threshold = 0.0;
    PicoAmp gain = 0.0;

    friend bool operator==(const HeavisideDecl&, const HeavisideDecl&) = default;
};

struct ProbeDecl {
    friend bool operator==(const ProbeDecl&, const ProbeDecl&) = default;
};

struct ScenarioBlock {
    std::string id;
    std::variant<SourceDecl, TriggerDecl, HeavisideDecl, ProbeDecl> decl;
    SourceLoc loc;

    BlockKind kind() const;

    friend bool operator==(const ScenarioBlock& a, const ScenarioBlock& b) {
        return a.id == b.id && a.decl == b.decl;  // locations are not identity
    }
};

struct ScenarioNet {
    std::vector<std::string> drivers;
    std::string sink;
    SourceLoc loc;

    friend bool operator==(const ScenarioNet& a, const ScenarioNet& b) {
        return a.drivers == b.drivers && a.sink == b.sink;
    }
};

// --- analysis requests -----------------------------------------------------

struct DcSweepRequest {
    std::optional<std::string> source;  // inferred when the doc has exactly one
    std::optional<std::string> probe;
    PicoAmp lo = 0.0;
    PicoAmp hi = 0.0;
    int steps = 0;
    EvalMode engine = EvalMode::Ideal;

    friend bool operator==(const DcSweepRequest&, const DcSweepRequest&) = default;
};

struct TransientRequest {
    Seconds t_stop = 0.0;
    Seconds dt = 0.0;
    int sample_every = 1;

    friend bool operator==(const TransientRequest&, const TransientRequest&) = default;
};

struct MonteCarloRequest {
    std::string target;
    double sigma = 0.0;
    int runs = 0;

    friend bool operator==(const MonteCarloRequest&, const MonteCarloRequest&) = default;
};

struct TunabilityRequest {
    std::string target;
    TuneTarget which = TuneTarget::Gain;
    PicoAmp lo = 0.0;
    PicoAmp hi = 0.0;
    int steps = 0;

    friend bool operator==(const TunabilityRequest&, const TunabilityRequest&) = default;
};

struct GateRequest {
    GateKind kind = GateKind::Xor;
    GateMode mode = GateMode::Calibrated;
    std::string in1;
    std::string in2;
    Seconds t_stop = 0.0;
    Seconds dt = 0.0;
    int sample_every = 1;

    friend bool operator==(const GateRequest&, const GateRequest&) = default;
};

using AnalysisRequest = std::variant<std::monostate, DcSweepRequest, TransientRequest,
                                     MonteCarloRequest, TunabilityRequest, GateRequest>;

// --- document --------------------------------------------------------------

struct ScenarioDoc {
    int version = 1;
    std::optional<std::uint64_t> seed;
    std::vector<ScenarioBlock> blocks;
    std::vector<ScenarioNet> nets;
    AnalysisRequest analysis;
    SourceLoc analysis_loc;

    const ScenarioBlock* find_block(const std::string& id) const;

    friend bool operator==(const ScenarioDoc& a, const ScenarioDoc& b) {
        return a.version == b.version && a.seed == b.seed && a.blocks == b.blocks &&
               a.nets == b.nets && a.analysis == b.analysis;
    }
};

struct ParseResult {
    /// Whatever parsed; lines with errors contribute nothing. Running
    /// validate_scenario on the partial document surfaces cross-reference
    /// problems even when some lines failed to parse.
    std::optional<ScenarioDoc> doc;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return doc.has_value() && !has_errors(diagnostics); }
};

/// Strict parse. Never throws: every problem becomes a Diagnostic and the
/// parser keeps going so one pass reports them all.
ParseResult parse_scenario(std::string_view text);

/// Cross-reference and range validation of a parsed document; returns the
/// complete list of diagnostics in one pass (no fail-fast).
std::vector<Diagnostic> validate_scenario(const ScenarioDoc& doc);

/// Canonical text form: all keys explicit, currents in pA, times in s.
/// parse(serialize(doc)) is structurally equal to doc, and serialize is a
/// fixed point over parse (byte-identical on the second pass).
std::string serialize_scenario(const ScenarioDoc& doc);

/// Builds the simulatable network for a validated document.
Network build_network_from(const ScenarioDoc& doc);

}  // namespace unitrig
