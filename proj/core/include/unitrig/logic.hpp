#pragma once

// Spike-polarity logic on top of the trigger: three-level current encoding,
// gate network constructors, transient gate runs with decoded timelines,
// and the half-adder composition.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unitrig/analysis.hpp"
#include "unitrig/network.hpp"
#include "unitrig/simulate.hpp"

namespace unitrig {

/// Three-level current encoding: level0 = logic 0 / negative spike, rest =
/// no spike yet, level1 = logic 1 / positive spike. Decode bands split at
/// the midpoints between levels.
struct Encoding {
    PicoAmp level0 = 0.0;
    PicoAmp rest = 250.0;
    PicoAmp level1 = 500.0;
    Seconds pulse_width = 5e-3;
    PicoAmp decode_low_max = 125.0;   // below: logic 0
    PicoAmp decode_high_min = 375.0;  // above: logic 1

    friend bool operator==(const Encoding&, const Encoding&) = default;
};

void validate(const Encoding& enc);

enum class Logic : std::uint8_t { Zero, One, Undefined };

std::string to_string(Logic value);

/// Band decode of a settled output current.
Logic decode_level(const Encoding& enc, PicoAmp value);

enum class Polarity : std::uint8_t { Minus, Plus };

struct SpikeEvent {
    Seconds time = 0.0;
    Polarity polarity = Polarity::Plus;

    friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

using SpikeProgram = std::vector<SpikeEvent>;

/// Minimum spacing between consecutive events on one input: the pulse must
/// end and the trigger transient must die out before the next spike.
Seconds min_spike_separation(const Encoding& enc, const DynamicsConfig& dyn = {});

/// Throws ConfigError naming the two offending events when the program is
/// unsorted or violates the separation rule.
void validate_program(const SpikeProgram& program, const Encoding& enc,
                      const DynamicsConfig& dyn = {});

/// Piecewise-constant waveform: rest everywhere except level1 (polarity +)
/// or level0 (polarity -) during [t, t + pulse_width) of each event.
Stimulus render_stimulus(const SpikeProgram& program, const Encoding& enc);

enum class GateKind : std::uint8_t { And, Or, Nand, Nor, Xor };

constexpr std::array<GateKind, 5> kAllGates = {GateKind::And, GateKind::Or, GateKind::Nand,
                                               GateKind::Nor, GateKind::Xor};

std::string to_string(GateKind kind);
std::optional<GateKind> gate_from_string(const std::string& name);

enum class GateMode : std::uint8_t {
    Ideal,       // identity calibration
    Calibrated,  // default leakage offsets
};

/// Boolean reference semantics with -/+ mapped to 0/1.
bool truth_table(GateKind kind, Polarity a, Polarity b);

/// Builds the gate network: each input feeds one standard and one inverted
/// trigger at baseline bias; the polarity outputs are summed and passed
/// through sharp thresholding stages at 3/2 or 1/2 of the high level
/// depending on the gate. Sources are "in1"/"in2", the output probe "out".
Network make_gate(GateKind kind, const Encoding& enc, GateMode mode = GateMode::Calibrated);

/// Decoded output over one inter-event interval. `settled` is false when
/// the interval is shorter than the settling window; `persistent` reports
/// whether the output stayed within +/-2 pA of its settled value until the
/// next event.
struct GateSegment {
    Seconds t_begin = 0.0;
    Seconds t_end = 0.0;
    Logic value = Logic::Undefined;
    bool inputs_defined = false;
    bool settled = false;
    bool persistent = true;
    PicoAmp max_deviation = 0.0;
};

struct GateRun {
    Trace trace;
    std::vector<GateSegment> segments;

    /// Decode of the last settled segment, Undefined when none settled.
    Logic final_value() const;
};

/// Simulates the gate for the two spike programs and decodes the output
/// after each event's settling window.
GateRun run_gate(GateKind kind, const SpikeProgram& in1, const SpikeProgram& in2,
                 const Encoding& enc, GateMode mode, Seconds t_stop, Seconds dt);

struct HalfAdderRun {
    Trace trace;  // probes "sum" (XOR path) and "carry" (AND path)
    std::vector<GateSegment> sum_segments;
    std::vector<GateSegment> carry_segments;

    Logic final_sum() const;
    Logic final_carry() const;
};

/// XOR drives the sum output and AND the carry, sharing one input stage
/// (each input's trigger pair feeds both gates).
HalfAdderRun half_adder(const SpikeProgram& in1, const SpikeProgram& in2, const Encoding& enc,
                        GateMode mode, Seconds t_stop, Seconds dt);

}  // namespace unitrig
