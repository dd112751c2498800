#pragma once

// Result writers. CSV rows carry currents at fixed 0.01 pA precision so
// golden files stay byte-stable across platforms; JSON objects keep a fixed
// key order and round-trip through any standard parser.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "unitrig/analysis.hpp"
#include "unitrig/logic.hpp"

namespace unitrig {

class SerializeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Header `time_s,<probe ids...>`, then one row per grid point (decimated
/// by `sample_every`). Currents use 2 decimals, time 9.
void write_trace_csv(std::ostream& out, const Trace& trace, int sample_every = 1);

/// Header `i_in_pA,up_pA,down_pA` plus the recorded transfer curve.
void write_dc_csv(std::ostream& out, const DcSweepResult& result);

/// Header `run,bistable,i_th_high_pA,i_th_low_pA,hyst_width_pA,high_level_pA`.
void write_mc_csv(std::ostream& out, const MismatchDistribution& dist);

/// Header `set_pA,measured_pA,residual_pA,valid`.
void write_tune_csv(std::ostream& out, const LinearityReport& report);

std::string hysteresis_json(const HysteresisMetrics& metrics);
std::string mc_json(const MismatchDistribution& dist);
std::string tune_json(const LinearityReport& report);
std::string gate_json(GateKind kind, GateMode mode, const GateRun& run);

/// Generic helpers shared by the writers (also used by the CLI).
std::string format_pa(PicoAmp value);
std::string format_time(Seconds value);

}  // namespace unitrig
