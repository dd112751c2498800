#pragma once

// Experiment drivers: DC hysteresis extraction, bias tunability sweeps with
// linearity fits, seeded Monte Carlo mismatch, and step-response metrics.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unitrig/simulate.hpp"

namespace unitrig {

struct HysteresisMetrics {
    std::optional<PicoAmp> i_th_high;
    std::optional<PicoAmp> i_th_low;
    std::optional<PicoAmp> hyst_width;
    std::optional<PicoAmp> high_level;
    bool bistable = false;
};

/// One point of the recorded DC transfer curve (up and down sweep).
struct DcCurvePoint {
    PicoAmp input = 0.0;
    PicoAmp up = 0.0;
    PicoAmp down = 0.0;
};

struct DcSweepResult {
    HysteresisMetrics metrics;
    std::vector<DcCurvePoint> curve;
};

/// Runs an up then a down DC sweep over [lo, hi] with `steps` grid points,
/// preserving trigger state between points. Switching points are where the
/// output crosses high_level / 2, refined by bisection to 0.1 pA.
/// Requires lo < hi and steps >= 10.
DcSweepResult dc_sweep(const SchmittParams& p, const Calibration& cal, const DynamicsConfig& dyn,
                       PicoAmp lo, PicoAmp hi, int steps, EvalMode mode = EvalMode::Ideal);

HysteresisMetrics dc_hysteresis(const SchmittParams& p, const Calibration& cal,
                                const DynamicsConfig& dyn, PicoAmp lo, PicoAmp hi, int steps,
                                EvalMode mode = EvalMode::Ideal);

/// Network flavour: drives `source_id`, watches `probe_id`.
DcSweepResult dc_sweep(const Network& net, const std::string& source_id,
                       const std::string& probe_id, PicoAmp lo, PicoAmp hi, int steps,
                       EvalMode mode = EvalMode::Ideal);

HysteresisMetrics dc_hysteresis(const Network& net, const std::string& source_id,
                                const std::string& probe_id, PicoAmp lo, PicoAmp hi, int steps,
                                EvalMode mode = EvalMode::Ideal);

enum class TuneTarget : std::uint8_t { Gain, Thresh, Width };

std::string to_string(TuneTarget target);

struct TunePoint {
    PicoAmp set = 0.0;
    std::optional<PicoAmp> measured;  // empty when the configuration is invalid
    double residual = 0.0;            // measured - fit, NaN when invalid
};

struct LinearityReport {
    double slope = 0.0;
    PicoAmp intercept = 0.0;
    /// |measured - set| / set at the top of the range.
    double rel_error_at_top = 0.0;
    std::vector<TunePoint> points;
    int valid_points = 0;
};

/// Sweeps one bias current over [lo, hi] with `steps` grid points (the other
/// two stay at `base`), measures the corresponding characteristic via
/// dc_hysteresis, and fits measured = slope * set + intercept on the valid
/// points. Grid points with invalid effective parameters are flagged, not
/// fatal.
LinearityReport tunability_sweep(TuneTarget target, const SchmittParams& base,
                                 const Calibration& cal, const DynamicsConfig& dyn, PicoAmp lo,
                                 PicoAmp hi, int steps, EvalMode mode = EvalMode::Ideal);

struct MismatchDistribution {
    std::vector<HysteresisMetrics> runs;
    double retention = 0.0;  // fraction of runs that stayed bistable
    PicoAmp mean_i_th_high = 0.0;
    PicoAmp mean_i_th_low = 0.0;
    PicoAmp mean_hyst_width = 0.0;
    PicoAmp mean_high_level = 0.0;
    PicoAmp std_i_th_high = 0.0;
    PicoAmp std_i_th_low = 0.0;
    PicoAmp std_hyst_width = 0.0;
    PicoAmp std_high_level = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    int total_runs = 0;
};

/// Draws independent Gaussian perturbations (std `sigma`) on the three bias
/// currents and the three calibration offsets for each run, then measures
/// dc_hysteresis per run. Runs violating the bistability constraint count
/// as bistable = false instead of aborting. Reproducible: each run derives
/// its own generator from (seed, run index), so results do not depend on
/// evaluation order.
MismatchDistribution monte_carlo(const SchmittParams& base, const Calibration& cal,
                                 const DynamicsConfig& dyn, double sigma, int runs,
                                 std::uint64_t seed);

/// (peak - settled) / settled past the first upward crossing of
/// settled / 2. Empty when the trace never crosses.
std::optional<double> measure_overshoot(const Trace& trace, const std::string& probe_id,
                                        PicoAmp settled_level);

/// 10% -> 90% rise time of the first upward transition, with linear
/// interpolation between samples. Empty when the trace holds no full
/// transition.
std::optional<Seconds> measure_rise_time(const Trace& trace, const std::string& probe_id);

}  // namespace unitrig
