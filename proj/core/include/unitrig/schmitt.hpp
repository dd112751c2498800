#pragma once

// Behavioral models of the unipolar current-mode Schmitt trigger: bias
// parameters, leakage calibration, the discrete two-branch model used for
// DC analysis and the smooth ODE model used for transient simulation.
//
// All currents are picoamperes, all times seconds. Every observable node
// current is nonnegative; negative intermediate values are clamped only
// where documented.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace unitrig {

using PicoAmp = double;
using Seconds = double;

/// Rejected parameter sets, violated invariants, bad analysis ranges.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// The three programmable bias currents of one trigger.
struct SchmittParams {
    PicoAmp i_gain = 486.0;
    PicoAmp i_thresh = 368.0;
    PicoAmp i_width = 216.0;

    /// Representative operating point used throughout the docs and presets.
    static SchmittParams baseline() { return {486.0, 368.0, 216.0}; }

    friend bool operator==(const SchmittParams&, const SchmittParams&) = default;
};

/// Throws ConfigError unless all bias currents are positive and the
/// bistability condition i_width < i_thresh holds.
void validate(const SchmittParams& p, const std::string& context = {});

/// Systematic subthreshold-leakage offsets between a set bias current and
/// the realized characteristic. Defaults reproduce the observed baseline;
/// identity() models a leak-free device.
struct Calibration {
    PicoAmp gain_offset = 14.0;
    PicoAmp thresh_offset = -18.0;
    PicoAmp width_offset = -16.0;

    static Calibration identity() { return {0.0, 0.0, 0.0}; }
    static Calibration defaults() { return {}; }

    bool is_identity() const {
        return gain_offset == 0.0 && thresh_offset == 0.0 && width_offset == 0.0;
    }

    friend bool operator==(const Calibration&, const Calibration&) = default;
};

/// Time constants and shape knobs of the smooth model.
struct DynamicsConfig {
    Seconds tau_fb = 159e-6;   // feedback branch lag; 1/(2*pi*1kHz)
    Seconds tau_out = 159e-6;  // output branch lag
    double steepness_k = 1.0;  // logistic steepness, 1/pA
    double overshoot_coupling = 0.25;
    double temp_thresh_drift = 0.0;  // pA/degC on the upper threshold only
    double temperature_c = 27.0;

    friend bool operator==(const DynamicsConfig&, const DynamicsConfig&) = default;
};

void validate(const DynamicsConfig& d, const std::string& context = {});

/// Static switching characteristics after calibration and thermal drift.
struct ThresholdSet {
    PicoAmp i_th_high = 0.0;
    PicoAmp i_th_low = 0.0;
    PicoAmp hyst_width = 0.0;
    PicoAmp high_level = 0.0;
};

/// i_th_high = i_thresh + thresh_offset, i_th_low = i_th_high - hyst_width,
/// hyst_width = i_width + width_offset, high_level = i_gain + gain_offset.
/// Throws ConfigError if the effective parameters violate positivity,
/// bistability, or leave i_th_low <= 0.
ThresholdSet schmitt_thresholds(const SchmittParams& p, const Calibration& cal);

/// Same, with the phenomenological thermal drift applied: the upper
/// threshold moves by temp_thresh_drift * (T - 27), the lower threshold
/// stays pinned (the hysteresis width absorbs the shift).
ThresholdSet schmitt_thresholds(const SchmittParams& p, const Calibration& cal,
                                const DynamicsConfig& dyn);

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

enum class Branch : std::uint8_t { Low, High };

/// Per-trigger memory. The discrete model only uses `branch`; the smooth
/// model additionally integrates the feedback and output branch currents
/// plus a transition boost that shapes the switching overshoot.
/// `undefined` stays true until the first threshold crossing, so logic
/// harnesses can distinguish "never spiked" from "last spike was negative".
struct SchmittState {
    Branch branch = Branch::Low;
    PicoAmp i_fb = 0.0;
    PicoAmp i_out = 0.0;
    PicoAmp i_boost = 0.0;
    bool undefined = true;
};

// ---------------------------------------------------------------------------
// Elementary operations
// ---------------------------------------------------------------------------

/// Smooth thresholding element: gain * sigma(k*u) with sigma the logistic
/// function. Approaches the sharp element {0, gain} as k grows.
/// Throws std::domain_error on non-finite input.
PicoAmp heaviside_smooth(PicoAmp u, PicoAmp gain, double k);

struct IdealStepResult {
    SchmittState state;
    PicoAmp output = 0.0;
};

/// Discrete-state trigger update: switches HIGH above i_th_high, LOW below
/// i_th_low, holds anywhere inside the band. Output is high_level or 0.
IdealStepResult ideal_step(const SchmittParams& p, const Calibration& cal,
                           PicoAmp i_in, const SchmittState& state);

IdealStepResult ideal_step(const SchmittParams& p, const Calibration& cal,
                           const DynamicsConfig& dyn, PicoAmp i_in,
                           const SchmittState& state);

/// Complement-output stage of the inverted trigger: high_level - i_out,
/// clamped to 0 when i_out exceeds high_level (sets *clamped if given).
PicoAmp inverted_output(PicoAmp i_out, const SchmittParams& p, const Calibration& cal,
                        bool* clamped = nullptr);

PicoAmp inverted_output(PicoAmp i_out, PicoAmp high_level, bool* clamped = nullptr);

struct SmoothDerivatives {
    double d_i_fb = 0.0;   // pA/s
    double d_i_out = 0.0;  // pA/s
};

/// Right-hand side of the two branch ODEs. With
/// a = sigma(k * (i_in + i_fb - i_th_high)):
///   d(i_fb)/dt  = (i_width_eff * a - i_fb) / tau_fb
///   d(i_out)/dt = (i_gain_eff  * a - i_out) / tau_out
SmoothDerivatives smooth_rhs(const SchmittState& state, PicoAmp i_in,
                             const SchmittParams& p, const Calibration& cal,
                             const DynamicsConfig& dyn);

struct Equilibrium {
    PicoAmp i_fb = 0.0;
    PicoAmp i_out = 0.0;
};

/// All stable fixed points of the feedback equation
/// i_fb = i_width_eff * sigma(k * (i_in + i_fb - i_th_high)) for the given
/// input, located by sign-change bracketing plus bisection to 1e-3 pA.
/// Returns one point outside the hysteresis band, two inside it (for k
/// large enough), ordered by ascending i_fb.
std::vector<Equilibrium> smooth_equilibria(const SchmittParams& p, const Calibration& cal,
                                           const DynamicsConfig& dyn, PicoAmp i_in);

// ---------------------------------------------------------------------------
// Trigger model used by the simulation engine
// ---------------------------------------------------------------------------

/// One trigger with cached effective characteristics. Pure value type: the
/// engine owns the state and passes it in explicitly.
class TriggerModel {
public:
    TriggerModel() = default;
    TriggerModel(const SchmittParams& params, const Calibration& cal,
                 const DynamicsConfig& dyn, bool inverted);

    const SchmittParams& params() const { return params_; }
    const Calibration& calibration() const { return cal_; }
    const DynamicsConfig& dynamics() const { return dyn_; }
    const ThresholdSet& thresholds() const { return thresholds_; }
    bool inverted() const { return inverted_; }

    /// Comparator argument i_in + i_fb - i_th_high; its sign encodes the
    /// hysteretic switching condition for both sweep directions.
    double comparator_margin(const SchmittState& s, PicoAmp i_in) const;

    /// Branch ODE derivatives plus the slow release of the transition boost.
    void derivatives(const SchmittState& s, PicoAmp i_in, double& d_fb, double& d_out,
                     double& d_boost) const;

    /// Latches the transition boost when the comparator margin changed sign
    /// across an integration step, and tracks branch / undefined bookkeeping.
    /// The crossing instant is located by interpolating the margins, which
    /// keeps the latched amplitude independent of the step size; the input
    /// currents at the step ends pin the feedback current at the crossing.
    void latch_transition(SchmittState& s, double margin_before, double margin_after,
                          PicoAmp i_in_before, PicoAmp i_in_after, Seconds dt) const;

    /// Observable output of the smooth model, complemented when inverted:
    /// max(0, i_out + i_boost).
    PicoAmp smooth_output(const SchmittState& s) const;

    /// Discrete update used by the DC engine in ideal mode.
    PicoAmp ideal_update(SchmittState& s, PicoAmp i_in) const;

    /// Equilibrium update used by the DC engine in smooth mode: moves the
    /// state to the stable fixed point closest to the current branch.
    PicoAmp equilibrium_update(SchmittState& s, PicoAmp i_in) const;

    /// Boost release time constant (slow compared to the branch lags).
    Seconds boost_release() const { return kBoostReleaseFactor * dyn_.tau_fb; }

    static constexpr double kBoostReleaseFactor = 64.0;

private:
    SchmittParams params_{};
    Calibration cal_{};
    DynamicsConfig dyn_{};
    ThresholdSet thresholds_{};
    PicoAmp width_eff_ = 0.0;
    bool inverted_ = false;
};

/// Numerically safe logistic 1 / (1 + exp(-x)).
double logistic(double x);

}  // namespace unitrig
