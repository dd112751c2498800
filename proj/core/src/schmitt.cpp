#include "unitrig/schmitt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace unitrig {

namespace {

std::string with_context(const std::string& context, const std::string& message) {
    if (context.empty()) {
        return message;
    }
    return context + ": " + message;
}

ThresholdSet effective_thresholds(const SchmittParams& p, const Calibration& cal,
                                  double thermal_shift) {
    const double gain = p.i_gain + cal.gain_offset;
    const double thresh = p.i_thresh + cal.thresh_offset + thermal_shift;
    // The lower threshold stays pinned under drift, so the effective width
    // absorbs the same shift as the upper threshold.
    const double width = p.i_width + cal.width_offset + thermal_shift;

    if (gain <= 0.0 || thresh <= 0.0 || width <= 0.0) {
        std::ostringstream msg;
        msg << "effective bias currents must be positive (i_gain=" << gain
            << " pA, i_thresh=" << thresh << " pA, i_width=" << width << " pA)";
        throw ConfigError(msg.str());
    }
    if (width >= thresh) {
        std::ostringstream msg;
        msg << "bistability requires effective i_width < i_thresh (got i_width=" << width
            << " pA, i_thresh=" << thresh << " pA)";
        throw ConfigError(msg.str());
    }

    ThresholdSet t;
    t.i_th_high = thresh;
    t.hyst_width = width;
    t.i_th_low = thresh - width;
    t.high_level = gain;
    if (t.i_th_low <= 0.0) {
        std::ostringstream msg;
        msg << "lower switching threshold must be positive (got " << t.i_th_low << " pA)";
        throw ConfigError(msg.str());
    }
    return t;
}

}  // namespace

void validate(const SchmittParams& p, const std::string& context) {
    if (!(std::isfinite(p.i_gain) && std::isfinite(p.i_thresh) && std::isfinite(p.i_width))) {
        throw ConfigError(with_context(context, "bias currents must be finite"));
    }
    if (p.i_gain <= 0.0 || p.i_thresh <= 0.0 || p.i_width <= 0.0) {
        std::ostringstream msg;
        msg << "bias currents must be strictly positive (i_gain=" << p.i_gain
            << " pA, i_thresh=" << p.i_thresh << " pA, i_width=" << p.i_width << " pA)";
        throw ConfigError(with_context(context, msg.str()));
    }
    if (p.i_width >= p.i_thresh) {
        std::ostringstream msg;
        msg << "bistability requires i_width < i_thresh (got i_width=" << p.i_width
            << " pA, i_thresh=" << p.i_thresh << " pA)";
        throw ConfigError(with_context(context, msg.str()));
    }
}

void validate(const DynamicsConfig& d, const std::string& context) {
    if (!(d.tau_fb > 0.0) || !(d.tau_out > 0.0)) {
        throw ConfigError(with_context(context, "time constants must be positive"));
    }
    if (!(d.steepness_k > 0.0)) {
        throw ConfigError(with_context(context, "steepness_k must be positive"));
    }
    if (d.overshoot_coupling < 0.0) {
        throw ConfigError(with_context(context, "overshoot_coupling must be nonnegative"));
    }
    if (!std::isfinite(d.temp_thresh_drift) || !std::isfinite(d.temperature_c)) {
        throw ConfigError(with_context(context, "temperature fields must be finite"));
    }
}

ThresholdSet schmitt_thresholds(const SchmittParams& p, const Calibration& cal) {
    validate(p);
    return effective_thresholds(p, cal, 0.0);
}

ThresholdSet schmitt_thresholds(const SchmittParams& p, const Calibration& cal,
                                const DynamicsConfig& dyn) {
    validate(p);
    validate(dyn);
    const double shift = dyn.temp_thresh_drift * (dyn.temperature_c - 27.0);
    return effective_thresholds(p, cal, shift);
}

double logistic(double x) {
    // Saturated tails round to exactly 0/1 in double well before +/-40;
    // skipping exp there keeps long settled simulations cheap.
    if (x >= 40.0) {
        return 1.0;
    }
    if (x <= -40.0) {
        return 0.0;
    }
    return 1.0 / (1.0 + std::exp(-x));
}

PicoAmp heaviside_smooth(PicoAmp u, PicoAmp gain, double k) {
    if (!std::isfinite(u)) {
        throw std::domain_error("heaviside_smooth: non-finite input");
    }
    if (gain < 0.0) {
        throw ConfigError("heaviside_smooth: gain must be nonnegative");
    }
    if (!(k > 0.0)) {
        throw ConfigError("heaviside_smooth: steepness must be positive");
    }
    return gain * logistic(k * u);
}

IdealStepResult ideal_step(const SchmittParams& p, const Calibration& cal, PicoAmp i_in,
                           const SchmittState& state) {
    const ThresholdSet t = schmitt_thresholds(p, cal);
    IdealStepResult r;
    r.state = state;
    if (i_in > t.i_th_high) {
        if (r.state.branch != Branch::High) {
            r.state.undefined = false;
        }
        r.state.branch = Branch::High;
    } else if (i_in < t.i_th_low) {
        if (r.state.branch != Branch::Low) {
            r.state.undefined = false;
        }
        r.state.branch = Branch::Low;
    }
    const bool high = r.state.branch == Branch::High;
    r.state.i_fb = high ? t.hyst_width : 0.0;
    r.state.i_out = high ? t.high_level : 0.0;
    r.state.i_boost = 0.0;
    r.output = high ? t.high_level : 0.0;
    return r;
}

IdealStepResult ideal_step(const SchmittParams& p, const Calibration& cal,
                           const DynamicsConfig& dyn, PicoAmp i_in, const SchmittState& state) {
    TriggerModel model(p, cal, dyn, false);
    IdealStepResult r;
    r.state = state;
    r.output = model.ideal_update(r.state, i_in);
    return r;
}

PicoAmp inverted_output(PicoAmp i_out, PicoAmp high_level, bool* clamped) {
    if (clamped != nullptr) {
        *clamped = i_out > high_level;
    }
    return std::max(0.0, high_level - i_out);
}

PicoAmp inverted_output(PicoAmp i_out, const SchmittParams& p, const Calibration& cal,
                        bool* clamped) {
    return inverted_output(i_out, schmitt_thresholds(p, cal).high_level, clamped);
}

SmoothDerivatives smooth_rhs(const SchmittState& state, PicoAmp i_in, const SchmittParams& p,
                             const Calibration& cal, const DynamicsConfig& dyn) {
    const ThresholdSet t = schmitt_thresholds(p, cal, dyn);
    const double a = logistic(dyn.steepness_k * (i_in + state.i_fb - t.i_th_high));
    SmoothDerivatives d;
    d.d_i_fb = (t.hyst_width * a - state.i_fb) / dyn.tau_fb;
    d.d_i_out = (t.high_level * a - state.i_out) / dyn.tau_out;
    return d;
}

std::vector<Equilibrium> smooth_equilibria(const SchmittParams& p, const Calibration& cal,
                                           const DynamicsConfig& dyn, PicoAmp i_in) {
    const ThresholdSet t = schmitt_thresholds(p, cal, dyn);
    const double w = t.hyst_width;
    const double k = dyn.steepness_k;

    const auto residual = [&](double i_fb) {
        return w * logistic(k * (i_in + i_fb - t.i_th_high)) - i_fb;
    };

    // Coarse bracketing over [0, w]; the flow dx/dt = residual(x)/tau points
    // into this interval at both ends, so every fixed point lies inside. A
    // stable point is a +/- sign change of the residual.
    constexpr int kGrid = 4096;
    constexpr double kTol = 1e-3;
    std::vector<Equilibrium> result;
    double x_prev = 0.0;
    double r_prev = residual(x_prev);
    if (r_prev == 0.0) {
        // Logistic underflow: for inputs far below threshold the stable low
        // point sits exactly at i_fb = 0 and produces no sign change.
        result.push_back({0.0, 0.0});
    }
    for (int i = 1; i <= kGrid; ++i) {
        const double x = w * static_cast<double>(i) / kGrid;
        const double r = residual(x);
        const bool stable_crossing = r_prev > 0.0 && r <= 0.0;
        if (stable_crossing) {
            double lo = x_prev;
            double hi = x;
            while (hi - lo > kTol) {
                const double mid = 0.5 * (lo + hi);
                if (residual(mid) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            result.push_back({root, t.high_level * (root / w)});
        }
        x_prev = x;
        r_prev = r;
    }
    return result;
}

TriggerModel::TriggerModel(const SchmittParams& params, const Calibration& cal,
                           const DynamicsConfig& dyn, bool inverted)
    : params_(params), cal_(cal), dyn_(dyn), inverted_(inverted) {
    thresholds_ = schmitt_thresholds(params_, cal_, dyn_);
    width_eff_ = thresholds_.hyst_width;
}

double TriggerModel::comparator_margin(const SchmittState& s, PicoAmp i_in) const {
    return i_in + s.i_fb - thresholds_.i_th_high;
}

void TriggerModel::derivatives(const SchmittState& s, PicoAmp i_in, double& d_fb, double& d_out,
                               double& d_boost) const {
    const double a = logistic(dyn_.steepness_k * (i_in + s.i_fb - thresholds_.i_th_high));
    d_fb = (width_eff_ * a - s.i_fb) / dyn_.tau_fb;
    d_out = (thresholds_.high_level * a - s.i_out) / dyn_.tau_out;
    d_boost = -s.i_boost / boost_release();
}

void TriggerModel::latch_transition(SchmittState& s, double margin_before, double margin_after,
                                    PicoAmp i_in_before, PicoAmp i_in_after, Seconds dt) const {
    const bool rose = margin_before <= 0.0 && margin_after > 0.0;
    const bool fell = margin_before > 0.0 && margin_after <= 0.0;
    if (!rose && !fell) {
        return;
    }
    // Fractional position of the zero crossing inside the step.
    const double denom = margin_before - margin_after;
    double frac = denom != 0.0 ? margin_before / denom : 1.0;
    frac = std::clamp(frac, 0.0, 1.0);
    // At the crossing the comparator margin vanishes, so the feedback
    // current there is pinned by the input alone. This keeps the latched
    // inrush independent of how the grid samples the transition.
    const double i_in_x = i_in_before + frac * (i_in_after - i_in_before);
    const double i_fb_x = std::clamp(thresholds_.i_th_high - i_in_x, 0.0, width_eff_);
    const double a_new = rose ? 1.0 : 0.0;
    const double inrush = dyn_.overshoot_coupling * (width_eff_ * a_new - i_fb_x);
    s.i_boost = inrush * std::exp(-(1.0 - frac) * dt / boost_release());
    s.branch = rose ? Branch::High : Branch::Low;
    s.undefined = false;
}

PicoAmp TriggerModel::smooth_output(const SchmittState& s) const {
    const double y = std::max(0.0, s.i_out + s.i_boost);
    if (!inverted_) {
        return y;
    }
    return std::max(0.0, thresholds_.high_level - y);
}

PicoAmp TriggerModel::ideal_update(SchmittState& s, PicoAmp i_in) const {
    if (i_in > thresholds_.i_th_high) {
        if (s.branch != Branch::High) {
            s.undefined = false;
        }
        s.branch = Branch::High;
    } else if (i_in < thresholds_.i_th_low) {
        if (s.branch != Branch::Low) {
            s.undefined = false;
        }
        s.branch = Branch::Low;
    }
    const bool high = s.branch == Branch::High;
    s.i_fb = high ? width_eff_ : 0.0;
    s.i_out = high ? thresholds_.high_level : 0.0;
    s.i_boost = 0.0;
    const double y = high ? thresholds_.high_level : 0.0;
    return inverted_ ? std::max(0.0, thresholds_.high_level - y) : y;
}

PicoAmp TriggerModel::equilibrium_update(SchmittState& s, PicoAmp i_in) const {
    const std::vector<Equilibrium> eq = smooth_equilibria(params_, cal_, dyn_, i_in);
    if (eq.empty()) {
        // Cannot happen for valid parameters (the flow always has a fixed
        // point in [0, width]); keep the state untouched if it does.
        return smooth_output(s);
    }
    const Equilibrium* best = &eq.front();
    double best_dist = std::numeric_limits<double>::infinity();
    for (const Equilibrium& e : eq) {
        const double dist = std::abs(e.i_fb - s.i_fb);
        if (dist < best_dist) {
            best_dist = dist;
            best = &e;
        }
    }
    const Branch before = s.branch;
    s.i_fb = best->i_fb;
    s.i_out = best->i_out;
    s.i_boost = 0.0;
    s.branch = best->i_fb > 0.5 * width_eff_ ? Branch::High : Branch::Low;
    if (s.branch != before) {
        s.undefined = false;
    }
    return smooth_output(s);
}

}  // namespace unitrig
