#include "unitrig/stimulus.hpp"

#include <algorithm>
#include <cmath>

namespace unitrig {

Stimulus Stimulus::triangle(PicoAmp lo, PicoAmp hi, Seconds period) {
    if (!(period > 0.0)) {
        throw ConfigError("triangle stimulus: period must be positive");
    }
    if (hi < lo) {
        throw ConfigError("triangle stimulus: hi must be >= lo");
    }
    return Stimulus(Triangle{lo, hi, period});
}

Stimulus Stimulus::piecewise_constant(PicoAmp initial,
                                      std::vector<std::pair<Seconds, PicoAmp>> steps) {
    if (!std::is_sorted(steps.begin(), steps.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; })) {
        throw ConfigError("piecewise-constant stimulus: step times must be sorted");
    }
    return Stimulus(Steps{initial, std::move(steps)});
}

namespace {

PicoAmp eval_triangle(const Stimulus::Triangle& tri, Seconds t) {
    if (t < 0.0) {
        return tri.lo;
    }
    const double phase = std::fmod(t, tri.period) / tri.period;
    const double frac = phase <= 0.5 ? 2.0 * phase : 2.0 * (1.0 - phase);
    return tri.lo + (tri.hi - tri.lo) * frac;
}

PicoAmp eval_steps(const Stimulus::Steps& st, Seconds t, bool left_limit) {
    PicoAmp level = st.initial;
    for (const auto& [time, value] : st.steps) {
        const bool active = left_limit ? time < t : time <= t;
        if (!active) {
            break;
        }
        level = value;
    }
    return level;
}

}  // namespace

PicoAmp Stimulus::at(Seconds t) const {
    if (const Constant* c = as_constant()) {
        return c->level;
    }
    if (const Triangle* tri = as_triangle()) {
        return eval_triangle(*tri, t);
    }
    return eval_steps(*as_steps(), t, false);
}

PicoAmp Stimulus::at_left(Seconds t) const {
    if (const Steps* st = as_steps()) {
        return eval_steps(*st, t, true);
    }
    return at(t);
}

}  // namespace unitrig
