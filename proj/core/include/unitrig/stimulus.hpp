#pragma once

// Deterministic current waveform generators sampled on the integration
// grid. Generators are exact functions of time; piecewise-constant ones
// additionally expose the left limit so integration steps that end on an
// event boundary see the pre-event value.

#include <utility>
#include <variant>
#include <vector>

#include "unitrig/schmitt.hpp"

namespace unitrig {

class Stimulus {
public:
    struct Constant {
        PicoAmp level = 0.0;
    };

    /// Symmetric triangle starting at `lo`, peaking at `hi` after half a
    /// period, back to `lo` at the full period.
    struct Triangle {
        PicoAmp lo = 0.0;
        PicoAmp hi = 0.0;
        Seconds period = 1.0;
    };

    /// Right-continuous step sequence: value(t) is the level of the last
    /// step at or before t.
    struct Steps {
        PicoAmp initial = 0.0;
        std::vector<std::pair<Seconds, PicoAmp>> steps;  // (time, level from time)
    };

    Stimulus() : impl_(Constant{}) {}

    static Stimulus constant(PicoAmp level) { return Stimulus(Constant{level}); }
    static Stimulus triangle(PicoAmp lo, PicoAmp hi, Seconds period);
    static Stimulus piecewise_constant(PicoAmp initial,
                                       std::vector<std::pair<Seconds, PicoAmp>> steps);

    /// Value at time t (right-continuous at step boundaries).
    PicoAmp at(Seconds t) const;

    /// Left limit at time t; differs from at(t) only on step boundaries.
    PicoAmp at_left(Seconds t) const;

    const Constant* as_constant() const { return std::get_if<Constant>(&impl_); }
    const Triangle* as_triangle() const { return std::get_if<Triangle>(&impl_); }
    const Steps* as_steps() const { return std::get_if<Steps>(&impl_); }

private:
    template <typename T>
    explicit Stimulus(T impl) : impl_(std::move(impl)) {}

    std::variant<Constant, Triangle, Steps> impl_;
};

}  // namespace unitrig
