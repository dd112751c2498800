#pragma once

// DC and transient evaluation of a Network. Transient integration is
// fixed-step explicit RK4 over all trigger ODEs; combinational blocks are
// evaluated algebraically at every stage. Fixed stepping keeps traces
// bit-reproducible across runs.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "unitrig/network.hpp"

namespace unitrig {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EvalMode : std::uint8_t {
    Ideal,   // discrete-state triggers, exact thresholds
    Smooth,  // trigger outputs from the stable fixed point nearest the state
};

/// Evaluates every block in topological order with the given DC source
/// values (pA per source id) and updates trigger states in place.
/// Returns the output current of every block, keyed by id.
/// Throws SimulationError if a source value is missing.
std::map<std::string, PicoAmp> eval_dc(const Network& net,
                                       const std::map<std::string, PicoAmp>& source_values,
                                       NetworkState& state, EvalMode mode = EvalMode::Ideal);

/// Uniform-grid simulation result: one current series per probe.
struct Trace {
    Seconds dt = 0.0;
    std::vector<Seconds> time;
    std::vector<std::string> probes;
    std::vector<std::vector<PicoAmp>> series;  // probes.size() rows

    std::size_t probe_index(const std::string& id) const;
    const std::vector<PicoAmp>& series_for(const std::string& id) const {
        return series[probe_index(id)];
    }
};

/// Largest stable step for the network: min(tau_fb, tau_out) / 20 over all
/// triggers (infinite for a trigger-free network).
Seconds max_stable_dt(const Network& net);

/// Integrates the network from `state` over [0, t_stop], sampling every
/// probe on the fixed dt grid. Integration runs at dt/2 internally so the
/// regenerative switching transients stay resolved at the guard limit.
/// `overrides` replaces the stimulus of the named source blocks for this
/// run.
/// Throws SimulationError when dt exceeds the stability bound (the message
/// carries the computed bound) or when t_stop / dt are not positive.
Trace run_transient(const Network& net, const std::map<std::string, Stimulus>& overrides,
                    Seconds t_stop, Seconds dt, NetworkState& state);

/// Convenience overload starting from the all-LOW initial state.
Trace run_transient(const Network& net, const std::map<std::string, Stimulus>& overrides,
                    Seconds t_stop, Seconds dt);

}  // namespace unitrig
