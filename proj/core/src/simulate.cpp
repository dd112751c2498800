#include "unitrig/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace unitrig {

std::size_t Trace::probe_index(const std::string& id) const {
    for (std::size_t i = 0; i < probes.size(); ++i) {
        if (probes[i] == id) {
            return i;
        }
    }
    throw SimulationError("trace has no probe \"" + id + "\"");
}

std::map<std::string, PicoAmp> eval_dc(const Network& net,
                                       const std::map<std::string, PicoAmp>& source_values,
                                       NetworkState& state, EvalMode mode) {
    for (std::size_t i : net.source_indices()) {
        if (source_values.find(net.block(i).id) == source_values.end()) {
            throw SimulationError("missing DC value for source \"" + net.block(i).id + "\"");
        }
    }

    std::vector<PicoAmp> output(net.size(), 0.0);
    std::map<std::string, PicoAmp> by_id;
    for (std::size_t i : net.topo_order()) {
        const Block& b = net.block(i);
        PicoAmp input = 0.0;
        for (std::size_t driver : net.inputs_of(i)) {
            input += output[driver];
        }
        PicoAmp out = 0.0;
        switch (b.kind()) {
            case BlockKind::Source:
                out = source_values.at(b.id);
                break;
            case BlockKind::Schmitt:
            case BlockKind::InvSchmitt: {
                const TriggerModel& model = net.trigger_model(net.trigger_slot(i));
                SchmittState& s = state.triggers[net.trigger_slot(i)];
                out = mode == EvalMode::Ideal ? model.ideal_update(s, input)
                                              : model.equilibrium_update(s, input);
                break;
            }
            case BlockKind::Heaviside: {
                const HeavisideSpec& h = std::get<HeavisideSpec>(b.spec);
                out = input > h.threshold ? h.gain : 0.0;
                break;
            }
            case BlockKind::Probe:
                out = input;
                break;
        }
        output[i] = out;
        by_id[b.id] = out;
    }
    return by_id;
}

Seconds max_stable_dt(const Network& net) {
    Seconds bound = std::numeric_limits<Seconds>::infinity();
    for (std::size_t slot = 0; slot < net.trigger_indices().size(); ++slot) {
        const DynamicsConfig& dyn = net.trigger_model(slot).dynamics();
        bound = std::min(bound, std::min(dyn.tau_fb, dyn.tau_out) / 20.0);
    }
    return bound;
}

namespace {

/// Scratch plan for one transient run: resolved stimuli plus flat views of
/// the trigger state vector.
struct Engine {
    const Network& net;
    std::vector<const Stimulus*> stimulus;  // per block, sources only
    std::vector<PicoAmp> output;            // per block, scratch

    explicit Engine(const Network& n) : net(n), stimulus(n.size(), nullptr), output(n.size()) {}

    /// Combinational pass: computes every block output from the candidate
    /// trigger states and the sources at time t. Returns nothing; fills
    /// `output`. Trigger inputs are read back by the caller via inputs_of.
    void propagate(const std::vector<SchmittState>& triggers, Seconds t, bool left_limit) {
        for (std::size_t i : net.topo_order()) {
            const Block& b = net.block(i);
            PicoAmp input = 0.0;
            for (std::size_t driver : net.inputs_of(i)) {
                input += output[driver];
            }
            switch (b.kind()) {
                case BlockKind::Source:
                    output[i] = left_limit ? stimulus[i]->at_left(t) : stimulus[i]->at(t);
                    break;
                case BlockKind::Schmitt:
                case BlockKind::InvSchmitt:
                    output[i] =
                        net.trigger_model(net.trigger_slot(i)).smooth_output(triggers[net.trigger_slot(i)]);
                    break;
                case BlockKind::Heaviside: {
                    const HeavisideSpec& h = std::get<HeavisideSpec>(b.spec);
                    output[i] = input > h.threshold ? h.gain : 0.0;
                    break;
                }
                case BlockKind::Probe:
                    output[i] = input;
                    break;
            }
        }
    }

    /// Input current of each trigger under the current `output` scratch.
    void trigger_inputs(std::vector<PicoAmp>& inputs) const {
        const auto& trig = net.trigger_indices();
        for (std::size_t slot = 0; slot < trig.size(); ++slot) {
            PicoAmp input = 0.0;
            for (std::size_t driver : net.inputs_of(trig[slot])) {
                input += output[driver];
            }
            inputs[slot] = input;
        }
    }
};

struct StageDeriv {
    std::vector<double> d_fb, d_out, d_boost;
    void resize(std::size_t n) {
        d_fb.assign(n, 0.0);
        d_out.assign(n, 0.0);
        d_boost.assign(n, 0.0);
    }
};

void eval_stage(Engine& engine, const std::vector<SchmittState>& states, Seconds t,
                bool left_limit, std::vector<PicoAmp>& inputs, StageDeriv& deriv) {
    engine.propagate(states, t, left_limit);
    engine.trigger_inputs(inputs);
    for (std::size_t slot = 0; slot < states.size(); ++slot) {
        engine.net.trigger_model(slot).derivatives(states[slot], inputs[slot], deriv.d_fb[slot],
                                                   deriv.d_out[slot], deriv.d_boost[slot]);
    }
}

void advance(const std::vector<SchmittState>& from, const StageDeriv& deriv, double h,
             std::vector<SchmittState>& to) {
    for (std::size_t slot = 0; slot < from.size(); ++slot) {
        to[slot] = from[slot];
        to[slot].i_fb = from[slot].i_fb + h * deriv.d_fb[slot];
        to[slot].i_out = from[slot].i_out + h * deriv.d_out[slot];
        to[slot].i_boost = from[slot].i_boost + h * deriv.d_boost[slot];
    }
}

}  // namespace

Trace run_transient(const Network& net, const std::map<std::string, Stimulus>& overrides,
                    Seconds t_stop, Seconds dt, NetworkState& state) {
    if (!(t_stop > 0.0)) {
        throw SimulationError("t_stop must be positive");
    }
    if (!(dt > 0.0)) {
        throw SimulationError("dt must be positive");
    }
    if (state.triggers.size() != net.trigger_indices().size()) {
        throw SimulationError("state does not match network (trigger count mismatch)");
    }
    const Seconds bound = max_stable_dt(net);
    if (dt > bound * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt " << dt << " s exceeds the stability bound min(tau)/20 = " << bound << " s";
        throw SimulationError(msg.str());
    }

    Engine engine(net);
    for (std::size_t i : net.source_indices()) {
        const auto it = overrides.find(net.block(i).id);
        engine.stimulus[i] =
            it != overrides.end() ? &it->second : &std::get<SourceSpec>(net.block(i).spec).stimulus;
    }
    for (const auto& [id, stim] : overrides) {
        const auto idx = net.index_of(id);
        if (!idx.has_value() || net.block(*idx).kind() != BlockKind::Source) {
            throw SimulationError("stimulus override targets unknown source \"" + id + "\"");
        }
    }

    const std::size_t n_triggers = state.triggers.size();
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t_stop / dt));

    Trace trace;
    trace.dt = dt;
    trace.probes = net.probe_ids();
    trace.time.reserve(n_steps + 1);
    trace.series.assign(trace.probes.size(), {});
    for (auto& s : trace.series) {
        s.reserve(n_steps + 1);
    }

    const auto record = [&](Seconds t) {
        engine.propagate(state.triggers, t, false);
        trace.time.push_back(t);
        std::size_t row = 0;
        for (std::size_t i : net.probe_indices()) {
            trace.series[row++].push_back(engine.output[i]);
        }
    };

    std::vector<PicoAmp> inputs(n_triggers, 0.0);
    std::vector<PicoAmp> inputs_before(n_triggers, 0.0);
    std::vector<double> margin_before(n_triggers, 0.0);
    StageDeriv k1, k2, k3, k4;
    k1.resize(n_triggers);
    k2.resize(n_triggers);
    k3.resize(n_triggers);
    k4.resize(n_triggers);
    std::vector<SchmittState> scratch(n_triggers), next(n_triggers);

    // One RK4 step of size h starting at time t, followed by the transition
    // latch over the same interval.
    const auto integrate_step = [&](Seconds t, Seconds h) {
        const Seconds t_half = t + 0.5 * h;
        const Seconds t_end = t + h;

        eval_stage(engine, state.triggers, t, false, inputs, k1);
        inputs_before = inputs;
        for (std::size_t slot = 0; slot < n_triggers; ++slot) {
            margin_before[slot] =
                net.trigger_model(slot).comparator_margin(state.triggers[slot], inputs[slot]);
        }

        advance(state.triggers, k1, 0.5 * h, scratch);
        eval_stage(engine, scratch, t_half, false, inputs, k2);

        advance(state.triggers, k2, 0.5 * h, scratch);
        eval_stage(engine, scratch, t_half, false, inputs, k3);

        advance(state.triggers, k3, h, scratch);
        eval_stage(engine, scratch, t_end, true, inputs, k4);

        for (std::size_t slot = 0; slot < n_triggers; ++slot) {
            SchmittState& s = state.triggers[slot];
            s.i_fb += h / 6.0 * (k1.d_fb[slot] + 2.0 * k2.d_fb[slot] + 2.0 * k3.d_fb[slot] +
                                 k4.d_fb[slot]);
            s.i_out += h / 6.0 * (k1.d_out[slot] + 2.0 * k2.d_out[slot] + 2.0 * k3.d_out[slot] +
                                  k4.d_out[slot]);
            s.i_boost += h / 6.0 * (k1.d_boost[slot] + 2.0 * k2.d_boost[slot] +
                                    2.0 * k3.d_boost[slot] + k4.d_boost[slot]);
        }

        engine.propagate(state.triggers, t_end, false);
        engine.trigger_inputs(inputs);
        for (std::size_t slot = 0; slot < n_triggers; ++slot) {
            const double margin_after =
                net.trigger_model(slot).comparator_margin(state.triggers[slot], inputs[slot]);
            net.trigger_model(slot).latch_transition(state.triggers[slot], margin_before[slot],
                                                     margin_after, inputs_before[slot],
                                                     inputs[slot], h);
        }
    };

    // The regenerative escape through a switching fold is faster than the
    // branch lags (its linearized rate scales with k * hyst_width / tau), so
    // each recorded interval is integrated in two half steps.
    record(0.0);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const Seconds t = static_cast<Seconds>(step) * dt;
        integrate_step(t, 0.5 * dt);
        integrate_step(t + 0.5 * dt, 0.5 * dt);
        record(static_cast<Seconds>(step + 1) * dt);
    }
    return trace;
}

Trace run_transient(const Network& net, const std::map<std::string, Stimulus>& overrides,
                    Seconds t_stop, Seconds dt) {
    NetworkState state = net.initial_state();
    return run_transient(net, overrides, t_stop, dt, state);
}

}  // namespace unitrig
