#include "unitrig/logic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace unitrig {

void validate(const Encoding& enc) {
    if (!(enc.level0 < enc.rest && enc.rest < enc.level1)) {
        throw ConfigError("encoding requires level0 < rest < level1");
    }
    if (enc.level0 < 0.0) {
        throw ConfigError("encoding levels must be nonnegative");
    }
    if (!(enc.pulse_width > 0.0)) {
        throw ConfigError("encoding pulse_width must be positive");
    }
    if (!(enc.decode_low_max < enc.decode_high_min)) {
        throw ConfigError("encoding decode bands must be ordered");
    }
}

std::string to_string(Logic value) {
    switch (value) {
        case Logic::Zero: return "0";
        case Logic::One: return "1";
        case Logic::Undefined: return "undefined";
    }
    return "?";
}

Logic decode_level(const Encoding& enc, PicoAmp value) {
    if (value < enc.decode_low_max) {
        return Logic::Zero;
    }
    if (value > enc.decode_high_min) {
        return Logic::One;
    }
    return Logic::Undefined;
}

Seconds min_spike_separation(const Encoding& enc, const DynamicsConfig& dyn) {
    return enc.pulse_width + 10.0 * std::max(dyn.tau_fb, dyn.tau_out);
}

void validate_program(const SpikeProgram& program, const Encoding& enc,
                      const DynamicsConfig& dyn) {
    validate(enc);
    const Seconds min_sep = min_spike_separation(enc, dyn);
    for (std::size_t i = 0; i < program.size(); ++i) {
        if (program[i].time < 0.0) {
            std::ostringstream msg;
            msg << "spike event at " << program[i].time << " s has a negative time";
            throw ConfigError(msg.str());
        }
        if (i == 0) {
            continue;
        }
        const Seconds gap = program[i].time - program[i - 1].time;
        if (gap < 0.0) {
            std::ostringstream msg;
            msg << "spike events at " << program[i - 1].time << " s and " << program[i].time
                << " s are not time-sorted";
            throw ConfigError(msg.str());
        }
        if (gap < min_sep * (1.0 - 1e-12)) {
            std::ostringstream msg;
            msg << "spike events at " << program[i - 1].time << " s and " << program[i].time
                << " s are " << gap << " s apart; minimum separation is " << min_sep << " s";
            throw ConfigError(msg.str());
        }
    }
}

Stimulus render_stimulus(const SpikeProgram& program, const Encoding& enc) {
    validate_program(program, enc);
    std::vector<std::pair<Seconds, PicoAmp>> steps;
    steps.reserve(2 * program.size());
    for (const SpikeEvent& event : program) {
        const PicoAmp level = event.polarity == Polarity::Plus ? enc.level1 : enc.level0;
        steps.emplace_back(event.time, level);
        steps.emplace_back(event.time + enc.pulse_width, enc.rest);
    }
    return Stimulus::piecewise_constant(enc.rest, std::move(steps));
}

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::And: return "and";
        case GateKind::Or: return "or";
        case GateKind::Nand: return "nand";
        case GateKind::Nor: return "nor";
        case GateKind::Xor: return "xor";
    }
    return "?";
}

std::optional<GateKind> gate_from_string(const std::string& name) {
    for (GateKind kind : kAllGates) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

bool truth_table(GateKind kind, Polarity a, Polarity b) {
    const bool x = a == Polarity::Plus;
    const bool y = b == Polarity::Plus;
    switch (kind) {
        case GateKind::And: return x && y;
        case GateKind::Or: return x || y;
        case GateKind::Nand: return !(x && y);
        case GateKind::Nor: return !(x || y);
        case GateKind::Xor: return x != y;
    }
    return false;
}

namespace {

Calibration gate_calibration(GateMode mode) {
    return mode == GateMode::Calibrated ? Calibration::defaults() : Calibration::identity();
}

/// The shared polarity front-end: both inputs, each feeding a standard and
/// an inverted trigger at baseline bias.
void add_front_end(std::vector<Block>& blocks, std::vector<Net>& nets, const Encoding& enc,
                   GateMode mode) {
    const SchmittParams params = SchmittParams::baseline();
    const Calibration cal = gate_calibration(mode);
    const DynamicsConfig dyn{};

    // Sanity: the rest level must sit inside the hysteresis band and the
    // spike levels outside it, otherwise polarity memory cannot work.
    const ThresholdSet t = schmitt_thresholds(params, cal, dyn);
    if (!(enc.rest > t.i_th_low && enc.rest < t.i_th_high)) {
        throw ConfigError("encoding rest level must lie inside the hysteresis band");
    }
    if (!(enc.level1 > t.i_th_high) || !(enc.level0 < t.i_th_low)) {
        throw ConfigError("encoding spike levels must cross both switching thresholds");
    }

    blocks.push_back(Block::source("in1", Stimulus::constant(enc.rest)));
    blocks.push_back(Block::source("in2", Stimulus::constant(enc.rest)));
    blocks.push_back(Block::schmitt("st1", params, cal, dyn));
    blocks.push_back(Block::inv_schmitt("ist1", params, cal, dyn));
    blocks.push_back(Block::schmitt("st2", params, cal, dyn));
    blocks.push_back(Block::inv_schmitt("ist2", params, cal, dyn));
    nets.push_back({{"in1"}, "st1"});
    nets.push_back({{"in1"}, "ist1"});
    nets.push_back({{"in2"}, "st2"});
    nets.push_back({{"in2"}, "ist2"});
}

}  // namespace

Network make_gate(GateKind kind, const Encoding& enc, GateMode mode) {
    validate(enc);
    std::vector<Block> blocks;
    std::vector<Net> nets;
    add_front_end(blocks, nets, enc, mode);

    const PicoAmp high =
        schmitt_thresholds(SchmittParams::baseline(), gate_calibration(mode)).high_level;
    const PicoAmp both_active = 1.5 * high;
    const PicoAmp either_active = 0.5 * high;

    switch (kind) {
        case GateKind::And:
            blocks.push_back(Block::heaviside("h1", both_active, high));
            nets.push_back({{"st1", "st2"}, "h1"});
            break;
        case GateKind::Or:
            blocks.push_back(Block::heaviside("h1", either_active, high));
            nets.push_back({{"st1", "st2"}, "h1"});
            break;
        case GateKind::Nor:
            blocks.push_back(Block::heaviside("h1", both_active, high));
            nets.push_back({{"ist1", "ist2"}, "h1"});
            break;
        case GateKind::Nand:
            blocks.push_back(Block::heaviside("h1", either_active, high));
            nets.push_back({{"ist1", "ist2"}, "h1"});
            break;
        case GateKind::Xor:
            blocks.push_back(Block::heaviside("h1", both_active, high));
            blocks.push_back(Block::heaviside("h2", both_active, high));
            nets.push_back({{"st1", "ist2"}, "h1"});
            nets.push_back({{"st2", "ist1"}, "h2"});
            break;
    }

    blocks.push_back(Block::probe("out"));
    if (kind == GateKind::Xor) {
        nets.push_back({{"h1", "h2"}, "out"});
    } else {
        nets.push_back({{"h1"}, "out"});
    }
    return Network::build(std::move(blocks), std::move(nets));
}

namespace {

std::vector<GateSegment> decode_segments(const Trace& trace, const std::string& probe,
                                         const SpikeProgram& in1, const SpikeProgram& in2,
                                         const Encoding& enc, const DynamicsConfig& dyn,
                                         Seconds t_stop) {
    const std::vector<PicoAmp>& y = trace.series_for(probe);
    const Seconds window = min_spike_separation(enc, dyn);

    std::set<Seconds> boundaries{0.0, t_stop};
    for (const SpikeEvent& e : in1) {
        if (e.time < t_stop) {
            boundaries.insert(e.time);
        }
    }
    for (const SpikeEvent& e : in2) {
        if (e.time < t_stop) {
            boundaries.insert(e.time);
        }
    }

    const auto defined_at = [](const SpikeProgram& p, Seconds t) {
        return !p.empty() && p.front().time <= t;
    };
    const auto index_at_or_after = [&](Seconds t) {
        return static_cast<std::size_t>(
            std::min<double>(std::ceil(t / trace.dt - 1e-9), static_cast<double>(y.size() - 1)));
    };

    std::vector<GateSegment> segments;
    auto it = boundaries.begin();
    Seconds t0 = *it;
    for (++it; it != boundaries.end(); ++it, t0 = segments.back().t_end) {
        const Seconds t1 = *it;
        GateSegment seg;
        seg.t_begin = t0;
        seg.t_end = t1;
        seg.inputs_defined = defined_at(in1, t0) && defined_at(in2, t0);
        seg.settled = t1 - t0 > window;

        const bool is_last = std::next(it) == boundaries.end();
        const std::size_t begin_idx = index_at_or_after(t0 + (seg.settled ? window : 0.0));
        std::size_t end_idx = is_last ? y.size() - 1 : index_at_or_after(t1) - 1;
        end_idx = std::max(end_idx, begin_idx);

        const PicoAmp settled_value = y[begin_idx];
        PicoAmp max_dev = 0.0;
        for (std::size_t i = begin_idx; i <= end_idx; ++i) {
            max_dev = std::max(max_dev, std::abs(y[i] - settled_value));
        }
        seg.max_deviation = max_dev;
        seg.persistent = max_dev <= 2.0;
        if (!seg.inputs_defined || !seg.settled) {
            seg.value = Logic::Undefined;
        } else {
            seg.value = decode_level(enc, settled_value);
        }
        segments.push_back(seg);
    }
    return segments;
}

Logic last_settled_value(const std::vector<GateSegment>& segments) {
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
        if (it->settled) {
            return it->value;
        }
    }
    return Logic::Undefined;
}

}  // namespace

Logic GateRun::final_value() const {
    return last_settled_value(segments);
}

GateRun run_gate(GateKind kind, const SpikeProgram& in1, const SpikeProgram& in2,
                 const Encoding& enc, GateMode mode, Seconds t_stop, Seconds dt) {
    validate_program(in1, enc);
    validate_program(in2, enc);
    const Network net = make_gate(kind, enc, mode);

    std::map<std::string, Stimulus> stimuli;
    stimuli.emplace("in1", render_stimulus(in1, enc));
    stimuli.emplace("in2", render_stimulus(in2, enc));

    GateRun run;
    run.trace = run_transient(net, stimuli, t_stop, dt);
    run.segments = decode_segments(run.trace, "out", in1, in2, enc, DynamicsConfig{}, t_stop);
    return run;
}

Logic HalfAdderRun::final_sum() const {
    return last_settled_value(sum_segments);
}

Logic HalfAdderRun::final_carry() const {
    return last_settled_value(carry_segments);
}

HalfAdderRun half_adder(const SpikeProgram& in1, const SpikeProgram& in2, const Encoding& enc,
                        GateMode mode, Seconds t_stop, Seconds dt) {
    validate_program(in1, enc);
    validate_program(in2, enc);
    validate(enc);

    std::vector<Block> blocks;
    std::vector<Net> nets;
    add_front_end(blocks, nets, enc, mode);

    const PicoAmp high =
        schmitt_thresholds(SchmittParams::baseline(), gate_calibration(mode)).high_level;
    blocks.push_back(Block::heaviside("hx1", 1.5 * high, high));
    blocks.push_back(Block::heaviside("hx2", 1.5 * high, high));
    blocks.push_back(Block::heaviside("hc", 1.5 * high, high));
    blocks.push_back(Block::probe("sum"));
    blocks.push_back(Block::probe("carry"));
    nets.push_back({{"st1", "ist2"}, "hx1"});
    nets.push_back({{"st2", "ist1"}, "hx2"});
    nets.push_back({{"hx1", "hx2"}, "sum"});
    nets.push_back({{"st1", "st2"}, "hc"});
    nets.push_back({{"hc"}, "carry"});
    const Network net = Network::build(std::move(blocks), std::move(nets));

    std::map<std::string, Stimulus> stimuli;
    stimuli.emplace("in1", render_stimulus(in1, enc));
    stimuli.emplace("in2", render_stimulus(in2, enc));

    HalfAdderRun run;
    run.trace = run_transient(net, stimuli, t_stop, dt);
    run.sum_segments = decode_segments(run.trace, "sum", in1, in2, enc, DynamicsConfig{}, t_stop);
    run.carry_segments =
        decode_segments(run.trace, "carry", in1, in2, enc, DynamicsConfig{}, t_stop);
    return run;
}

}  // namespace unitrig
