#include "presets.hpp"

namespace unitrig::cli {

namespace {

const char* kBaseline = R"(# Baseline trigger, DC transfer sweep.
version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block probe out
net in -> st
net st -> out
analysis dc_sweep lo 0 pA hi 500 pA steps 250 source in probe out engine ideal
)";

const char* kFig2a = R"(# Triangular transient sweep of the baseline trigger.
version 1
block source in triangle lo 0 pA hi 500 pA period 200 ms
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block probe vin
block probe out
net in -> vin
net in -> st
net st -> out
analysis transient t_stop 200 ms dt 5 us sample_every 8
)";

const char* kFig2c = R"(# Monte Carlo mismatch on the baseline trigger.
version 1
seed 1234
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block probe out
net in -> st
net st -> out
analysis monte_carlo target st sigma 10 pA runs 500
)";

const char* kFig3a = R"(# Output-level tunability sweep.
version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block probe out
net in -> st
net st -> out
analysis tunability target st which gain lo 50 pA hi 500 pA steps 10
)";

const char* kFig3b = R"(# Threshold tunability sweep (narrow hysteresis).
version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 50 pA cal default
block probe out
net in -> st
net st -> out
analysis tunability target st which thresh lo 100 pA hi 400 pA steps 13
)";

const char* kFig3c = R"(# Hysteresis-width tunability sweep.
version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block probe out
net in -> st
net st -> out
analysis tunability target st which width lo 10 pA hi 300 pA steps 30
)";

const char* kFig5 = R"(# Spike programs covering all four polarity combinations.
version 1
block source a spikes pulse_width 5 ms events (100 ms +) (2100 ms -)
block source b spikes pulse_width 5 ms events (200 ms +) (1100 ms -) (2200 ms +) (3100 ms -)
analysis gate kind xor mode calibrated in1 a in2 b t_stop 4 s dt 5 us sample_every 40
)";

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = {
        {"baseline", "baseline trigger DC sweep (alias of fig2b)", kBaseline},
        {"fig2a", "triangular transient sweep", kFig2a},
        {"fig2b", "baseline trigger DC sweep", kBaseline},
        {"fig2c", "Monte Carlo mismatch, sigma 10 pA, 500 runs", kFig2c},
        {"fig3a", "gain tunability sweep 50..500 pA", kFig3a},
        {"fig3b", "threshold tunability sweep 100..400 pA", kFig3b},
        {"fig3c", "width tunability sweep 10..300 pA", kFig3c},
        {"fig5", "spike-gate program, all polarity combinations", kFig5},
    };
    return all;
}

std::optional<std::string> preset_text(const std::string& name) {
    for (const Preset& p : presets()) {
        if (p.name == name) {
            return p.text;
        }
    }
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const Preset& p : presets()) {
        names.push_back(p.name);
    }
    return names;
}

}  // namespace unitrig::cli
