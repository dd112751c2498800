#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <map>

#include "support.hpp"
#include "unitrig/logic.hpp"

using namespace unitrig;
using Catch::Approx;

namespace {

constexpr Seconds kDt = 6.25e-6;  // divides the 50 ms event grid
constexpr Seconds kStop = 0.45;

SpikeProgram one(Seconds t, Polarity p) {
    return {{t, p}};
}

Logic settled_gate(GateKind kind, Polarity a, Polarity b, GateMode mode) {
    const GateRun run = run_gate(kind, one(0.050, a), one(0.150, b), Encoding{}, mode, kStop, kDt);
    return run.final_value();
}

constexpr std::array<Polarity, 2> kPols = {Polarity::Minus, Polarity::Plus};

}  // namespace

TEST_CASE("decode bands split the unipolar range in three") {
    const Encoding enc;
    CHECK(decode_level(enc, 0.0) == Logic::Zero);
    CHECK(decode_level(enc, 124.9) == Logic::Zero);
    CHECK(decode_level(enc, 125.0) == Logic::Undefined);
    CHECK(decode_level(enc, 250.0) == Logic::Undefined);
    CHECK(decode_level(enc, 375.0) == Logic::Undefined);
    CHECK(decode_level(enc, 375.1) == Logic::One);
    CHECK(decode_level(enc, 500.0) == Logic::One);
}

TEST_CASE("render_stimulus produces the three-level waveform") {
    const Encoding enc;
    const Stimulus wave = render_stimulus(one(0.010, Polarity::Plus), enc);
    CHECK(wave.at(0.0) == Approx(250.0));
    CHECK(wave.at(0.012) == Approx(500.0));
    CHECK(wave.at(0.0149) == Approx(500.0));
    CHECK(wave.at(0.015) == Approx(250.0));
    CHECK(wave.at(0.050) == Approx(250.0));

    const Stimulus minus = render_stimulus(one(0.010, Polarity::Minus), enc);
    CHECK(minus.at(0.012) == Approx(0.0));

    const Stimulus empty = render_stimulus({}, enc);
    CHECK(empty.at(0.0) == Approx(250.0));
    CHECK(empty.at(5.0) == Approx(250.0));
}

TEST_CASE("spike separation is enforced and names both events") {
    const Encoding enc;
    const SpikeProgram tight = {{0.010, Polarity::Plus}, {0.012, Polarity::Minus}};
    try {
        render_stimulus(tight, enc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("0.01") != std::string::npos);
        CHECK(msg.find("0.012") != std::string::npos);
    }
    const SpikeProgram unsorted = {{0.100, Polarity::Plus}, {0.050, Polarity::Minus}};
    CHECK_THROWS_AS(render_stimulus(unsorted, enc), ConfigError);
}

TEST_CASE("gate networks carry the documented structure") {
    const Encoding enc;
    const auto count = [](const Network& net, BlockKind kind) {
        int n = 0;
        for (const Block& b : net.blocks()) {
            if (b.kind() == kind) {
                ++n;
            }
        }
        return n;
    };

    SECTION("NOR: two of each trigger and one threshold stage at 750 pA") {
        const Network nor = make_gate(GateKind::Nor, enc, GateMode::Calibrated);
        CHECK(count(nor, BlockKind::Schmitt) == 2);
        CHECK(count(nor, BlockKind::InvSchmitt) == 2);
        CHECK(count(nor, BlockKind::Heaviside) == 1);
        const Block& h = nor.block(*nor.index_of("h1"));
        CHECK(std::get<HeavisideSpec>(h.spec).threshold == Approx(750.0));
    }
    SECTION("XOR: two threshold stages at 750 pA whose outputs sum") {
        const Network gate = make_gate(GateKind::Xor, enc, GateMode::Calibrated);
        CHECK(count(gate, BlockKind::Heaviside) == 2);
        for (const char* id : {"h1", "h2"}) {
            const Block& h = gate.block(*gate.index_of(id));
            CHECK(std::get<HeavisideSpec>(h.spec).threshold == Approx(750.0));
        }
        const std::size_t out = *gate.index_of("out");
        CHECK(gate.inputs_of(out).size() == 2);
    }
    SECTION("OR: threshold stage at half the high level") {
        const Network gate = make_gate(GateKind::Or, enc, GateMode::Calibrated);
        const Block& h = gate.block(*gate.index_of("h1"));
        CHECK(std::get<HeavisideSpec>(h.spec).threshold == Approx(250.0));
    }
}

TEST_CASE("truth_table implements the Boolean semantics") {
    CHECK_FALSE(truth_table(GateKind::Nand, Polarity::Plus, Polarity::Plus));
    CHECK(truth_table(GateKind::Nor, Polarity::Minus, Polarity::Minus));
    CHECK(truth_table(GateKind::Or, Polarity::Minus, Polarity::Plus));
    for (Polarity a : kPols) {
        for (Polarity b : kPols) {
            const bool x = a == Polarity::Plus;
            const bool y = b == Polarity::Plus;
            CHECK(truth_table(GateKind::And, a, b) == (x && y));
            CHECK(truth_table(GateKind::Or, a, b) == (x || y));
            CHECK(truth_table(GateKind::Nand, a, b) == !(x && y));
            CHECK(truth_table(GateKind::Nor, a, b) == !(x || y));
            CHECK(truth_table(GateKind::Xor, a, b) == (x != y));
        }
    }
}

TEST_CASE("every gate decodes its full truth table in both modes") {
    for (GateMode mode : {GateMode::Ideal, GateMode::Calibrated}) {
        for (GateKind kind : kAllGates) {
            for (Polarity a : kPols) {
                for (Polarity b : kPols) {
                    const Logic expected =
                        truth_table(kind, a, b) ? Logic::One : Logic::Zero;
                    INFO("gate " << to_string(kind) << " mode "
                                 << (mode == GateMode::Ideal ? "ideal" : "calibrated") << " ("
                                 << (a == Polarity::Plus ? "+" : "-") << ","
                                 << (b == Polarity::Plus ? "+" : "-") << ")");
                    REQUIRE(settled_gate(kind, a, b, mode) == expected);
                }
            }
        }
    }
}

TEST_CASE("gate outputs are symmetric in their inputs") {
    for (GateKind kind : kAllGates) {
        for (Polarity a : kPols) {
            for (Polarity b : kPols) {
                CHECK(settled_gate(kind, a, b, GateMode::Calibrated) ==
                      settled_gate(kind, b, a, GateMode::Calibrated));
            }
        }
    }
}

TEST_CASE("NAND and NOR complement AND and OR") {
    for (Polarity a : kPols) {
        for (Polarity b : kPols) {
            const auto flip = [](Logic v) {
                return v == Logic::One ? Logic::Zero : Logic::One;
            };
            CHECK(settled_gate(GateKind::Nand, a, b, GateMode::Calibrated) ==
                  flip(settled_gate(GateKind::And, a, b, GateMode::Calibrated)));
            CHECK(settled_gate(GateKind::Nor, a, b, GateMode::Calibrated) ==
                  flip(settled_gate(GateKind::Or, a, b, GateMode::Calibrated)));
        }
    }
}

TEST_CASE("extra rest between spikes does not change the decode") {
    for (Seconds gap : {0.1, 1.5}) {
        const GateRun run = run_gate(GateKind::Xor, one(0.050, Polarity::Plus),
                                     one(0.050 + gap, Polarity::Minus), Encoding{},
                                     GateMode::Calibrated, 0.050 + gap + 0.300, kDt);
        CHECK(run.final_value() == Logic::One);
    }
}

TEST_CASE("repeating the same polarity leaves the decode unchanged") {
    const SpikeProgram repeated = {{0.050, Polarity::Plus}, {0.250, Polarity::Plus}};
    const GateRun run = run_gate(GateKind::And, repeated, one(0.150, Polarity::Plus), Encoding{},
                                 GateMode::Calibrated, kStop, kDt);
    CHECK(run.final_value() == Logic::One);

    const SpikeProgram repeated_minus = {{0.050, Polarity::Minus}, {0.250, Polarity::Minus}};
    const GateRun run2 = run_gate(GateKind::Or, repeated_minus, one(0.150, Polarity::Minus),
                                  Encoding{}, GateMode::Calibrated, kStop, kDt);
    CHECK(run2.final_value() == Logic::Zero);
}

TEST_CASE("decode stays undefined until both inputs have spiked") {
    const GateRun run = run_gate(GateKind::And, one(0.050, Polarity::Plus), {}, Encoding{},
                                 GateMode::Calibrated, kStop, kDt);
    CHECK(run.final_value() == Logic::Undefined);
    for (const GateSegment& seg : run.segments) {
        CHECK(seg.value == Logic::Undefined);
    }

    const GateRun both = run_gate(GateKind::And, one(0.050, Polarity::Plus),
                                  one(0.150, Polarity::Plus), Encoding{}, GateMode::Calibrated,
                                  kStop, kDt);
    bool saw_undefined_prefix = false;
    for (const GateSegment& seg : both.segments) {
        if (seg.t_begin < 0.150) {
            CHECK(seg.value == Logic::Undefined);
            saw_undefined_prefix = true;
        }
    }
    CHECK(saw_undefined_prefix);
}

TEST_CASE("settled segments persist within two picoamps") {
    const GateRun run = run_gate(GateKind::Nor, one(0.050, Polarity::Minus),
                                 one(0.150, Polarity::Minus), Encoding{}, GateMode::Calibrated,
                                 kStop, kDt);
    REQUIRE(run.final_value() == Logic::One);
    for (const GateSegment& seg : run.segments) {
        if (seg.settled && seg.inputs_defined) {
            CHECK(seg.persistent);
            CHECK(seg.max_deviation <= 2.0);
        }
    }
}

TEST_CASE("half adder implements binary addition on polarities") {
    const std::map<std::pair<Polarity, Polarity>, std::pair<Logic, Logic>> expected = {
        {{Polarity::Plus, Polarity::Plus}, {Logic::Zero, Logic::One}},
        {{Polarity::Plus, Polarity::Minus}, {Logic::One, Logic::Zero}},
        {{Polarity::Minus, Polarity::Plus}, {Logic::One, Logic::Zero}},
        {{Polarity::Minus, Polarity::Minus}, {Logic::Zero, Logic::Zero}},
    };
    for (const auto& [inputs, outputs] : expected) {
        const HalfAdderRun run = half_adder(one(0.050, inputs.first), one(0.150, inputs.second),
                                            Encoding{}, GateMode::Calibrated, kStop, kDt);
        INFO("(" << (inputs.first == Polarity::Plus ? "+" : "-") << ","
                 << (inputs.second == Polarity::Plus ? "+" : "-") << ")");
        CHECK(run.final_sum() == outputs.first);
        CHECK(run.final_carry() == outputs.second);
    }
}

TEST_CASE("encoding invariants are validated") {
    Encoding enc;
    enc.rest = 600.0;
    CHECK_THROWS_AS(validate(enc), ConfigError);
    enc = Encoding{};
    enc.pulse_width = 0.0;
    CHECK_THROWS_AS(validate(enc), ConfigError);
}
