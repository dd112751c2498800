#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "unitrig/scenario.hpp"
#include "unitrig/serialize.hpp"

using namespace unitrig;
using Catch::Approx;

namespace {

const char* kMinimal = R"(version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block probe out
net in -> st
net st -> out
analysis transient t_stop 100 ms dt 5 us
)";

std::vector<Diagnostic> all_diagnostics(const std::string& text) {
    ParseResult parsed = parse_scenario(text);
    std::vector<Diagnostic> diagnostics = std::move(parsed.diagnostics);
    if (parsed.doc.has_value()) {
        const std::vector<Diagnostic> more = validate_scenario(*parsed.doc);
        diagnostics.insert(diagnostics.end(), more.begin(), more.end());
    }
    return diagnostics;
}

int error_count(const std::vector<Diagnostic>& ds) {
    int n = 0;
    for (const Diagnostic& d : ds) {
        n += d.severity == Diagnostic::Severity::Error ? 1 : 0;
    }
    return n;
}

bool any_mentions(const std::vector<Diagnostic>& ds, const std::string& needle) {
    for (const Diagnostic& d : ds) {
        if (d.message.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

/// Small corpus of structurally distinct valid documents.
std::vector<ScenarioDoc> valid_corpus() {
    std::vector<std::string> texts;
    texts.push_back(kMinimal);
    texts.push_back(R"(version 1
block source in triangle lo 0 pA hi 500 pA period 200 ms
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block probe vin
block probe out
net in -> vin
net in -> st
net st -> out
analysis transient t_stop 200 ms dt 5 us sample_every 8
)");
    texts.push_back(R"(version 1
seed 99
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA
block probe out
net in -> st
net st -> out
analysis monte_carlo target st sigma 10 pA runs 25
)");
    texts.push_back(R"(version 1
block source in constant level 0 pA
block inv_schmitt ist i_gain 486 pA i_thresh 368 pA i_width 216 pA gain_offset 5 pA tau_fb 100 us
block probe out
net in -> ist
net ist -> out
analysis dc_sweep lo 0 pA hi 500 pA steps 50 engine smooth
)");
    texts.push_back(R"(version 1
block source a spikes pulse_width 5 ms events (100 ms +) (300 ms -)
block source b spikes pulse_width 5 ms events (200 ms +)
analysis gate kind nor mode ideal in1 a in2 b t_stop 600 ms dt 5 us sample_every 10
)");
    texts.push_back(R"(version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block heaviside h threshold 750 pA gain 500 pA
block probe out
net in -> st
net st -> h
net h -> out
analysis tunability target st which gain lo 50 pA hi 500 pA steps 10
)");

    std::vector<ScenarioDoc> docs;
    for (const std::string& text : texts) {
        ParseResult parsed = parse_scenario(text);
        REQUIRE(parsed.ok());
        REQUIRE(error_count(validate_scenario(*parsed.doc)) == 0);
        docs.push_back(std::move(*parsed.doc));
    }
    return docs;
}

}  // namespace

TEST_CASE("the minimal document parses into three blocks") {
    const ParseResult parsed = parse_scenario(kMinimal);
    REQUIRE(parsed.ok());
    const ScenarioDoc& doc = *parsed.doc;
    CHECK(doc.version == 1);
    CHECK(doc.blocks.size() == 3);
    CHECK(doc.nets.size() == 2);
    REQUIRE(std::holds_alternative<TransientRequest>(doc.analysis));
    const auto& req = std::get<TransientRequest>(doc.analysis);
    CHECK(req.t_stop == Approx(0.100));
    CHECK(req.dt == Approx(5e-6));
    CHECK(error_count(validate_scenario(doc)) == 0);

    const TriggerDecl& t = std::get<TriggerDecl>(doc.find_block("st")->decl);
    CHECK(t.params.i_gain == Approx(486.0));
    CHECK(t.cal.thresh_offset == Approx(-18.0));
}

TEST_CASE("bistability violations are validation errors") {
    const std::string text = R"(version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 400 pA
block probe out
net in -> st
net st -> out
analysis transient t_stop 1 ms dt 5 us
)";
    const auto ds = all_diagnostics(text);
    CHECK(error_count(ds) == 1);
    CHECK(any_mentions(ds, "bistability"));
    CHECK(any_mentions(ds, "i_width"));
}

TEST_CASE("unknown keys are errors with a suggestion") {
    const std::string text = R"(version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA ithreshold 368 pA i_width 216 pA
block probe out
net in -> st
net st -> out
analysis transient t_stop 1 ms dt 5 us
)";
    const ParseResult parsed = parse_scenario(text);
    CHECK_FALSE(parsed.ok());
    bool found = false;
    for (const Diagnostic& d : parsed.diagnostics) {
        if (d.identifier == "ithreshold") {
            found = true;
            CHECK(d.message.find("i_thresh") != std::string::npos);
            CHECK(d.loc.line == 3);
        }
    }
    CHECK(found);
}

TEST_CASE("probes referencing undeclared blocks are single errors") {
    const std::string text = R"(version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA
block probe out
net in -> st
net stX -> out
analysis transient t_stop 1 ms dt 5 us
)";
    const auto ds = all_diagnostics(text);
    CHECK(error_count(ds) == 1);
    bool names_stx = false;
    for (const Diagnostic& d : ds) {
        names_stx = names_stx || d.identifier == "stX";
    }
    CHECK(names_stx);
}

TEST_CASE("spike separation violations are validation errors") {
    const std::string text = R"(version 1
block source a spikes pulse_width 5 ms events (10 ms +) (11 ms -)
block source b spikes pulse_width 5 ms events (100 ms +)
analysis gate kind and mode ideal in1 a in2 b t_stop 500 ms dt 5 us
)";
    const auto ds = all_diagnostics(text);
    CHECK(error_count(ds) >= 1);
    CHECK(any_mentions(ds, "separation"));
}

TEST_CASE("a valid document yields no diagnostics") {
    CHECK(all_diagnostics(kMinimal).empty());
}

TEST_CASE("strict units: bare numbers and wrong suffixes are rejected") {
    CHECK_FALSE(parse_scenario("version 1\nblock source in constant level 250\n").ok());
    CHECK_FALSE(parse_scenario("version 1\nblock source in constant level 250 nA\n").ok());
    CHECK_FALSE(
        parse_scenario("version 1\nblock source in triangle lo 0 pA hi 1 pA period 5\n").ok());
    const ParseResult bad_time =
        parse_scenario("version 1\nanalysis transient t_stop 100 kHz dt 5 us\n");
    CHECK_FALSE(bad_time.ok());
    CHECK(any_mentions(bad_time.diagnostics, "time unit"));
}

TEST_CASE("duplicate keys and trailing tokens are parse errors") {
    CHECK_FALSE(
        parse_scenario("version 1\nblock source in constant level 1 pA level 2 pA\n").ok());
    CHECK_FALSE(parse_scenario("version 1\nversion 1\n").ok());
    CHECK_FALSE(parse_scenario("version 1 extra\n").ok());
    CHECK_FALSE(parse_scenario("version 1\nblock probe p trailing\n").ok());
}

TEST_CASE("missing analysis and duplicate analysis are both rejected") {
    CHECK(error_count(all_diagnostics("version 1\nblock probe p\n")) >= 1);
    const std::string twice = R"(version 1
analysis transient t_stop 1 ms dt 5 us
analysis transient t_stop 1 ms dt 5 us
)";
    const ParseResult parsed = parse_scenario(twice);
    CHECK_FALSE(parsed.ok());
    CHECK(any_mentions(parsed.diagnostics, "exactly one"));
}

TEST_CASE("documents with several seeded errors report them all") {
    // Five independent problems: unknown key, missing unit, bistability
    // violation, duplicate block id, dangling net.
    const std::string text = R"(version 1
block source in constant level 0 pA
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 400 pA
block probe out
block probe out
block source noisy constant levell 0 pA
block source bare constant level 5
net in -> st
net st -> out
net ghost -> out
analysis transient t_stop 1 ms dt 5 us
)";
    const auto ds = all_diagnostics(text);
    CHECK(error_count(ds) >= 5);
    CHECK(any_mentions(ds, "levell"));
    CHECK(any_mentions(ds, "unit"));
    CHECK(any_mentions(ds, "bistability"));
    CHECK(any_mentions(ds, "ghost"));
    CHECK(any_mentions(ds, "duplicate block id"));
}

TEST_CASE("round-trip: parse after serialize is structurally identical") {
    for (const ScenarioDoc& doc : valid_corpus()) {
        const std::string text = serialize_scenario(doc);
        const ParseResult reparsed = parse_scenario(text);
        REQUIRE(reparsed.ok());
        CHECK(*reparsed.doc == doc);
    }
}

TEST_CASE("serialize is a byte-level fixed point over parse") {
    for (const ScenarioDoc& doc : valid_corpus()) {
        const std::string once = serialize_scenario(doc);
        const ParseResult reparsed = parse_scenario(once);
        REQUIRE(reparsed.ok());
        CHECK(serialize_scenario(*reparsed.doc) == once);
    }
}

TEST_CASE("mutated inputs never crash the parser") {
    std::mt19937_64 rng(77);
    const std::string base = kMinimal;
    for (int i = 0; i < 2000; ++i) {
        std::string text = base;
        const int edits = 1 + static_cast<int>(rng() % 8);
        for (int e = 0; e < edits; ++e) {
            switch (rng() % 4) {
                case 0:  // flip a byte
                    if (!text.empty()) {
                        text[rng() % text.size()] = static_cast<char>(rng() % 256);
                    }
                    break;
                case 1:  // truncate
                    if (!text.empty()) {
                        text.resize(rng() % text.size());
                    }
                    break;
                case 2:  // duplicate a slice
                    if (!text.empty()) {
                        const std::size_t at = rng() % text.size();
                        text.insert(at, text.substr(at / 2, rng() % 40));
                    }
                    break;
                default:  // inject noise token
                    text.insert(rng() % (text.size() + 1), " 1e309 pA ( ) -> \t");
                    break;
            }
        }
        std::vector<Diagnostic> ds;
        REQUIRE_NOTHROW(ds = all_diagnostics(text));
    }
}

TEST_CASE("trace CSV has a header plus one row per sample") {
    Trace trace;
    trace.dt = 1e-3;
    trace.probes = {"out"};
    trace.series.resize(1);
    for (int i = 0; i < 3; ++i) {
        trace.time.push_back(i * trace.dt);
        trace.series[0].push_back(100.0 + i);
    }
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    const std::string text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.rfind("time_s,out\n", 0) == 0);
    CHECK(text.find("0.001000000,101.00") != std::string::npos);

    Trace empty;
    empty.dt = 1e-3;
    empty.probes = {"out"};
    empty.series.resize(1);
    std::ostringstream empty_csv;
    write_trace_csv(empty_csv, empty);
    CHECK(empty_csv.str() == "time_s,out\n");
}

TEST_CASE("metrics JSON carries the paper baseline and stable key order") {
    HysteresisMetrics m;
    m.bistable = true;
    m.i_th_high = 350.02;
    m.i_th_low = 149.98;
    m.hyst_width = 200.04;
    m.high_level = 500.0;
    const std::string text = hysteresis_json(m);
    CHECK(text.find("\"i_th_high_pA\": 350.0") != std::string::npos);

    const nlohmann::json parsed = nlohmann::json::parse(text);
    CHECK(parsed.at("i_th_high_pA").get<double>() == Approx(350.02));
    CHECK(parsed.at("bistable").get<bool>());

    // Unset metrics serialize as nulls, not absent keys.
    const std::string unset = hysteresis_json(HysteresisMetrics{});
    const nlohmann::json parsed_unset = nlohmann::json::parse(unset);
    CHECK(parsed_unset.at("i_th_high_pA").is_null());
}

TEST_CASE("scenario networks build and run end to end") {
    const ParseResult parsed = parse_scenario(kMinimal);
    REQUIRE(parsed.ok());
    const Network net = build_network_from(*parsed.doc);
    CHECK(net.size() == 3);
    const auto& req = std::get<TransientRequest>(parsed.doc->analysis);
    const Trace trace = run_transient(net, {}, req.t_stop, req.dt);
    CHECK(trace.probes == std::vector<std::string>{"out"});
}
