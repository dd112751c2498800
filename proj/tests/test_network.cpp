#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "support.hpp"
#include "unitrig/logic.hpp"
#include "unitrig/simulate.hpp"

using namespace unitrig;
using Catch::Approx;

namespace {

/// source -> schmitt -> probe chain at baseline with default calibration.
Network single_trigger(Stimulus stim = Stimulus::constant(0.0), DynamicsConfig dyn = {}) {
    std::vector<Block> blocks;
    blocks.push_back(Block::source("in", std::move(stim)));
    blocks.push_back(Block::schmitt("st", SchmittParams::baseline(), Calibration::defaults(), dyn));
    blocks.push_back(Block::probe("out"));
    return Network::build(std::move(blocks), {{{"in"}, "st"}, {{"st"}, "out"}});
}

bool mentions(const NetworkBuildError& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("a minimal chain builds and orders topologically") {
    const Network net = single_trigger();
    CHECK(net.size() == 3);
    CHECK(net.source_indices().size() == 1);
    CHECK(net.trigger_indices().size() == 1);
    CHECK(net.probe_indices().size() == 1);
    const auto& topo = net.topo_order();
    const auto pos = [&](const std::string& id) {
        return std::find(topo.begin(), topo.end(), *net.index_of(id)) - topo.begin();
    };
    CHECK(pos("in") < pos("st"));
    CHECK(pos("st") < pos("out"));
}

TEST_CASE("build reports every issue with the offending identifiers") {
    SECTION("dangling net") {
        std::vector<Block> blocks;
        blocks.push_back(Block::source("in", Stimulus::constant(0.0)));
        blocks.push_back(Block::probe("out"));
        try {
            Network::build(std::move(blocks), {{{"stX"}, "out"}});
            FAIL("expected NetworkBuildError");
        } catch (const NetworkBuildError& e) {
            CHECK(mentions(e, "stX"));
        }
    }
    SECTION("block-level self feedback is rejected") {
        std::vector<Block> blocks;
        blocks.push_back(Block::source("in", Stimulus::constant(0.0)));
        blocks.push_back(Block::schmitt("st", SchmittParams::baseline()));
        try {
            Network::build(std::move(blocks), {{{"in", "st"}, "st"}});
            FAIL("expected NetworkBuildError");
        } catch (const NetworkBuildError& e) {
            CHECK(mentions(e, "cycle"));
            CHECK(mentions(e, "st"));
        }
    }
    SECTION("duplicate ids") {
        std::vector<Block> blocks;
        blocks.push_back(Block::source("x", Stimulus::constant(0.0)));
        blocks.push_back(Block::probe("x"));
        try {
            Network::build(std::move(blocks), {{{"x"}, "x"}});
            FAIL("expected NetworkBuildError");
        } catch (const NetworkBuildError& e) {
            CHECK(mentions(e, "duplicate"));
        }
    }
    SECTION("undriven inputs and invalid parameters are both listed") {
        std::vector<Block> blocks;
        blocks.push_back(Block::schmitt("bad", SchmittParams{486.0, 100.0, 216.0}));
        try {
            Network::build(std::move(blocks), {});
            FAIL("expected NetworkBuildError");
        } catch (const NetworkBuildError& e) {
            CHECK(mentions(e, "bistability"));
            CHECK(mentions(e, "no driver"));
            CHECK(e.issues().size() == 2);
        }
    }
}

TEST_CASE("eval_dc resolves the XOR example") {
    const Network net = make_gate(GateKind::Xor, Encoding{}, GateMode::Calibrated);
    NetworkState state = net.initial_state();

    auto out = eval_dc(net, {{"in1", 500.0}, {"in2", 0.0}}, state);
    CHECK(out.at("out") == Approx(500.0));

    out = eval_dc(net, {{"in1", 500.0}, {"in2", 500.0}}, state);
    CHECK(out.at("out") == Approx(0.0));
}

TEST_CASE("quiescent network reads zero everywhere") {
    const Network net = make_gate(GateKind::Or, Encoding{}, GateMode::Calibrated);
    NetworkState state = net.initial_state();
    const auto out = eval_dc(net, {{"in1", 0.0}, {"in2", 0.0}}, state);
    CHECK(out.at("out") == Approx(0.0));
    CHECK(out.at("st1") == Approx(0.0));
    CHECK(out.at("st2") == Approx(0.0));
}

TEST_CASE("eval_dc requires a value for every source") {
    const Network net = single_trigger();
    NetworkState state = net.initial_state();
    CHECK_THROWS_AS(eval_dc(net, {}, state), SimulationError);
}

TEST_CASE("triangular sweep switches near the calibrated thresholds") {
    const Network net = single_trigger(Stimulus::triangle(0.0, 500.0, 0.200));
    const Trace trace = run_transient(net, {}, 0.200, 5e-6);
    const auto& out = trace.series_for("out");

    double up_at = -1.0;
    double down_at = -1.0;
    const Stimulus tri = Stimulus::triangle(0.0, 500.0, 0.200);
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (up_at < 0.0 && out[i - 1] <= 250.0 && out[i] > 250.0) {
            up_at = tri.at(trace.time[i]);
        }
        if (up_at > 0.0 && down_at < 0.0 && out[i - 1] > 250.0 && out[i] <= 250.0) {
            down_at = tri.at(trace.time[i]);
        }
    }
    CHECK(up_at == Approx(350.0).margin(10.0));
    CHECK(down_at == Approx(150.0).margin(10.0));
}

TEST_CASE("resting input from LOW never lifts the output") {
    const Network net = single_trigger(Stimulus::constant(250.0));
    const Trace trace = run_transient(net, {}, 10.0, 7.9e-6);
    const auto& out = trace.series_for("out");
    const double peak = *std::max_element(out.begin(), out.end());
    CHECK(peak < 1.0);
}

TEST_CASE("empty stimulus set gives a flat trace at the initial equilibrium") {
    const Network net = single_trigger(Stimulus::constant(0.0));
    const Trace trace = run_transient(net, {}, 1e-3, 5e-6);
    const auto& out = trace.series_for("out");
    for (double v : out) {
        REQUIRE(v == Approx(out.front()).margin(1e-12));
    }
}

TEST_CASE("dt beyond the stability bound is rejected with the bound") {
    const Network net = single_trigger();
    CHECK(max_stable_dt(net) == Approx(159e-6 / 20.0));
    try {
        run_transient(net, {}, 0.01, 1e-4);
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        CHECK(std::string(e.what()).find("stability bound") != std::string::npos);
        CHECK(std::string(e.what()).find("7.95e-06") != std::string::npos);
    }
}

TEST_CASE("transient settles onto the DC equilibrium branch") {
    const Network net = single_trigger(Stimulus::constant(400.0));
    NetworkState tran_state = net.initial_state();
    const Trace trace = run_transient(net, {}, 0.300, 5e-6, tran_state);

    NetworkState dc_state = net.initial_state();
    const auto dc = eval_dc(net, {{"in", 400.0}}, dc_state, EvalMode::Smooth);
    CHECK(trace.series_for("out").back() == Approx(dc.at("out")).margin(0.5));
}

TEST_CASE("results do not depend on block declaration order") {
    const SchmittParams p = SchmittParams::baseline();
    const std::vector<Net> nets = {{{"in1"}, "st1"}, {{"in2"}, "st2"}, {{"st1", "st2"}, "h"},
                                   {{"h"}, "out"}};
    std::vector<Block> order_a;
    order_a.push_back(Block::source("in1", Stimulus::constant(400.0)));
    order_a.push_back(Block::source("in2", Stimulus::triangle(0.0, 500.0, 0.01)));
    order_a.push_back(Block::schmitt("st1", p, Calibration::defaults()));
    order_a.push_back(Block::schmitt("st2", p, Calibration::defaults()));
    order_a.push_back(Block::heaviside("h", 750.0, 500.0));
    order_a.push_back(Block::probe("out"));
    std::vector<Block> order_b(order_a.rbegin(), order_a.rend());

    const Network net_a = Network::build(std::move(order_a), nets);
    const Network net_b = Network::build(std::move(order_b), nets);

    NetworkState sa = net_a.initial_state();
    NetworkState sb = net_b.initial_state();
    const auto dc_a = eval_dc(net_a, {{"in1", 400.0}, {"in2", 100.0}}, sa);
    const auto dc_b = eval_dc(net_b, {{"in1", 400.0}, {"in2", 100.0}}, sb);
    CHECK(dc_a == dc_b);

    const Trace tr_a = run_transient(net_a, {}, 0.02, 5e-6);
    const Trace tr_b = run_transient(net_b, {}, 0.02, 5e-6);
    REQUIRE(tr_a.series_for("out").size() == tr_b.series_for("out").size());
    for (std::size_t i = 0; i < tr_a.time.size(); ++i) {
        REQUIRE(tr_a.series_for("out")[i] == tr_b.series_for("out")[i]);
    }
}

TEST_CASE("halving dt changes samples by less than 0.1 pA") {
    const Network net = single_trigger(Stimulus::triangle(0.0, 500.0, 0.100));
    const Trace coarse = run_transient(net, {}, 0.100, 5e-6);
    const Trace fine = run_transient(net, {}, 0.100, 2.5e-6);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < coarse.time.size(); ++i) {
        const double a = coarse.series_for("out")[i];
        const double b = fine.series_for("out")[2 * i];
        max_diff = std::max(max_diff, std::abs(a - b));
    }
    CHECK(max_diff < 0.1);
}

TEST_CASE("current summing on a net is exactly linear") {
    std::vector<Block> blocks;
    blocks.push_back(Block::source("a", Stimulus::constant(0.0)));
    blocks.push_back(Block::source("b", Stimulus::constant(0.0)));
    blocks.push_back(Block::probe("sum"));
    const Network net = Network::build(std::move(blocks), {{{"a", "b"}, "sum"}});

    testutil::Rng rng(5);
    NetworkState s = net.initial_state();
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(0.0, 400.0);
        const double y = rng.uniform(0.0, 400.0);
        const double both = eval_dc(net, {{"a", x}, {"b", y}}, s).at("sum");
        const double only_x = eval_dc(net, {{"a", x}, {"b", 0.0}}, s).at("sum");
        const double only_y = eval_dc(net, {{"a", 0.0}, {"b", y}}, s).at("sum");
        REQUIRE(both == only_x + only_y);
    }
}
