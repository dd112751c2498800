#include <benchmark/benchmark.h>

#include "unitrig/analysis.hpp"
#include "unitrig/logic.hpp"
#include "unitrig/scenario.hpp"

using namespace unitrig;

namespace {

void BM_IdealStep(benchmark::State& state) {
    const TriggerModel model(SchmittParams::baseline(), Calibration::defaults(), DynamicsConfig{},
                             false);
    SchmittState s;
    double input = 0.0;
    for (auto _ : state) {
        input = input > 400.0 ? 0.0 : input + 7.0;
        benchmark::DoNotOptimize(model.ideal_update(s, input));
    }
}
BENCHMARK(BM_IdealStep);

void BM_SmoothEquilibria(benchmark::State& state) {
    const SchmittParams p = SchmittParams::baseline();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            smooth_equilibria(p, Calibration::defaults(), DynamicsConfig{}, 250.0));
    }
}
BENCHMARK(BM_SmoothEquilibria);

void BM_DcHysteresis(benchmark::State& state) {
    const SchmittParams p = SchmittParams::baseline();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            dc_hysteresis(p, Calibration::defaults(), DynamicsConfig{}, 0.0, 500.0, 100));
    }
}
BENCHMARK(BM_DcHysteresis);

void BM_TriggerTransientMillisecond(benchmark::State& state) {
    std::vector<Block> blocks;
    blocks.push_back(Block::source("in", Stimulus::triangle(0.0, 500.0, 1e-3)));
    blocks.push_back(Block::schmitt("st", SchmittParams::baseline(), Calibration::defaults()));
    blocks.push_back(Block::probe("out"));
    const Network net = Network::build(std::move(blocks), {{{"in"}, "st"}, {{"st"}, "out"}});
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_transient(net, {}, 1e-3, 5e-6));
    }
}
BENCHMARK(BM_TriggerTransientMillisecond);

void BM_XorGateSpikePair(benchmark::State& state) {
    const SpikeProgram a = {{0.010, Polarity::Plus}};
    const SpikeProgram b = {{0.030, Polarity::Minus}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            run_gate(GateKind::Xor, a, b, Encoding{}, GateMode::Calibrated, 0.060, 7.8125e-6));
    }
}
BENCHMARK(BM_XorGateSpikePair);

void BM_ParseScenario(benchmark::State& state) {
    const std::string text = R"(version 1
block source in triangle lo 0 pA hi 500 pA period 200 ms
block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default
block probe out
net in -> st
net st -> out
analysis transient t_stop 200 ms dt 5 us
)";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_scenario(text));
    }
}
BENCHMARK(BM_ParseScenario);

void BM_MonteCarlo100(benchmark::State& state) {
    const SchmittParams p = SchmittParams::baseline();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            monte_carlo(p, Calibration::defaults(), DynamicsConfig{}, 10.0, 100, 1));
    }
}
BENCHMARK(BM_MonteCarlo100);

}  // namespace

BENCHMARK_MAIN();
