#include "repro.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "output.hpp"
#include "presets.hpp"
#include "unitrig/scenario.hpp"
#include "unitrig/serialize.hpp"

namespace unitrig::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Check {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    bool pass() const { return value >= lo && value <= hi; }
};

class Grade {
public:
    void add(std::string name, double value, double lo, double hi) {
        checks_.push_back({std::move(name), value, lo, hi});
    }

    bool all_pass() const {
        return std::all_of(checks_.begin(), checks_.end(),
                           [](const Check& c) { return c.pass(); });
    }

    ordered_json json(const std::string& figure) const {
        ordered_json j;
        j["figure"] = figure;
        j["pass"] = all_pass();
        j["checks"] = ordered_json::array();
        for (const Check& c : checks_) {
            j["checks"].push_back({{"name", c.name},
                                   {"value", c.value},
                                   {"lo", c.lo},
                                   {"hi", c.hi},
                                   {"pass", c.pass()}});
        }
        return j;
    }

    void print(std::ostream& out) const {
        for (const Check& c : checks_) {
            out << "  " << (c.pass() ? "pass" : "FAIL") << "  " << c.name << " = " << c.value
                << " (expected " << c.lo << " .. " << c.hi << ")\n";
        }
    }

private:
    std::vector<Check> checks_;
};

ScenarioDoc load_preset(const std::string& name) {
    const ParseResult parsed = parse_scenario(*preset_text(name));
    return *parsed.doc;  // presets are tested to parse clean
}

int finish(const std::string& figure, const Grade& grade, const std::filesystem::path& outdir,
           std::ostream& out) {
    commit_file(outdir, figure + "_metrics.json", grade.json(figure).dump(2) + "\n");
    grade.print(out);
    out << figure << ": " << (grade.all_pass() ? "pass" : "FAIL") << "\n";
    return grade.all_pass() ? 0 : 1;
}

int repro_fig2a(const std::filesystem::path& outdir, std::ostream& out) {
    const ScenarioDoc doc = load_preset("fig2a");
    const auto& req = std::get<TransientRequest>(doc.analysis);
    const Network net = build_network_from(doc);
    const Trace trace = run_transient(net, {}, req.t_stop, req.dt);

    std::ostringstream csv;
    write_trace_csv(csv, trace, req.sample_every);
    commit_file(outdir, "fig2a.csv", csv.str());

    // Switching points read off the triangular sweep: input level at the
    // output's half-level crossings.
    const auto& vin = trace.series_for("vin");
    const auto& vout = trace.series_for("out");
    const double half = 250.0;
    double up_at = -1.0;
    double down_at = -1.0;
    for (std::size_t i = 1; i < vout.size(); ++i) {
        if (up_at < 0.0 && vout[i - 1] <= half && vout[i] > half) {
            up_at = vin[i];
        }
        if (up_at > 0.0 && down_at < 0.0 && vout[i - 1] > half && vout[i] <= half) {
            down_at = vin[i];
        }
    }
    const auto overshoot = measure_overshoot(trace, "out", 500.0);

    Grade grade;
    grade.add("up_switch_pA", up_at, 340.0, 360.0);
    grade.add("down_switch_pA", down_at, 140.0, 160.0);
    grade.add("overshoot_fraction", overshoot.value_or(-1.0), 0.05, 0.15);
    return finish("fig2a", grade, outdir, out);
}

int repro_fig2b(const std::filesystem::path& outdir, std::ostream& out) {
    const ScenarioDoc doc = load_preset("fig2b");
    const auto& req = std::get<DcSweepRequest>(doc.analysis);
    const Network net = build_network_from(doc);
    const DcSweepResult result =
        dc_sweep(net, *req.source, *req.probe, req.lo, req.hi, req.steps, req.engine);

    std::ostringstream csv;
    write_dc_csv(csv, result);
    commit_file(outdir, "fig2b.csv", csv.str());

    Grade grade;
    const HysteresisMetrics& m = result.metrics;
    grade.add("i_th_high_pA", m.i_th_high.value_or(-1.0), 348.0, 352.0);
    grade.add("i_th_low_pA", m.i_th_low.value_or(-1.0), 148.0, 152.0);
    grade.add("hyst_width_pA", m.hyst_width.value_or(-1.0), 198.0, 202.0);
    grade.add("high_level_pA", m.high_level.value_or(-1.0), 498.0, 502.0);
    grade.add("bistable", m.bistable ? 1.0 : 0.0, 1.0, 1.0);
    return finish("fig2b", grade, outdir, out);
}

int repro_fig2c(const std::filesystem::path& outdir, std::optional<std::uint64_t> seed_override,
                std::optional<int> runs_override, std::ostream& out) {
    const ScenarioDoc doc = load_preset("fig2c");
    const auto& req = std::get<MonteCarloRequest>(doc.analysis);
    const TriggerDecl& t = std::get<TriggerDecl>(doc.find_block(req.target)->decl);
    const std::uint64_t seed = seed_override.value_or(doc.seed.value_or(0));
    const int runs = runs_override.value_or(req.runs);
    const MismatchDistribution dist = monte_carlo(t.params, t.cal, t.dyn, req.sigma, runs, seed);

    std::ostringstream csv;
    write_mc_csv(csv, dist);
    commit_file(outdir, "fig2c.csv", csv.str());

    Grade grade;
    grade.add("retention", dist.retention, 1.0, 1.0);
    grade.add("std_i_th_high_pA", dist.std_i_th_high, 5.0, 25.0);
    grade.add("std_i_th_low_pA", dist.std_i_th_low, 5.0, 25.0);
    grade.add("std_hyst_width_pA", dist.std_hyst_width, 5.0, 25.0);
    grade.add("std_high_level_pA", dist.std_high_level, 5.0, 25.0);
    return finish("fig2c", grade, outdir, out);
}

int repro_fig3(const std::string& figure, const std::filesystem::path& outdir,
               std::ostream& out) {
    const ScenarioDoc doc = load_preset(figure);
    const auto& req = std::get<TunabilityRequest>(doc.analysis);
    const TriggerDecl& t = std::get<TriggerDecl>(doc.find_block(req.target)->decl);
    const LinearityReport report =
        tunability_sweep(req.which, t.params, t.cal, t.dyn, req.lo, req.hi, req.steps);

    std::ostringstream csv;
    write_tune_csv(csv, report);
    commit_file(outdir, figure + ".csv", csv.str());

    Grade grade;
    if (figure == "fig3a") {
        grade.add("rel_error_at_500pA", report.rel_error_at_top, 0.025, 0.031);
    } else if (figure == "fig3b") {
        grade.add("rel_error_at_400pA", report.rel_error_at_top, 0.042, 0.048);
    } else {
        grade.add("rel_error_at_300pA", report.rel_error_at_top, 0.0485, 0.0565);
    }
    grade.add("slope", report.slope, 0.995, 1.005);
    return finish(figure, grade, outdir, out);
}

int repro_fig5(const std::filesystem::path& outdir, std::ostream& out) {
    const ScenarioDoc doc = load_preset("fig5");
    const auto& req = std::get<GateRequest>(doc.analysis);
    const SourceDecl& a = std::get<SourceDecl>(doc.find_block(req.in1)->decl);
    const SourceDecl& b = std::get<SourceDecl>(doc.find_block(req.in2)->decl);

    const auto last_polarity = [](const SpikeProgram& program, Seconds time) {
        Polarity last = Polarity::Minus;
        for (const SpikeEvent& e : program) {
            if (e.time <= time) {
                last = e.polarity;
            }
        }
        return last;
    };

    Grade grade;
    for (GateKind kind : kAllGates) {
        const GateRun run =
            run_gate(kind, a.program, b.program, a.encoding, req.mode, req.t_stop, req.dt);
        std::ostringstream csv;
        write_trace_csv(csv, run.trace, req.sample_every);
        commit_file(outdir, "fig5_" + to_string(kind) + ".csv", csv.str());

        int checked = 0;
        int passed = 0;
        bool persistent = true;
        for (const GateSegment& seg : run.segments) {
            if (!seg.inputs_defined || !seg.settled) {
                continue;
            }
            const Polarity pa = last_polarity(a.program, seg.t_begin);
            const Polarity pb = last_polarity(b.program, seg.t_begin);
            const Logic expected = truth_table(kind, pa, pb) ? Logic::One : Logic::Zero;
            ++checked;
            passed += seg.value == expected ? 1 : 0;
            persistent = persistent && seg.persistent;
        }
        grade.add(to_string(kind) + "_segments_pass", passed, checked, checked);
        grade.add(to_string(kind) + "_persistent", persistent ? 1.0 : 0.0, 1.0, 1.0);
    }
    return finish("fig5", grade, outdir, out);
}

}  // namespace

std::vector<std::string> repro_figure_ids() {
    return {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig5"};
}

int run_repro(const std::string& figure, const std::filesystem::path& outdir,
              std::optional<std::uint64_t> seed_override, std::optional<int> runs_override,
              std::ostream& out) {
    if (figure == "fig2a") {
        return repro_fig2a(outdir, out);
    }
    if (figure == "fig2b") {
        return repro_fig2b(outdir, out);
    }
    if (figure == "fig2c") {
        return repro_fig2c(outdir, seed_override, runs_override, out);
    }
    if (figure == "fig3a" || figure == "fig3b" || figure == "fig3c") {
        return repro_fig3(figure, outdir, out);
    }
    return repro_fig5(outdir, out);
}

}  // namespace unitrig::cli
