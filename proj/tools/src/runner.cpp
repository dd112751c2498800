#include "runner.hpp"

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "output.hpp"
#include "unitrig/serialize.hpp"

namespace unitrig::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string opt_pa(const std::optional<PicoAmp>& v) {
    return v.has_value() ? format_pa(*v) + " pA" : std::string("n/a");
}

const TriggerDecl& trigger_of(const ScenarioDoc& doc, const std::string& id) {
    const ScenarioBlock* block = doc.find_block(id);
    return std::get<TriggerDecl>(block->decl);
}

std::string resolve_one(const ScenarioDoc& doc, const std::optional<std::string>& named,
                        BlockKind kind) {
    if (named.has_value()) {
        return *named;
    }
    for (const ScenarioBlock& b : doc.blocks) {
        if (b.kind() == kind) {
            return b.id;
        }
    }
    return {};
}

std::string trace_json(const Trace& trace, int sample_every) {
    ordered_json j;
    j["dt_s"] = trace.dt * sample_every;
    j["time_s"] = ordered_json::array();
    for (std::size_t i = 0; i < trace.time.size(); i += static_cast<std::size_t>(sample_every)) {
        j["time_s"].push_back(trace.time[i]);
    }
    for (std::size_t p = 0; p < trace.probes.size(); ++p) {
        ordered_json series = ordered_json::array();
        for (std::size_t i = 0; i < trace.series[p].size();
             i += static_cast<std::size_t>(sample_every)) {
            series.push_back(trace.series[p][i]);
        }
        j[trace.probes[p]] = std::move(series);
    }
    return j.dump(2) + "\n";
}

int run_dc(const ScenarioDoc& doc, const DcSweepRequest& req, const RunConfig& config,
           std::ostream& out) {
    const Network net = build_network_from(doc);
    const std::string source = resolve_one(doc, req.source, BlockKind::Source);
    const std::string probe = resolve_one(doc, req.probe, BlockKind::Probe);
    const DcSweepResult result =
        dc_sweep(net, source, probe, req.lo, req.hi, req.steps, req.engine);

    if (config.format == "json") {
        ordered_json j = ordered_json::parse(hysteresis_json(result.metrics));
        j["curve"] = ordered_json::array();
        for (const DcCurvePoint& p : result.curve) {
            j["curve"].push_back({{"i_in_pA", p.input}, {"up_pA", p.up}, {"down_pA", p.down}});
        }
        const auto path = commit_file(config.outdir, config.stem + "_dc.json", j.dump(2) + "\n");
        out << "wrote " << path.string() << "\n";
    } else {
        std::ostringstream csv;
        write_dc_csv(csv, result);
        const auto csv_path = commit_file(config.outdir, config.stem + "_dc.csv", csv.str());
        const auto json_path = commit_file(config.outdir, config.stem + "_dc_metrics.json",
                                           hysteresis_json(result.metrics));
        out << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
    }

    const HysteresisMetrics& m = result.metrics;
    out << "hysteresis: i_th_high=" << opt_pa(m.i_th_high) << " i_th_low=" << opt_pa(m.i_th_low)
        << " hyst_width=" << opt_pa(m.hyst_width) << " high_level=" << opt_pa(m.high_level)
        << " bistable=" << (m.bistable ? "yes" : "no") << "\n";
    return 0;
}

int run_transient_analysis(const ScenarioDoc& doc, const TransientRequest& req,
                           const RunConfig& config, std::ostream& out) {
    const Network net = build_network_from(doc);
    const Trace trace = run_transient(net, {}, req.t_stop, req.dt);
    std::filesystem::path path;
    if (config.format == "json") {
        path = commit_file(config.outdir, config.stem + "_trace.json",
                           trace_json(trace, req.sample_every));
    } else {
        std::ostringstream csv;
        write_trace_csv(csv, trace, req.sample_every);
        path = commit_file(config.outdir, config.stem + "_trace.csv", csv.str());
    }
    out << "wrote " << path.string() << " (" << trace.time.size() << " samples, "
        << trace.probes.size() << " probe" << (trace.probes.size() == 1 ? "" : "s") << ")\n";
    return 0;
}

int run_mc(const ScenarioDoc& doc, const MonteCarloRequest& req, const RunConfig& config,
           std::ostream& out) {
    const TriggerDecl& t = trigger_of(doc, req.target);
    const std::uint64_t seed = config.overrides.seed.value_or(doc.seed.value_or(0));
    const int runs = config.overrides.runs.value_or(req.runs);
    const MismatchDistribution dist = monte_carlo(t.params, t.cal, t.dyn, req.sigma, runs, seed);

    std::ostringstream csv;
    write_mc_csv(csv, dist);
    const auto csv_path = commit_file(config.outdir, config.stem + "_mc.csv", csv.str());
    const auto json_path =
        commit_file(config.outdir, config.stem + "_mc_metrics.json", mc_json(dist));
    out << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
    out << "monte_carlo: runs=" << dist.total_runs << " seed=" << dist.seed
        << " retention=" << dist.retention << " std(i_th_high)=" << format_pa(dist.std_i_th_high)
        << " pA std(i_th_low)=" << format_pa(dist.std_i_th_low)
        << " pA std(hyst_width)=" << format_pa(dist.std_hyst_width)
        << " pA std(high_level)=" << format_pa(dist.std_high_level) << " pA\n";
    return 0;
}

int run_tune(const ScenarioDoc& doc, const TunabilityRequest& req, const RunConfig& config,
             std::ostream& out) {
    const TriggerDecl& t = trigger_of(doc, req.target);
    const LinearityReport report =
        tunability_sweep(req.which, t.params, t.cal, t.dyn, req.lo, req.hi, req.steps);

    std::ostringstream csv;
    write_tune_csv(csv, report);
    const auto csv_path = commit_file(config.outdir, config.stem + "_tune.csv", csv.str());
    const auto json_path =
        commit_file(config.outdir, config.stem + "_tune_metrics.json", tune_json(report));
    out << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
    char rel[32];
    std::snprintf(rel, sizeof(rel), "%.4f", report.rel_error_at_top);
    char slope[32];
    std::snprintf(slope, sizeof(slope), "%.4f", report.slope);
    out << "tunability(" << to_string(req.which) << "): slope=" << slope
        << " intercept=" << format_pa(report.intercept) << " pA rel_error_at_top=" << rel << " ("
        << report.valid_points << "/" << report.points.size() << " valid points)\n";
    return 0;
}

Polarity last_polarity_before(const SpikeProgram& program, Seconds t) {
    Polarity last = Polarity::Minus;
    for (const SpikeEvent& e : program) {
        if (e.time <= t) {
            last = e.polarity;
        }
    }
    return last;
}

int run_gate_analysis(const ScenarioDoc& doc, const GateRequest& req, const RunConfig& config,
                      std::ostream& out) {
    const GateKind kind = config.overrides.gate_kind.value_or(req.kind);
    const SourceDecl& a = std::get<SourceDecl>(doc.find_block(req.in1)->decl);
    const SourceDecl& b = std::get<SourceDecl>(doc.find_block(req.in2)->decl);

    const GateRun run =
        run_gate(kind, a.program, b.program, a.encoding, req.mode, req.t_stop, req.dt);

    std::ostringstream csv;
    write_trace_csv(csv, run.trace, req.sample_every);
    const std::string stem = config.stem + "_gate_" + to_string(kind);
    const auto csv_path = commit_file(config.outdir, stem + ".csv", csv.str());
    const auto json_path =
        commit_file(config.outdir, stem + ".json", gate_json(kind, req.mode, run));
    out << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";

    // Truth-table report: every settled segment with both inputs defined
    // must decode to the Boolean of the last spike polarities.
    int checked = 0;
    int passed = 0;
    out << "gate " << to_string(kind) << " truth table:\n";
    for (const GateSegment& seg : run.segments) {
        if (!seg.inputs_defined || !seg.settled) {
            continue;
        }
        const Polarity pa = last_polarity_before(a.program, seg.t_begin);
        const Polarity pb = last_polarity_before(b.program, seg.t_begin);
        const Logic expected = truth_table(kind, pa, pb) ? Logic::One : Logic::Zero;
        const bool ok = seg.value == expected && seg.persistent;
        ++checked;
        passed += ok ? 1 : 0;
        out << "  [" << format_time(seg.t_begin) << ", " << format_time(seg.t_end) << "] ("
            << (pa == Polarity::Plus ? "+" : "-") << "," << (pb == Polarity::Plus ? "+" : "-")
            << ") -> " << to_string(seg.value) << " expected " << to_string(expected)
            << (seg.persistent ? "" : " (not persistent)") << (ok ? " ok" : " MISMATCH") << "\n";
    }
    out << "gate " << to_string(kind) << ": " << passed << "/" << checked << " segments pass\n";
    return passed == checked ? 0 : 1;
}

}  // namespace

int execute_analysis(const ScenarioDoc& doc, const RunConfig& config, std::ostream& out) {
    if (const DcSweepRequest* r = std::get_if<DcSweepRequest>(&doc.analysis)) {
        return run_dc(doc, *r, config, out);
    }
    if (const TransientRequest* r = std::get_if<TransientRequest>(&doc.analysis)) {
        return run_transient_analysis(doc, *r, config, out);
    }
    if (const MonteCarloRequest* r = std::get_if<MonteCarloRequest>(&doc.analysis)) {
        return run_mc(doc, *r, config, out);
    }
    if (const TunabilityRequest* r = std::get_if<TunabilityRequest>(&doc.analysis)) {
        return run_tune(doc, *r, config, out);
    }
    if (const GateRequest* r = std::get_if<GateRequest>(&doc.analysis)) {
        return run_gate_analysis(doc, *r, config, out);
    }
    throw std::logic_error("scenario has no analysis after validation");
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics, bool json, std::ostream& err) {
    if (json) {
        ordered_json arr = ordered_json::array();
        for (const Diagnostic& d : diagnostics) {
            ordered_json j;
            j["severity"] = d.severity == Diagnostic::Severity::Error ? "error" : "warning";
            j["line"] = d.loc.line;
            j["column"] = d.loc.column;
            j["message"] = d.message;
            j["identifier"] = d.identifier;
            arr.push_back(std::move(j));
        }
        err << arr.dump(2) << "\n";
        return;
    }
    for (const Diagnostic& d : diagnostics) {
        err << format_diagnostic(d) << "\n";
    }
}

}  // namespace unitrig::cli
