#include "unitrig/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace unitrig {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_sink(const std::ostream& out) {
    if (!out) {
        throw SerializeError("output sink is not writable");
    }
}

ordered_json metrics_object(const HysteresisMetrics& m) {
    ordered_json j;
    j["bistable"] = m.bistable;
    j["i_th_high_pA"] = m.i_th_high.has_value() ? ordered_json(*m.i_th_high) : ordered_json();
    j["i_th_low_pA"] = m.i_th_low.has_value() ? ordered_json(*m.i_th_low) : ordered_json();
    j["hyst_width_pA"] = m.hyst_width.has_value() ? ordered_json(*m.hyst_width) : ordered_json();
    j["high_level_pA"] = m.high_level.has_value() ? ordered_json(*m.high_level) : ordered_json();
    return j;
}

}  // namespace

std::string format_pa(PicoAmp value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::string format_time(Seconds value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", value);
    return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace, int sample_every) {
    if (sample_every < 1) {
        throw SerializeError("sample_every must be >= 1");
    }
    out << "time_s";
    for (const std::string& probe : trace.probes) {
        out << "," << probe;
    }
    out << "\n";
    for (std::size_t i = 0; i < trace.time.size(); i += static_cast<std::size_t>(sample_every)) {
        out << format_time(trace.time[i]);
        for (const auto& series : trace.series) {
            out << "," << format_pa(series[i]);
        }
        out << "\n";
    }
    check_sink(out);
}

void write_dc_csv(std::ostream& out, const DcSweepResult& result) {
    out << "i_in_pA,up_pA,down_pA\n";
    for (const DcCurvePoint& point : result.curve) {
        out << format_pa(point.input) << "," << format_pa(point.up) << ","
            << format_pa(point.down) << "\n";
    }
    check_sink(out);
}

void write_mc_csv(std::ostream& out, const MismatchDistribution& dist) {
    out << "run,bistable,i_th_high_pA,i_th_low_pA,hyst_width_pA,high_level_pA\n";
    for (std::size_t i = 0; i < dist.runs.size(); ++i) {
        const HysteresisMetrics& m = dist.runs[i];
        out << i << "," << (m.bistable ? 1 : 0);
        const auto cell = [&](const std::optional<PicoAmp>& v) {
            out << ",";
            if (v.has_value()) {
                out << format_pa(*v);
            }
        };
        cell(m.i_th_high);
        cell(m.i_th_low);
        cell(m.hyst_width);
        cell(m.high_level);
        out << "\n";
    }
    check_sink(out);
}

void write_tune_csv(std::ostream& out, const LinearityReport& report) {
    out << "set_pA,measured_pA,residual_pA,valid\n";
    for (const TunePoint& point : report.points) {
        out << format_pa(point.set) << ",";
        if (point.measured.has_value()) {
            out << format_pa(*point.measured) << "," << format_pa(point.residual) << ",1\n";
        } else {
            out << ",,0\n";
        }
    }
    check_sink(out);
}

std::string hysteresis_json(const HysteresisMetrics& metrics) {
    return metrics_object(metrics).dump(2) + "\n";
}

std::string mc_json(const MismatchDistribution& dist) {
    ordered_json j;
    j["runs"] = dist.total_runs;
    j["sigma_pA"] = dist.sigma;
    j["seed"] = dist.seed;
    j["retention"] = dist.retention;
    j["mean_i_th_high_pA"] = dist.mean_i_th_high;
    j["mean_i_th_low_pA"] = dist.mean_i_th_low;
    j["mean_hyst_width_pA"] = dist.mean_hyst_width;
    j["mean_high_level_pA"] = dist.mean_high_level;
    j["std_i_th_high_pA"] = dist.std_i_th_high;
    j["std_i_th_low_pA"] = dist.std_i_th_low;
    j["std_hyst_width_pA"] = dist.std_hyst_width;
    j["std_high_level_pA"] = dist.std_high_level;
    return j.dump(2) + "\n";
}

std::string tune_json(const LinearityReport& report) {
    ordered_json j;
    j["slope"] = report.slope;
    j["intercept_pA"] = report.intercept;
    j["rel_error_at_top"] = report.rel_error_at_top;
    j["valid_points"] = report.valid_points;
    j["points"] = ordered_json::array();
    for (const TunePoint& point : report.points) {
        ordered_json p;
        p["set_pA"] = point.set;
        p["measured_pA"] = point.measured.has_value() ? ordered_json(*point.measured)
                                                      : ordered_json();
        p["residual_pA"] =
            std::isnan(point.residual) ? ordered_json() : ordered_json(point.residual);
        j["points"].push_back(std::move(p));
    }
    return j.dump(2) + "\n";
}

std::string gate_json(GateKind kind, GateMode mode, const GateRun& run) {
    ordered_json j;
    j["gate"] = to_string(kind);
    j["mode"] = mode == GateMode::Ideal ? "ideal" : "calibrated";
    j["final_value"] = to_string(run.final_value());
    j["segments"] = ordered_json::array();
    for (const GateSegment& seg : run.segments) {
        ordered_json s;
        s["t_begin_s"] = seg.t_begin;
        s["t_end_s"] = seg.t_end;
        s["value"] = to_string(seg.value);
        s["inputs_defined"] = seg.inputs_defined;
        s["settled"] = seg.settled;
        s["persistent"] = seg.persistent;
        s["max_deviation_pA"] = seg.max_deviation;
        j["segments"].push_back(std::move(s));
    }
    return j.dump(2) + "\n";
}

}  // namespace unitrig
