#include "unitrig/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace unitrig {

namespace {

constexpr double kRefineTol = 0.1;  // pA, bisection width for switching points

/// Sweepable device: evaluates one DC point and exposes copyable state so
/// bisection can re-probe from a saved pre-crossing state.
template <typename State>
struct Sweeper {
    std::function<PicoAmp(State&, PicoAmp)> eval;
    State state;
};

template <typename State>
DcSweepResult sweep_device(Sweeper<State> dut, PicoAmp lo, PicoAmp hi, int steps) {
    if (!(lo < hi)) {
        throw ConfigError("dc sweep requires lo < hi");
    }
    if (steps < 10) {
        throw ConfigError("dc sweep requires at least 10 steps");
    }

    std::vector<PicoAmp> grid(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
    }

    std::vector<PicoAmp> up(grid.size(), 0.0), down(grid.size(), 0.0);
    std::vector<State> up_pre(grid.size()), down_pre(grid.size());

    for (std::size_t i = 0; i < grid.size(); ++i) {
        up_pre[i] = dut.state;
        up[i] = dut.eval(dut.state, grid[i]);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::size_t j = grid.size() - 1 - i;
        down_pre[j] = dut.state;
        down[j] = dut.eval(dut.state, grid[j]);
    }

    DcSweepResult result;
    result.curve.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        result.curve[i] = {grid[i], up[i], down[i]};
    }

    const auto [min_it, max_it] = std::minmax_element(up.begin(), up.end());
    const PicoAmp span = *max_it - *min_it;
    if (span < 1.0) {
        return result;  // output never switches inside the range
    }
    const PicoAmp level = *min_it + 0.5 * span;

    const auto refine = [&](State pre_state, PicoAmp a, PicoAmp b, bool rising) {
        while (b - a > kRefineTol) {
            const PicoAmp mid = 0.5 * (a + b);
            State probe = pre_state;
            const PicoAmp out = dut.eval(probe, mid);
            const bool crossed = rising ? out > level : out <= level;
            if (crossed) {
                b = mid;
            } else {
                a = mid;
            }
        }
        return 0.5 * (a + b);
    };

    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (up[i - 1] <= level && up[i] > level) {
            result.metrics.i_th_high = refine(up_pre[i], grid[i - 1], grid[i], true);
            break;
        }
    }
    for (std::size_t i = grid.size(); i-- > 1;) {
        if (down[i] > level && down[i - 1] <= level) {
            // Descending sweep switches low somewhere in (grid[i-1], grid[i]].
            const auto refine_down = [&](State pre_state, PicoAmp a, PicoAmp b) {
                while (b - a > kRefineTol) {
                    const PicoAmp mid = 0.5 * (a + b);
                    State probe = pre_state;
                    const PicoAmp out = dut.eval(probe, mid);
                    if (out <= level) {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                return 0.5 * (a + b);
            };
            result.metrics.i_th_low = refine_down(down_pre[i - 1], grid[i - 1], grid[i]);
            break;
        }
    }

    if (result.metrics.i_th_high.has_value()) {
        result.metrics.high_level = up.back();
    }
    if (result.metrics.i_th_high && result.metrics.i_th_low &&
        *result.metrics.i_th_high > *result.metrics.i_th_low) {
        result.metrics.hyst_width = *result.metrics.i_th_high - *result.metrics.i_th_low;
        result.metrics.bistable = true;
    }
    return result;
}

}  // namespace

DcSweepResult dc_sweep(const SchmittParams& p, const Calibration& cal, const DynamicsConfig& dyn,
                       PicoAmp lo, PicoAmp hi, int steps, EvalMode mode) {
    TriggerModel model(p, cal, dyn, false);
    Sweeper<SchmittState> dut;
    dut.state = SchmittState{};
    dut.eval = [model, mode](SchmittState& s, PicoAmp v) {
        return mode == EvalMode::Ideal ? model.ideal_update(s, v) : model.equilibrium_update(s, v);
    };
    return sweep_device(std::move(dut), lo, hi, steps);
}

HysteresisMetrics dc_hysteresis(const SchmittParams& p, const Calibration& cal,
                                const DynamicsConfig& dyn, PicoAmp lo, PicoAmp hi, int steps,
                                EvalMode mode) {
    return dc_sweep(p, cal, dyn, lo, hi, steps, mode).metrics;
}

DcSweepResult dc_sweep(const Network& net, const std::string& source_id,
                       const std::string& probe_id, PicoAmp lo, PicoAmp hi, int steps,
                       EvalMode mode) {
    if (!net.index_of(source_id).has_value()) {
        throw SimulationError("dc sweep: unknown source \"" + source_id + "\"");
    }
    if (!net.index_of(probe_id).has_value()) {
        throw SimulationError("dc sweep: unknown probe \"" + probe_id + "\"");
    }
    Sweeper<NetworkState> dut;
    dut.state = net.initial_state();
    dut.eval = [&net, &source_id, &probe_id, mode](NetworkState& s, PicoAmp v) {
        // Sources other than the swept one hold their stimulus value at t=0.
        std::map<std::string, PicoAmp> values;
        for (std::size_t i : net.source_indices()) {
            const Block& b = net.block(i);
            values[b.id] = b.id == source_id ? v : std::get<SourceSpec>(b.spec).stimulus.at(0.0);
        }
        return eval_dc(net, values, s, mode).at(probe_id);
    };
    return sweep_device(std::move(dut), lo, hi, steps);
}

HysteresisMetrics dc_hysteresis(const Network& net, const std::string& source_id,
                                const std::string& probe_id, PicoAmp lo, PicoAmp hi, int steps,
                                EvalMode mode) {
    return dc_sweep(net, source_id, probe_id, lo, hi, steps, mode).metrics;
}

std::string to_string(TuneTarget target) {
    switch (target) {
        case TuneTarget::Gain: return "gain";
        case TuneTarget::Thresh: return "thresh";
        case TuneTarget::Width: return "width";
    }
    return "?";
}

LinearityReport tunability_sweep(TuneTarget target, const SchmittParams& base,
                                 const Calibration& cal, const DynamicsConfig& dyn, PicoAmp lo,
                                 PicoAmp hi, int steps, EvalMode mode) {
    if (!(lo < hi) || steps < 2) {
        throw ConfigError("tunability sweep requires lo < hi and at least 2 steps");
    }

    LinearityReport report;
    report.points.resize(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        TunePoint& point = report.points[static_cast<std::size_t>(i)];
        point.set = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
        point.residual = std::numeric_limits<double>::quiet_NaN();

        SchmittParams p = base;
        switch (target) {
            case TuneTarget::Gain: p.i_gain = point.set; break;
            case TuneTarget::Thresh: p.i_thresh = point.set; break;
            case TuneTarget::Width: p.i_width = point.set; break;
        }

        ThresholdSet expected;
        try {
            expected = schmitt_thresholds(p, cal, dyn);
        } catch (const ConfigError&) {
            continue;  // flagged via the empty measurement
        }

        const PicoAmp sweep_hi = expected.i_th_high + 150.0;
        const HysteresisMetrics m = dc_hysteresis(p, cal, dyn, 0.0, sweep_hi, 80, mode);
        if (!m.bistable) {
            continue;
        }
        switch (target) {
            case TuneTarget::Gain: point.measured = m.high_level; break;
            case TuneTarget::Thresh: point.measured = m.i_th_high; break;
            case TuneTarget::Width: point.measured = m.hyst_width; break;
        }
    }

    // Least-squares affine fit over the valid points.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const TunePoint& point : report.points) {
        if (!point.measured.has_value()) {
            continue;
        }
        ++n;
        sx += point.set;
        sy += *point.measured;
        sxx += point.set * point.set;
        sxy += point.set * *point.measured;
    }
    report.valid_points = n;
    if (n >= 2) {
        const double denom = n * sxx - sx * sx;
        report.slope = (n * sxy - sx * sy) / denom;
        report.intercept = (sy - report.slope * sx) / n;
        for (TunePoint& point : report.points) {
            if (point.measured.has_value()) {
                point.residual = *point.measured - (report.slope * point.set + report.intercept);
            }
        }
    }
    for (std::size_t i = report.points.size(); i-- > 0;) {
        const TunePoint& point = report.points[i];
        if (point.measured.has_value() && point.set > 0.0) {
            report.rel_error_at_top = std::abs(*point.measured - point.set) / point.set;
            break;
        }
    }
    return report;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Box-Muller on explicit 53-bit uniforms; identical sequences on every
/// platform, unlike std::normal_distribution.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}

    double next(double sigma) {
        const double u1 = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
        return sigma * std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 eng_;
};

struct Welford {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;
    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double stddev() const {
        if (n < 2) {
            return 0.0;
        }
        const double var = (sum_sq - sum * sum / n) / (n - 1);
        return var > 0.0 ? std::sqrt(var) : 0.0;
    }
};

}  // namespace

MismatchDistribution monte_carlo(const SchmittParams& base, const Calibration& cal,
                                 const DynamicsConfig& dyn, double sigma, int runs,
                                 std::uint64_t seed) {
    if (sigma < 0.0) {
        throw ConfigError("monte_carlo: sigma must be nonnegative");
    }
    if (runs < 1) {
        throw ConfigError("monte_carlo: at least one run required");
    }
    validate(base, "monte_carlo base");

    MismatchDistribution dist;
    dist.sigma = sigma;
    dist.seed = seed;
    dist.total_runs = runs;
    dist.runs.resize(static_cast<std::size_t>(runs));

    Welford w_high, w_low, w_width, w_level;
    int bistable_runs = 0;
    for (int run = 0; run < runs; ++run) {
        GaussianSource gauss(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(run))));
        SchmittParams p = base;
        Calibration c = cal;
        p.i_gain += gauss.next(sigma);
        p.i_thresh += gauss.next(sigma);
        p.i_width += gauss.next(sigma);
        c.gain_offset += gauss.next(sigma);
        c.thresh_offset += gauss.next(sigma);
        c.width_offset += gauss.next(sigma);

        HysteresisMetrics metrics;
        try {
            const ThresholdSet expected = schmitt_thresholds(p, c, dyn);
            metrics = dc_hysteresis(p, c, dyn, 0.0, expected.i_th_high + 150.0, 80);
        } catch (const ConfigError&) {
            metrics.bistable = false;  // mismatch broke the constraint; keep going
        }
        if (metrics.bistable) {
            ++bistable_runs;
            w_high.add(*metrics.i_th_high);
            w_low.add(*metrics.i_th_low);
            w_width.add(*metrics.hyst_width);
            w_level.add(*metrics.high_level);
        }
        dist.runs[static_cast<std::size_t>(run)] = metrics;
    }

    dist.retention = static_cast<double>(bistable_runs) / runs;
    dist.mean_i_th_high = w_high.mean();
    dist.mean_i_th_low = w_low.mean();
    dist.mean_hyst_width = w_width.mean();
    dist.mean_high_level = w_level.mean();
    dist.std_i_th_high = w_high.stddev();
    dist.std_i_th_low = w_low.stddev();
    dist.std_hyst_width = w_width.stddev();
    dist.std_high_level = w_level.stddev();
    return dist;
}

std::optional<double> measure_overshoot(const Trace& trace, const std::string& probe_id,
                                        PicoAmp settled_level) {
    if (!(settled_level > 0.0)) {
        return std::nullopt;
    }
    const std::vector<PicoAmp>& y = trace.series_for(probe_id);
    const PicoAmp level = 0.5 * settled_level;
    std::size_t crossing = 0;
    bool found = false;
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (y[i - 1] <= level && y[i] > level) {
            crossing = i;
            found = true;
            break;
        }
    }
    if (!found) {
        return std::nullopt;
    }
    PicoAmp peak = y[crossing];
    for (std::size_t i = crossing; i < y.size(); ++i) {
        peak = std::max(peak, y[i]);
    }
    return (peak - settled_level) / settled_level;
}

std::optional<Seconds> measure_rise_time(const Trace& trace, const std::string& probe_id) {
    const std::vector<PicoAmp>& y = trace.series_for(probe_id);
    if (y.size() < 3) {
        return std::nullopt;
    }
    const PicoAmp base = y.front();
    const PicoAmp settled = y.back();
    const PicoAmp swing = settled - base;
    if (swing < 1.0) {
        return std::nullopt;  // no usable upward step in this trace
    }
    const PicoAmp l10 = base + 0.1 * swing;
    const PicoAmp l90 = base + 0.9 * swing;

    const auto crossing_time = [&](PicoAmp level, std::size_t from) -> std::optional<Seconds> {
        for (std::size_t i = std::max<std::size_t>(from, 1); i < y.size(); ++i) {
            if (y[i - 1] <= level && y[i] > level) {
                const double frac = (level - y[i - 1]) / (y[i] - y[i - 1]);
                return trace.time[i - 1] + frac * (trace.time[i] - trace.time[i - 1]);
            }
        }
        return std::nullopt;
    };

    const std::optional<Seconds> t10 = crossing_time(l10, 1);
    if (!t10.has_value()) {
        return std::nullopt;
    }
    const std::optional<Seconds> t90 = crossing_time(l90, 1);
    if (!t90.has_value() || *t90 < *t10) {
        return std::nullopt;
    }
    return *t90 - *t10;
}

}  // namespace unitrig
