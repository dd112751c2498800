#pragma once

// Shared test utilities: portable seeded RNG, random valid parameter sets,
// and the brute-force fixed-point oracle the solver is checked against.
// Everything here must stay independent of the implementation paths under
// test (the oracle does its own logistic and its own scan).

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "unitrig/schmitt.hpp"

namespace testutil {

using unitrig::Calibration;
using unitrig::DynamicsConfig;
using unitrig::SchmittParams;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) {
        const double u = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    double gauss(double sigma) {
        const double u1 = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
        return sigma * std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    std::uint64_t u64() { return eng_(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::mt19937_64 eng_;
};

/// Valid triple with comfortable margins: hysteresis width in [20, 300] pA,
/// lower threshold at least 30 pA, gain in [100, 600] pA. Stays valid under
/// the default leakage calibration as well.
inline SchmittParams random_valid_params(Rng& rng) {
    SchmittParams p;
    p.i_width = rng.uniform(20.0, 300.0);
    p.i_thresh = p.i_width + rng.uniform(30.0, 230.0);
    p.i_gain = rng.uniform(100.0, 600.0);
    return p;
}

struct OracleRoot {
    double i_fb = 0.0;
    double i_out = 0.0;
};

/// Independent fixed-point finder: scans the feedback residual
/// w * sigma(k * (i_in + x - u_high)) - x on a 0.01 pA grid over [0, w]
/// and reports each stable (+ to -) crossing at its cell midpoint.
inline std::vector<OracleRoot> oracle_fixed_points(const SchmittParams& p, const Calibration& cal,
                                                   const DynamicsConfig& dyn, double i_in) {
    const double u_high = p.i_thresh + cal.thresh_offset;
    const double w = p.i_width + cal.width_offset;
    const double g = p.i_gain + cal.gain_offset;
    const double k = dyn.steepness_k;
    const auto sigma = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    const auto residual = [&](double x) { return w * sigma(k * (i_in + x - u_high)) - x; };

    std::vector<OracleRoot> roots;
    const double step = 0.01;
    double x_prev = 0.0;
    double r_prev = residual(0.0);
    if (r_prev <= 0.0) {
        roots.push_back({0.0, g * sigma(k * (i_in - u_high))});
    }
    const int cells = static_cast<int>(std::ceil(w / step));
    for (int i = 1; i <= cells; ++i) {
        const double x = std::min(w, i * step);
        const double r = residual(x);
        if (r_prev > 0.0 && r <= 0.0) {
            const double mid = 0.5 * (x_prev + x);
            roots.push_back({mid, g * (mid / w)});
        }
        x_prev = x;
        r_prev = r;
    }
    return roots;
}

}  // namespace testutil
