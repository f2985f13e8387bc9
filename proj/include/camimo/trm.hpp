// SPDX-License-Identifier: Apache-2.0
//
// camimo: per-coordinate trust-region update
//
// Quadratic model w(x) = h + h'*(x - xbar) + h''/2*(x - xbar)^2 on the
// intersection of the trust region [xbar - delta, xbar + delta] with the
// structural interval [lo, hi] (neighbor spacing + aperture box). Candidate:
// the projected Newton point when h'' < 0, else the better endpoint of the
// interval (the interior stationary point is a minimum for convex models).
// The ratio rho = actual/model gain drives acceptance and radius adaptation.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "camimo/config.hpp"
#include "camimo/derivatives.hpp"
#include "camimo/errors.hpp"

namespace camimo {

inline constexpr double trm_step_tol = 1e-8;   // wavelengths
inline constexpr double trm_radius_tol = 1e-6; // wavelengths

struct TrmState {
    double radius = 0.25;       // delta
    double coordinate_value = 0.0;
    double feasible_lo = 0.0;   // neighbor/box interval, trust region excluded
    double feasible_hi = 0.0;
};

struct TrmStep {
    double from = 0.0;
    double to = 0.0;
    double rho = 0.0;
    double radius = 0.0; // radius before the update rule
    bool accepted = false;
};

struct TrmResult {
    double value = 0.0;     // final coordinate
    double radius = 0.0;    // final trust radius
    double objective = 0.0; // objective at the final coordinate
    int accepted = 0;
    int rejected = 0;
    std::vector<TrmStep> trace;
};

// One coordinate's bounded inner loop; the objective value at the returned
// coordinate never drops below its entry value (rejects restore the point).
inline TrmResult trm_update_coordinate(const std::function<double(double)> &objective,
                                       const std::function<DerivativePair(double)> &derivs,
                                       const TrmState &state, const SystemConfig &cfg) {
    double delta = state.radius;
    double x = state.coordinate_value;
    double fx = objective(x);
    TrmResult out;
    for (int inner = 0; inner < cfg.max_inner_iters; ++inner) {
        const double lo = std::max(x - delta, state.feasible_lo);
        const double hi = std::min(x + delta, state.feasible_hi);
        if (!(hi > lo)) break; // degenerate interval: keep the single feasible value
        const DerivativePair d = derivs(x);
        double xs;
        if (d.second < 0.0) {
            xs = std::min(std::max(x - d.first / d.second, lo), hi);
        } else {
            const double wlo = 0.5 * d.second * (lo - x) * (lo - x) + d.first * (lo - x);
            const double whi = 0.5 * d.second * (hi - x) * (hi - x) + d.first * (hi - x);
            xs = (wlo > whi) ? lo : hi;
        }
        const double step = xs - x;
        if (std::abs(step) < trm_step_tol) break;
        const double w_gain = 0.5 * d.second * step * step + d.first * step;
        double fxs;
        try {
            fxs = objective(xs);
        } catch (const NotPositiveDefinite &) {
            fxs = -std::numeric_limits<double>::infinity(); // candidate rejected below
        }
        const double rho = std::abs(w_gain) > 1e-18 ? (fxs - fx) / w_gain : 0.0;
        const bool on_boundary = std::abs(std::abs(step) - delta) < 1e-12;
        TrmStep rec{x, xs, rho, delta, false};
        if (rho > cfg.trm_rho2) {
            x = xs;
            fx = fxs;
            rec.accepted = true;
            ++out.accepted;
            if (on_boundary) delta *= cfg.trm_nu1;
        } else if (rho > cfg.trm_rho1) {
            x = xs;
            fx = fxs;
            rec.accepted = true;
            ++out.accepted;
        } else {
            ++out.rejected;
            delta /= cfg.trm_nu2;
        }
        out.trace.push_back(rec);
        if (delta < trm_radius_tol) break;
    }
    out.value = x;
    out.radius = delta;
    out.objective = fx;
    return out;
}

} // namespace camimo
