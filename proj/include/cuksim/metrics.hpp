#pragma once

// Steady-state and transient metrics computed from a recorded trace and its
// switch events.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cuksim/controller.hpp"
#include "cuksim/converter.hpp"
#include "cuksim/sim.hpp"

namespace cuksim {

struct Metrics {
    Vec4 mean;                      // time average over the steady window
    Vec4 ripple_measured;           // max - min over the steady window
    Vec4 overshoot;                 // transient excursion beyond the steady band
    double settle_time = 0.0;       // first time V(y) <= 1 holds for good
    double period_measured = 0.0;   // mean spacing of q rising edges
    double duty_measured = 0.0;     // fraction of steady-window time with q = 1
    int switch_count = 0;
    int nonswitching_crossings = 0; // facet crossings the switching rule ignored
    double max_V_steady = 0.0;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Allowance above V = 1 when deciding settling: facet-touch samples sit a
/// localization error past the facet, never exactly on it.
inline constexpr double kSettleTolerance = 1e-9;

/// Metrics over the final steady_window seconds of the trace (mean, ripple,
/// period, duty, max V) and over the full trace (overshoot, settling,
/// crossing counts). Requires at least 3 full switching cycles inside the
/// steady window.
inline Metrics compute_metrics(const std::vector<TraceSample>& trace,
                               const std::vector<SwitchEvent>& events, const PolytopeSpec& poly,
                               const EquilibriumPoint& equil, double steady_window) {
    if (trace.empty()) throw std::invalid_argument("compute_metrics: empty trace");
    const double t_end = trace.back().t;
    const double span = t_end - trace.front().t;
    if (!(steady_window > 0.0) || steady_window > span)
        throw std::invalid_argument("compute_metrics: steady_window must lie within the trace span");
    const double w0 = t_end - steady_window;

    Metrics m;

    // --- steady-window statistics ------------------------------------------------
    std::size_t first = 0;
    while (first < trace.size() && trace[first].t < w0) ++first;
    if (first >= trace.size() - 1)
        throw InsufficientDataError("compute_metrics: too few samples in steady window");

    Vec4 lo = trace[first].x;
    Vec4 hi = trace[first].x;
    Vec4 integral{};
    m.max_V_steady = trace[first].V;
    for (std::size_t i = first + 1; i < trace.size(); ++i) {
        const double dt = trace[i].t - trace[i - 1].t;
        for (std::size_t c = 0; c < 4; ++c) {
            integral[c] += 0.5 * (trace[i].x[c] + trace[i - 1].x[c]) * dt;
            lo[c] = std::min(lo[c], trace[i].x[c]);
            hi[c] = std::max(hi[c], trace[i].x[c]);
        }
        m.max_V_steady = std::max(m.max_V_steady, trace[i].V);
    }
    const double window_span = t_end - trace[first].t;
    for (std::size_t c = 0; c < 4; ++c) {
        m.mean[c] = integral[c] / window_span;
        m.ripple_measured[c] = hi[c] - lo[c];
    }

    // --- switching period and duty ------------------------------------------------
    std::vector<double> rising;
    for (const auto& e : events)
        if (e.q_after == 1 && e.t >= w0) rising.push_back(e.t);
    if (rising.size() < 4)
        throw InsufficientDataError("compute_metrics: fewer than 3 full switching cycles in steady window");
    m.period_measured = (rising.back() - rising.front()) / static_cast<double>(rising.size() - 1);

    int q_at = trace.front().q;
    double t_prev = w0;
    double on_time = 0.0;
    for (const auto& e : events) {
        if (e.t <= w0) {
            q_at = e.q_after;
            continue;
        }
        if (e.t > t_end) break;
        if (q_at == 1) on_time += e.t - t_prev;
        t_prev = e.t;
        q_at = e.q_after;
    }
    if (q_at == 1) on_time += t_end - t_prev;
    m.duty_measured = on_time / steady_window;

    m.switch_count = static_cast<int>(events.size());

    // --- full-trace statistics ------------------------------------------------
    // Overshoot counts only the excursion past the equilibrium on the side
    // away from the starting point (the classic step-response notion); a
    // start at the equilibrium counts either side.
    for (std::size_t c = 0; c < 4; ++c) {
        const double x0c = trace.front().x[c];
        const double target = equil.x_bar[c];
        double excursion = 0.0;
        if (x0c == target) {
            for (const auto& s : trace) excursion = std::max(excursion, std::abs(s.x[c] - target));
        } else {
            const double dir = target > x0c ? 1.0 : -1.0;
            for (const auto& s : trace) excursion = std::max(excursion, dir * (s.x[c] - target));
        }
        m.overshoot[c] = std::max(0.0, excursion - 0.5 * m.ripple_measured[c]);
    }

    // Settling: earliest time after which V stays within the polytope
    // (allowing the facet-localization error) for the rest of the trace.
    std::size_t last_violation = trace.size();
    for (std::size_t i = trace.size(); i-- > 0;) {
        if (trace[i].V > 1.0 + kSettleTolerance) {
            last_violation = i;
            break;
        }
    }
    if (last_violation == trace.size())
        m.settle_time = 0.0;
    else if (last_violation + 1 < trace.size())
        m.settle_time = trace[last_violation + 1].t;
    else
        m.settle_time = std::numeric_limits<double>::infinity();

    // Facet crossings with no toggle: entries of some k_j y_j into its
    // violated half-space at a sample that is not a switch event.
    std::vector<double> event_times;
    event_times.reserve(events.size());
    for (const auto& e : events) event_times.push_back(e.t);
    const auto is_event_time = [&](double t) {
        return std::binary_search(event_times.begin(), event_times.end(), t);
    };
    for (int j = 1; j <= 4; ++j) {
        if (!poly.controls(j)) continue;
        const double k = poly.coeff(j);
        bool was_out = std::abs(k * (trace.front().x[static_cast<std::size_t>(j - 1)] -
                                     equil.x_bar[static_cast<std::size_t>(j - 1)])) >= 1.0;
        for (std::size_t i = 1; i < trace.size(); ++i) {
            const double v = k * (trace[i].x[static_cast<std::size_t>(j - 1)] -
                                  equil.x_bar[static_cast<std::size_t>(j - 1)]);
            const bool out = std::abs(v) >= 1.0;
            if (out && !was_out && !is_event_time(trace[i].t)) ++m.nonswitching_crossings;
            was_out = out;
        }
    }

    return m;
}

}  // namespace cuksim
