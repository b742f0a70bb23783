#pragma once

// Piecewise linear Lyapunov control: coefficient construction, Lyapunov
// value V(y) = max_j |k_j y_j| over the controlled index set, membership in
// the polytope {V <= 1}, and the facet-triggered switching decision.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cuksim/converter.hpp"
#include "cuksim/linalg.hpp"

namespace cuksim {

/// Controlled index set J together with the facet coefficients k_j and the
/// design constant rho = d*v_in*T_s/2 (V*s). Indices are 1-based: 1,2 carry
/// units 1/A and 3,4 carry 1/V. Index 1 (the unstable inductor current) is
/// always controlled.
struct PolytopeSpec {
    std::array<double, 4> k{};         // k[j-1]; zero when j is uncontrolled
    std::array<bool, 4> controlled{};  // membership of j in J
    double rho = 0.0;

    bool controls(int j) const { return j >= 1 && j <= 4 && controlled[static_cast<std::size_t>(j - 1)]; }
    double coeff(int j) const { return k[static_cast<std::size_t>(j - 1)]; }

    std::vector<int> indices() const {
        std::vector<int> out;
        for (int j = 1; j <= 4; ++j)
            if (controls(j)) out.push_back(j);
        return out;
    }
};

/// Switch position: q = 1 means the transistor conducts (subsystem 1 active),
/// q = 0 means the diode conducts (subsystem 2).
struct SwitchState {
    int q = 1;
};

/// Facet coefficients for a desired operating point. Indices 1 and 3 take
/// the equality values that pin the steady-state ripple; 2 and 4 are
/// parameterized as signed fractions of their strict bounds so the bound is
/// enforced by construction.
inline PolytopeSpec coefficients_from_spec(const ConverterParams& p, const OperatingSpec& spec,
                                           std::vector<int> J, double k2_fraction,
                                           double k4_fraction) {
    p.validate();
    spec.validate();
    std::sort(J.begin(), J.end());
    J.erase(std::unique(J.begin(), J.end()), J.end());
    for (int j : J)
        if (j < 1 || j > 4) throw std::invalid_argument("coefficients_from_spec: index outside {1,2,3,4}");
    if (J.empty() || J.front() != 1)
        throw std::invalid_argument("coefficients_from_spec: index 1 must be controlled");

    PolytopeSpec out;
    out.rho = spec.d * p.v_in * spec.T_s / 2.0;
    for (int j : J) out.controlled[static_cast<std::size_t>(j - 1)] = true;

    out.k[0] = p.L1 / out.rho;
    if (out.controls(2)) {
        if (!(std::abs(k2_fraction) < 1.0))
            throw std::invalid_argument("coefficients_from_spec: |k2_fraction| must be < 1");
        out.k[1] = k2_fraction * p.L2 / out.rho;
    }
    if (out.controls(3)) out.k[2] = -(1.0 - spec.d) * p.R * p.C1 / (spec.d * out.rho);
    if (out.controls(4)) {
        if (!(std::abs(k4_fraction) < 1.0))
            throw std::invalid_argument("coefficients_from_spec: |k4_fraction| must be < 1");
        out.k[3] = k4_fraction * 8.0 * p.L2 * p.C2 / (out.rho * spec.T_s);
    }
    return out;
}

/// V(y) = max over controlled j of |k_j y_j|.
inline double lyapunov_value(const PolytopeSpec& spec, const Vec4& y) {
    double v = 0.0;
    for (int j = 1; j <= 4; ++j)
        if (spec.controls(j)) v = std::max(v, std::abs(spec.coeff(j) * y[static_cast<std::size_t>(j - 1)]));
    return v;
}

/// Closed-set membership; the facet itself belongs to the polytope.
inline bool in_polytope(const PolytopeSpec& spec, const Vec4& y) {
    return lyapunov_value(spec, y) <= 1.0;
}

struct Violation {
    int j = 0;
    double value = 0.0;  // k_j * y_j, with |value| >= 1
};

/// Largest facet violation |k_j y_j| >= 1 (ties resolve to the smallest
/// index). Empty when y lies inside the polytope.
inline std::optional<Violation> dominant_violation(const PolytopeSpec& spec, const Vec4& y) {
    std::optional<Violation> best;
    for (int j = 1; j <= 4; ++j) {
        if (!spec.controls(j)) continue;
        const double v = spec.coeff(j) * y[static_cast<std::size_t>(j - 1)];
        if (std::abs(v) >= 1.0 && (!best || std::abs(v) > std::abs(best->value)))
            best = Violation{j, v};
    }
    return best;
}

/// Facet-triggered switching decision. With q = 1 a crossing k_j y_j >= 1
/// turns the transistor off; with q = 0 a crossing k_j y_j <= -1 turns it
/// on; strictly inside the facets the position holds. When violations exist
/// on both sides (possible only outside the polytope during transients) the
/// dominant one decides.
inline SwitchState switch_decide(const PolytopeSpec& spec, SwitchState state, const Vec4& y) {
    bool pos = false;
    bool neg = false;
    for (int j = 1; j <= 4; ++j) {
        if (!spec.controls(j)) continue;
        const double v = spec.coeff(j) * y[static_cast<std::size_t>(j - 1)];
        pos = pos || v >= 1.0;
        neg = neg || v <= -1.0;
    }
    if (pos && neg) {
        const auto dv = dominant_violation(spec, y);
        return SwitchState{dv->value >= 1.0 ? 0 : 1};
    }
    if (state.q == 1 && pos) return SwitchState{0};
    if (state.q == 0 && neg) return SwitchState{1};
    return state;
}

/// Start-of-run switch position. A violated start obeys the dominant facet;
/// inside the polytope the transistor defaults to on.
inline SwitchState initial_switch_state(const PolytopeSpec& spec, const Vec4& y0) {
    const auto dv = dominant_violation(spec, y0);
    if (!dv) return SwitchState{1};
    return SwitchState{dv->value <= -1.0 ? 1 : 0};
}

}  // namespace cuksim
