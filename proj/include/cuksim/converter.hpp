#pragma once

// Ćuk converter model in continuous conduction mode: the two affine
// operating subsystems, the periodic steady-state equilibrium, and the
// peak-to-peak ripple predictions.
//
// State ordering is fixed throughout the project:
//   x = [i_L1, i_L2, v_C1, v_C2]   (A, A, V, V)

#include <stdexcept>
#include <string>
#include <utility>

#include "cuksim/linalg.hpp"

namespace cuksim {

/// Physical circuit constants.
struct ConverterParams {
    double L1 = 0.0;    // H
    double L2 = 0.0;    // H
    double C1 = 0.0;    // F
    double C2 = 0.0;    // F
    double R = 0.0;     // ohm
    double v_in = 0.0;  // V

    void validate() const {
        auto check = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument(std::string("ConverterParams: ") + name +
                                            " must be strictly positive and finite");
        };
        check(L1, "L1");
        check(L2, "L2");
        check(C1, "C1");
        check(C2, "C2");
        check(R, "R");
        check(v_in, "v_in");
    }
};

/// Nominal operating point: duty ratio and switching period.
struct OperatingSpec {
    double d = 0.0;    // dimensionless, strictly inside (0, 1)
    double T_s = 0.0;  // s

    void validate() const {
        if (!std::isfinite(d) || !(d > 0.0) || !(d < 1.0))
            throw std::invalid_argument("OperatingSpec: d must lie strictly inside (0, 1)");
        if (!std::isfinite(T_s) || !(T_s > 0.0))
            throw std::invalid_argument("OperatingSpec: T_s must be strictly positive");
    }
};

/// One affine CCM mode: x' = A x + B, or y' = A y + B_shift in coordinates
/// y = x - x_bar shifted to the equilibrium.
struct SubsystemModel {
    int index = 0;  // 1: transistor on, diode off; 2: transistor off, diode conducting
    Mat4 A;         // 1/s
    Vec4 B;         // state-units/s
    Vec4 B_shift;   // state-units/s
};

struct EquilibriumPoint {
    Vec4 x_bar;   // (A, A, V, V), component signs (+, +, +, -)
    Vec4 ripple;  // peak-to-peak steady-state excursion, all positive
};

/// Equilibrium from volt-second / ampere-second balance, and the closed-form
/// ripple of each state variable over one switching period.
inline EquilibriumPoint equilibrium(const ConverterParams& p, const OperatingSpec& spec) {
    p.validate();
    spec.validate();
    const double d = spec.d;
    const double od = 1.0 - d;

    EquilibriumPoint eq;
    eq.x_bar[0] = d * d * p.v_in / (od * od * p.R);
    eq.x_bar[1] = d * p.v_in / (od * p.R);
    eq.x_bar[2] = p.v_in / od;
    eq.x_bar[3] = -d * p.v_in / od;

    eq.ripple[0] = p.v_in * d * spec.T_s / p.L1;
    eq.ripple[1] = p.v_in * d * spec.T_s / p.L2;
    eq.ripple[2] = p.v_in * d * d * spec.T_s / (od * p.R * p.C1);
    eq.ripple[3] = d * p.v_in * spec.T_s * spec.T_s / (8.0 * p.L2 * p.C2);
    return eq;
}

/// Both CCM subsystems. The shifted offsets are computed as
/// B_shift_i = A_i x_bar + B_i, so B_shift_2 = -(d/(1-d)) B_shift_1 holds
/// as an algebraic identity.
inline std::pair<SubsystemModel, SubsystemModel> build_subsystems(const ConverterParams& p,
                                                                  const OperatingSpec& spec) {
    p.validate();
    spec.validate();

    SubsystemModel s1;
    s1.index = 1;
    s1.A(1, 2) = 1.0 / p.L2;
    s1.A(1, 3) = 1.0 / p.L2;
    s1.A(2, 1) = -1.0 / p.C1;
    s1.A(3, 1) = -1.0 / p.C2;
    s1.A(3, 3) = -1.0 / (p.R * p.C2);
    s1.B[0] = p.v_in / p.L1;

    SubsystemModel s2;
    s2.index = 2;
    s2.A(0, 2) = -1.0 / p.L1;
    s2.A(1, 3) = 1.0 / p.L2;
    s2.A(2, 0) = 1.0 / p.C1;
    s2.A(3, 1) = -1.0 / p.C2;
    s2.A(3, 3) = -1.0 / (p.R * p.C2);
    s2.B = s1.B;

    const Vec4 x_bar = equilibrium(p, spec).x_bar;
    s1.B_shift = mat_vec(s1.A, x_bar) + s1.B;
    s2.B_shift = mat_vec(s2.A, x_bar) + s2.B;
    return {s1, s2};
}

/// Duty-weighted drift at the equilibrium, d*(A1 x_bar + B1) + (1-d)*(A2 x_bar + B2).
/// Vanishes identically for every valid parameter set; a nonzero result flags
/// a transcription error in the subsystem matrices.
inline Vec4 averaged_balance_residual(const ConverterParams& p, const OperatingSpec& spec) {
    const auto [s1, s2] = build_subsystems(p, spec);
    return spec.d * s1.B_shift + (1.0 - spec.d) * s2.B_shift;
}

}  // namespace cuksim
