#pragma once

// Stabilizability certificates: explicit (L_j, R_j) row/column pairs with
// L_j R_j > 0 and L_j A_i R_j <= 0 for both subsystems. Equality is allowed
// because the subsystem matrices are only marginally stable.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cuksim/controller.hpp"
#include "cuksim/converter.hpp"
#include "cuksim/linalg.hpp"

namespace cuksim {

/// One facet certificate. L has a single nonzero entry k_j at position j;
/// r is the scalar normalization making L*R positive.
struct CertificatePair {
    int j = 0;
    Vec4 L;
    Vec4 R;
    double r = 1.0;
};

struct CertificateReport {
    int j = 0;
    double LR = 0.0;    // dimensionless, must be positive
    double LA1R = 0.0;  // 1/s
    double LA2R = 0.0;  // 1/s
    bool pass = false;
};

/// The closed-form certificate pair for one controlled index. r is 1 where R
/// contains 1/k_j terms (j = 1, 3) and sign(k_j) where L*R = r*k_j must be
/// positive (j = 2, 4).
inline CertificatePair make_certificate(const PolytopeSpec& spec, int j) {
    if (j < 1 || j > 4) throw std::invalid_argument("make_certificate: index outside {1,2,3,4}");
    const double k = spec.coeff(j);
    CertificatePair pair;
    pair.j = j;
    pair.L[static_cast<std::size_t>(j - 1)] = k;
    switch (j) {
        case 1:
            pair.r = 1.0;
            pair.R[0] = pair.r / k;
            pair.R[2] = pair.r;
            break;
        case 2:
            pair.r = k >= 0.0 ? 1.0 : -1.0;
            pair.R[1] = pair.r;
            pair.R[2] = -pair.r;
            pair.R[3] = -pair.r;
            break;
        case 3:
            pair.r = 1.0;
            pair.R[0] = pair.r;
            pair.R[1] = -pair.r;
            pair.R[2] = pair.r / k;
            break;
        case 4:
            pair.r = k >= 0.0 ? 1.0 : -1.0;
            pair.R[1] = pair.r;
            pair.R[3] = pair.r;
            break;
    }
    return pair;
}

/// Certificate pairs for every controlled index of the polytope.
inline std::vector<CertificatePair> paper_certificates(const ConverterParams& p,
                                                       const PolytopeSpec& spec) {
    p.validate();
    std::vector<CertificatePair> pairs;
    for (int j : spec.indices()) pairs.push_back(make_certificate(spec, j));
    return pairs;
}

/// Evaluates L*R, L*A_1*R and L*A_2*R by direct multiplication. Passes when
/// L*R > 0 and both products are nonpositive within 1e-9 of the matrix entry
/// scale.
inline CertificateReport verify_certificate(const CertificatePair& pair, const SubsystemModel& sub1,
                                            const SubsystemModel& sub2) {
    CertificateReport rep;
    rep.j = pair.j;
    rep.LR = dot(pair.L, pair.R);
    rep.LA1R = dot(pair.L, mat_vec(sub1.A, pair.R));
    rep.LA2R = dot(pair.L, mat_vec(sub2.A, pair.R));
    const double tol = 1e-9 * std::max(max_abs(sub1.A), max_abs(sub2.A));
    rep.pass = rep.LR > 0.0 && rep.LA1R <= tol && rep.LA2R <= tol;
    return rep;
}

}  // namespace cuksim
