#pragma once

#include <cmath>

#include "mflab/walk.hpp"

// Closed forms for the golden-rotation system with the identity field, whose
// limiting step cumulant is lambda*coth(lambda) - 1. Shared between the walk
// and landscape translation units so grid scans avoid the quadrature path.
namespace mflab::detail {

inline bool has_torus_identity_closed_form(const SystemDescriptor& sys) {
    return sys.kind == SystemKind::TorusRotation && sys.field.label == "identity" &&
           sys.policy != IntegratorPolicy::OrbitAverage;
}

// lambda*coth(lambda) - 1; even in lambda, value 0 at 0 by continuity.
inline double torus_identity_cgf(double t) {
    double a = std::fabs(t);
    if (a < 1e-3) {
        double a2 = a * a;
        return a2 * (1.0 / 3.0 + a2 * (-1.0 / 45.0 + a2 * (2.0 / 945.0)));
    }
    if (a > 350.0) return a - 1.0;  // coth indistinguishable from 1
    return a - 1.0 + 2.0 * a / std::expm1(2.0 * a);
}

inline double torus_identity_cgf_deriv(double t) {
    double a = std::fabs(t);
    double v;
    if (a < 1e-3) {
        double a2 = a * a;
        v = a * (2.0 / 3.0 + a2 * (-4.0 / 45.0 + a2 * (4.0 / 315.0)));
    } else if (a > 350.0) {
        v = 1.0;
    } else {
        double sh = std::sinh(a);
        v = 1.0 + 2.0 / std::expm1(2.0 * a) - a / (sh * sh);
    }
    return t < 0.0 ? -v : v;
}

// Second derivative 2*(t coth t - 1)/sinh(t)^2; even, value 2/3 at 0.
inline double torus_identity_cgf_second(double t) {
    double a = std::fabs(t);
    if (a < 1e-3) {
        double a2 = a * a;
        return 2.0 / 3.0 + a2 * (-4.0 / 15.0 + a2 * (4.0 / 63.0));
    }
    if (a > 350.0) return 0.0;
    double sh = std::sinh(a);
    return 2.0 * torus_identity_cgf(a) / (sh * sh);
}

}  // namespace mflab::detail
