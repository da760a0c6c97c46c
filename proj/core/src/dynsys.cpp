#include "mflab/dynsys.hpp"

#include <cmath>
#include <utility>

namespace mflab {

FieldFunction FieldFunction::identity() {
    return {"identity", [](double y) { return y; }};
}

FieldFunction FieldFunction::constant(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("FieldFunction::constant: p must lie in [0,1]");
    return {"constant:" + std::to_string(p), [p](double) { return p; }};
}

FieldFunction FieldFunction::logistic_of(std::string g_label,
                                         std::function<double(double)> g) {
    auto eval = [g = std::move(g)](double y) {
        // e^g/(1+e^g) = 1/(1+e^{-g}), overflow-free on both sides
        double v = g(y);
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        double e = std::exp(v);
        return e / (1.0 + e);
    };
    return {"logistic-of:" + std::move(g_label), eval};
}

namespace {

// Detects rotation angles that are rational to within double precision by
// running the continued-fraction expansion until either the remainder
// vanishes or the denominator passes 10^7 (irrational for all purposes here).
std::optional<std::pair<long, long>> rational_angle(double alpha) {
    double x = alpha;
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // h_{-2}/k_{-2}, h_{-1}/k_{-1}
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(x);
        long ai = static_cast<long>(a);
        long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > 10000000) return std::nullopt;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double frac = x - a;
        if (frac < 1e-13) {
            if (std::fabs(alpha * q1 - p1) < 1e-9) return std::make_pair(p1, q1);
            return std::nullopt;
        }
        x = 1.0 / frac;
    }
    return std::nullopt;
}

}  // namespace

SystemDescriptor torus_rotation(double alpha, FieldFunction field) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("torus_rotation: rotation angle must lie in (0,1)");
    SystemDescriptor sys;
    sys.kind = SystemKind::TorusRotation;
    sys.rotation_angle = alpha;
    sys.field = std::move(field);
    sys.policy = IntegratorPolicy::Quadrature;
    if (auto pq = rational_angle(alpha)) {
        sys.warnings.push_back("rotation angle is rational (" +
                               std::to_string(pq->first) + "/" +
                               std::to_string(pq->second) +
                               "); the system is periodic, not uniquely ergodic");
    }
    return sys;
}

SystemDescriptor constant_field(double p) {
    SystemDescriptor sys;
    sys.kind = SystemKind::ConstantField;
    sys.field = FieldFunction::constant(p);
    sys.policy = IntegratorPolicy::ClosedForm;  // point evaluation is exact
    return sys;
}

SystemDescriptor user_map_system(std::function<double(double)> map, FieldFunction field) {
    SystemDescriptor sys;
    sys.kind = SystemKind::UserMap;
    sys.field = std::move(field);
    sys.user_map = std::move(map);
    sys.policy = IntegratorPolicy::OrbitAverage;  // invariant measure unknown
    return sys;
}

FieldTrajectory orbit(const SystemDescriptor& sys, double x0, long n) {
    if (n < 1) throw DomainError("orbit: need n >= 1");
    FieldTrajectory traj;
    traj.x0 = x0;
    traj.p.resize(static_cast<size_t>(n));
    auto check = [&](double v, long i) {
        if (!(v >= 0.0 && v <= 1.0))
            throw DomainError("orbit: field value outside [0,1] at step " +
                              std::to_string(i));
        return v;
    };
    switch (sys.kind) {
        case SystemKind::TorusRotation: {
            if (!(x0 >= 0.0 && x0 < 1.0))
                throw DomainError("orbit: torus start point must lie in [0,1)");
            double a = sys.rotation_angle;
            if (sys.iterate_orbit) {
                double y = x0;
                for (long i = 1; i <= n; ++i) {
                    y += a;
                    if (y >= 1.0) y -= 1.0;
                    traj.p[i - 1] = check(sys.field.eval(y), i);
                }
            } else {
                for (long i = 1; i <= n; ++i) {
                    double v = x0 + double(i) * a;
                    double y = v - std::floor(v);
                    if (y >= 1.0) y = 0.0;  // guard against rounding to 1.0
                    traj.p[i - 1] = check(sys.field.eval(y), i);
                }
            }
            break;
        }
        case SystemKind::ConstantField: {
            double p = check(sys.field.eval(x0), 1);
            for (long i = 0; i < n; ++i) traj.p[i] = p;
            break;
        }
        case SystemKind::UserMap: {
            if (!sys.user_map) throw DomainError("orbit: user map not set");
            double y = x0;
            for (long i = 1; i <= n; ++i) {
                y = sys.user_map(y);
                traj.p[i - 1] = check(sys.field.eval(y), i);
            }
            break;
        }
    }
    return traj;
}

double invariant_integral(const SystemDescriptor& sys,
                          const std::function<double(double)>& h, double tol) {
    if (!(tol > 0.0)) throw DomainError("invariant_integral: tol must be positive");
    if (sys.policy == IntegratorPolicy::OrbitAverage) {
        NeumaierSum s;
        if (sys.kind == SystemKind::TorusRotation) {
            for (long i = 1; i <= sys.orbit_n; ++i) {
                double v = sys.orbit_x0 + double(i) * sys.rotation_angle;
                s.add(h(v - std::floor(v)));
            }
        } else if (sys.kind == SystemKind::UserMap) {
            if (!sys.user_map) throw DomainError("invariant_integral: user map not set");
            double y = sys.orbit_x0;
            for (long i = 1; i <= sys.orbit_n; ++i) {
                y = sys.user_map(y);
                s.add(h(y));
            }
        } else {
            return h(sys.field.eval(0.0));
        }
        return s.value() / double(sys.orbit_n);
    }
    switch (sys.kind) {
        case SystemKind::ConstantField:
            // The invariant measure is the point mass at the field's constant
            // value; integration is evaluation there.
            return h(sys.field.eval(0.0));
        case SystemKind::TorusRotation: {
            QuadratureResult q = integrate(h, 0.0, 1.0, tol, sys.quad_initial_nodes,
                                           sys.quad_eval_cap);
            return q.value;
        }
        case SystemKind::UserMap:
            throw DomainError(
                "invariant_integral: invariant measure of a user map is unknown; "
                "use the orbit-average policy");
    }
    throw DomainError("invariant_integral: unreachable");
}

BirkhoffReport birkhoff_deviation_exponent(const SystemDescriptor& sys,
                                           const std::function<double(double)>& h,
                                           double x0, std::span<const long> n_grid) {
    if (n_grid.empty()) throw DomainError("birkhoff_deviation_exponent: empty grid");
    for (size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw DomainError("birkhoff_deviation_exponent: grid must increase");
    double mean = invariant_integral(sys, h, 1e-12);
    long n_max = n_grid.back();
    BirkhoffReport rep;
    rep.deviations.reserve(n_grid.size());
    NeumaierSum s;
    size_t gi = 0;
    // One pass over the orbit, snapshotting the centered sum at each grid n.
    auto visit = [&](long i, double y) {
        s.add(h(y) - mean);
        if (gi < n_grid.size() && i == n_grid[gi]) {
            rep.deviations.push_back(std::fabs(s.value()));
            ++gi;
        }
    };
    switch (sys.kind) {
        case SystemKind::TorusRotation: {
            if (!(x0 >= 0.0 && x0 < 1.0))
                throw DomainError("birkhoff_deviation_exponent: torus start in [0,1)");
            for (long i = 1; i <= n_max; ++i) {
                double v = x0 + double(i) * sys.rotation_angle;
                visit(i, v - std::floor(v));
            }
            break;
        }
        case SystemKind::ConstantField: {
            for (long i = 1; i <= n_max; ++i) visit(i, x0);
            break;
        }
        case SystemKind::UserMap: {
            if (!sys.user_map)
                throw DomainError("birkhoff_deviation_exponent: user map not set");
            double y = x0;
            for (long i = 1; i <= n_max; ++i) {
                y = sys.user_map(y);
                visit(i, y);
            }
            break;
        }
    }
    rep.fitted_exponent = fit_loglog_slope(n_grid, rep.deviations);
    return rep;
}

}  // namespace mflab
