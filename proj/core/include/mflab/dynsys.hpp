#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mflab/numerics.hpp"

namespace mflab {

// The golden rotation number (sqrt(5)-1)/2: constant type, the slowest
// continued-fraction expansion an irrational can have, hence the best
// achievable Birkhoff-sum speed for the circle rotation.
inline constexpr double golden_rotation = 0.61803398874989484820458683436564;

enum class SystemKind { TorusRotation, ConstantField, UserMap };

// How invariant-measure integrals are evaluated.
enum class IntegratorPolicy { ClosedForm, Quadrature, OrbitAverage };

// A measurable field E -> [0,1]. The label makes closed forms recognizable
// ("identity", "constant:<p>") and is carried into reports.
struct FieldFunction {
    std::string label;
    std::function<double(double)> eval;

    static FieldFunction identity();
    static FieldFunction constant(double p);
    // f = e^g / (1 + e^g): the logistic squash that turns an arbitrary
    // external field g into a step probability.
    static FieldFunction logistic_of(std::string g_label,
                                     std::function<double(double)> g);
};

// A dynamical system (E, mu, T) with field f. The state space is [0,1) for the
// torus rotation (mu = Lebesgue), a single point for the constant field, and
// caller-defined for user-supplied maps.
struct SystemDescriptor {
    SystemKind kind = SystemKind::TorusRotation;
    double rotation_angle = golden_rotation;
    FieldFunction field = FieldFunction::identity();
    IntegratorPolicy policy = IntegratorPolicy::Quadrature;
    int quad_initial_nodes = 201;
    long quad_eval_cap = 100000;
    // OrbitAverage policy: integrals become Birkhoff averages over this orbit.
    double orbit_x0 = 0.0;
    long orbit_n = 100000;
    // Torus iteration scheme: false = direct frac(x0 + i*alpha) (default, no
    // error accumulation over i), true = iterated subtract-floor stepping.
    bool iterate_orbit = false;
    // Diophantine type of the rotation angle; user-declared metadata only.
    std::optional<double> declared_diophantine_type;
    std::vector<std::string> warnings;
    std::function<double(double)> user_map;  // UserMap kind only
};

// Factories. torus_rotation flags (numerically) rational angles with a warning:
// the rotation is then periodic, not uniquely ergodic.
SystemDescriptor torus_rotation(double alpha = golden_rotation,
                                FieldFunction field = FieldFunction::identity());
SystemDescriptor constant_field(double p);
SystemDescriptor user_map_system(std::function<double(double)> map, FieldFunction field);

// The step-probability sequence p_i = f(T^i x0), i = 1..n, for one quenched
// realization of size n.
struct FieldTrajectory {
    double x0 = 0.0;
    std::vector<double> p;
    long n() const { return static_cast<long>(p.size()); }
};

FieldTrajectory orbit(const SystemDescriptor& sys, double x0, long n);

// int_E h dmu to absolute accuracy tol (closed form / quadrature / orbit
// average per the system's policy and kind).
double invariant_integral(const SystemDescriptor& sys,
                          const std::function<double(double)>& h, double tol);

struct BirkhoffReport {
    std::vector<double> deviations;  // D_n = |sum_{k<=n} (h(T^k x0) - mean)|
    double fitted_exponent;          // least-squares slope of log D against log n
};

// Estimates the smallest alpha with h in the o(n^alpha) Birkhoff class by
// fitting the growth of centered partial sums along n_grid.
BirkhoffReport birkhoff_deviation_exponent(const SystemDescriptor& sys,
                                           const std::function<double(double)>& h,
                                           double x0, std::span<const long> n_grid);

}  // namespace mflab
