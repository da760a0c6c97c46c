#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mflab/errors.hpp"

namespace mflab {

// Explicit marker for log(0): an impossible atom / empty event.
inline constexpr double log_zero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double x) { return x == log_zero; }

// log(1 + e^x) without overflow or catastrophic cancellation.
inline double log1pexp(double x) {
    if (x > 33.0) return x + std::exp(-x);  // e^{-x} below double epsilon of x
    if (x > -37.0) return std::log1p(std::exp(x));
    return std::exp(x);
}

// log(cosh(t)), stable for large |t|: |t| + log((1+e^{-2|t|})/2).
inline double logcosh(double t) {
    double a = std::fabs(t);
    return a + log1pexp(-2.0 * a) - 0.6931471805599453094172321214581766;
}

// log(e^a + e^b); either argument may be the log_zero marker.
inline double logaddexp(double a, double b) {
    if (a == log_zero) return b;
    if (b == log_zero) return a;
    double m = a > b ? a : b;
    double d = a > b ? b - a : a - b;
    return m + log1pexp(d);
}

// Neumaier-compensated running sum.
class NeumaierSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double logsumexp(std::span<const double> xs);

// log(phi e^s + (1-phi) e^{-s}) for phi in [0,1]; the one-step cumulant
// generating function of a +-1 variable with success probability phi.
// Degenerate phi gives the linear forms +-s exactly.
inline double step_cgf(double phi, double s) {
    if (phi >= 1.0) return s;
    if (phi <= 0.0) return -s;
    if (s >= 0.0) return s + std::log(phi + (1.0 - phi) * std::exp(-2.0 * s));
    return -s + std::log(phi * std::exp(2.0 * s) + (1.0 - phi));
}

struct QuadratureResult {
    double value;
    double error_estimate;
    long evals;
};

// Adaptive Simpson quadrature on [a,b]: starts from a uniform composite rule
// (initial_nodes function evaluations), then bisects panels until each local
// Richardson estimate |S2-S1|/15 meets its share of the absolute tolerance.
// Throws QuadratureError (carrying the best value and achieved estimate) if
// max_evals function evaluations are not enough.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol, int initial_nodes = 201, long max_evals = 100000);

struct LogIntegralResult {
    double log_value;  // log of the integral of exp(logf) over the real line
    double argmax;     // located maximizer of logf
};

// log of int_R exp(logf(u)) du for a continuous logf that tends to -infinity in
// both directions. Scans an expanding window around center_guess until the
// log-integrand has dropped window_drop nats below its peak at both edges, then
// integrates exp(logf - max) adaptively. rel_tol controls the relative error of
// the integral (hence the absolute error of its log).
LogIntegralResult log_integrate_exp(const std::function<double(double)>& logf,
                                    double center_guess, double initial_halfwidth,
                                    double rel_tol = 1e-10, double window_drop = 60.0,
                                    long max_evals = 200000);

struct RootResult {
    double x;
    double residual;  // f(x) - target
    long iters;
};

// Solve f(x) = target on a bracket [lo,hi] with f(lo)-target and f(hi)-target
// of opposite sign. Newton steps (using df) safeguarded by bisection: any step
// leaving the bracket, or not shrinking the residual, falls back to the
// midpoint. Stops at |f(x)-target| <= ftol or bracket width <= xtol.
RootResult solve_bracketed(const std::function<double(double)>& f,
                           const std::function<double(double)>& df, double target,
                           double lo, double hi, double ftol = 1e-12,
                           double xtol = 1e-15, int max_iter = 200);

// Expand [lo,hi] by doubling outward until f crosses target; throws
// BracketError after max_doublings.
void expand_bracket(const std::function<double(double)>& f, double target, double& lo,
                    double& hi, int max_doublings = 50);

// Least-squares slope of log(d) against log(n). Values of d at or below floor
// are replaced by the floor first; if every d is at the floor the exponent is 0
// by convention (a centered-constant sum has no growth to fit).
double fit_loglog_slope(std::span<const long> ns, std::span<const double> ds,
                        double floor = 1e-300);

// Uniform draw on [0,1) built from the top 53 bits of the generator output.
// Unlike std::uniform_real_distribution this is identical across standard
// library implementations, which the byte-identical-output guarantee needs.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// A smooth convex function handed around by value/derivative pair
// (cumulant generating functions and their interpolants).
struct ConvexFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

// Shortest round-trip decimal representation (std::to_chars). Locale-free and
// identical across platforms, so serialized output is byte-reproducible.
std::string format_double(double x);

}  // namespace mflab
