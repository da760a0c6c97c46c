#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mflab/dynsys.hpp"
#include "mflab/errors.hpp"
#include "mflab/landscape.hpp"
#include "mflab/walk.hpp"

namespace mflab {

// Produces the length-n field trajectory for each requested system size.
using TrajectoryProvider = std::function<FieldTrajectory(long)>;

TrajectoryProvider orbit_family(const SystemDescriptor& sys, double x0);

// Large-deviation rate of M_n/n at s: the conjugate of the limiting step
// cumulant minus the quadratic tilt, grounded so the infimum over [-1,1] is 0.
// Returns +infinity outside [-1,1].
double ldp_rate_magnetization(const SystemDescriptor& sys, double beta_J, double s);

// Moderate-deviation rate around a classified minimum: z^2/(2 sigma^2) with
// sigma^2 = 1/lambda - 1/(betaJ) for a quadratic minimum, lambda z^{2k}/(2k)!
// for a degenerate one. Records the admissible scale-exponent range.
RateFunctionSpec mdp_rate_magnetization(const MinimumProfile& profile, double beta_J);

// Closed-form normalization of exp(-c u^{2k}) with c = lambda_tilde/(2k)!.
double clt_normalization(long two_k, double lambda_tilde);

// Limiting density of the rescaled magnetization fluctuation:
// C exp(-lambda_tilde s^{2k}/(2k)!) with lambda_tilde = (1/lambda - 1/betaJ)^-1
// for a quadratic minimum and lambda itself for a degenerate one.
double clt_limit_density(long two_k, double lambda, double beta_J, double s);

struct ScalingCheckRow {
    long n;
    double sup_error;      // sup over the s grid of the Taylor-limit mismatch
    bool lower_bound_ok;   // polynomial lower bound holds at every in-window s
};

struct ScalingCheckTable {
    std::vector<ScalingCheckRow> rows;
    std::vector<double> s_grid;
    double alpha;
    double radius;  // window radius factor: |s| <= radius * n^{1-alpha}
};

// Checks n^{2k(1-alpha)} (Gn(m + s n^{-(1-alpha)}) - Gn(m)) against its limit
// lambda s^{2k}/(2k)! and the lower bound
// (lambda/2) s^{2k}/(2k)! - sum_{j=1}^{2k-1} |s|^j inside the window.
ScalingCheckTable scaling_limit_check(const TrajectoryProvider& provider,
                                      std::span<const long> n_grid, double beta_J,
                                      const MinimumProfile& profile, double alpha,
                                      std::span<const double> s_grid,
                                      double radius = 0.3);

struct LaplaceCheckResult {
    std::vector<double> gammas;
    std::vector<double> values;  // (1/gamma) log int_{|x|<=M} e^{gamma f}
    std::vector<double> errors;  // |value - max f|
    double max_f;
};

LaplaceCheckResult laplace_limit_check(const std::function<double(double)>& f,
                                       double M, std::span<const double> gamma_grid);

// Scaled log-probabilities of one tail event across a grid of system sizes,
// compared against a deviation principle's rate value.
struct DeviationVerdict {
    double target;               // I(z)
    std::vector<long> grid;      // system sizes
    std::vector<double> r;       // r_n = -log P / speed(n)
    std::vector<double> log_prob;
    std::vector<double> speed;
    bool trend = false;          // errors non-increasing over the last three n
    std::optional<double> window;

    std::vector<double> errors() const;  // |r_n - target|, recomputed
    // CSV rows (n, speed, log_prob, r_n, err).
    void write_csv(std::ostream& os) const;
};

// Exact tail P(S_n >= t n^theta + sum(2 p_i - 1)) at each n, scaled by the
// speed n^{2 theta - 1} and compared with t^2/(2a).
DeviationVerdict verify_walk_mdp(const SystemDescriptor& sys, double x0, double theta,
                                 double t, std::span<const long> n_grid);

// Exact tail P((M_n - n m)/n^alpha >= z), optionally conditioned on
// M_n/n in [m - window, m + window], scaled by n^{1-2k+2k alpha} and compared
// with the moderate-deviation rate at z.
DeviationVerdict verify_magnetization_mdp(const TrajectoryProvider& provider,
                                          double beta, double J,
                                          std::span<const long> n_grid,
                                          const MinimumProfile& profile, double alpha,
                                          double z,
                                          std::optional<double> window = std::nullopt);

}  // namespace mflab
