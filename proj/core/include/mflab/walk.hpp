#pragma once

#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mflab/dynsys.hpp"
#include "mflab/numerics.hpp"

namespace mflab {

enum class LawKind { Walk, Magnetization };

// Exact probability mass function on the parity sublattice {-n, -n+2, ..., n},
// stored entirely in log-space so tail masses down to e^{-10^4} stay exact to
// rounding. Index j of the mass vector corresponds to the support point 2j-n.
class LatticeDistribution {
public:
    // log_masses need not be normalized on entry; the constructor subtracts
    // their log-sum-exp. Entries may be the log_zero marker.
    LatticeDistribution(long n, LawKind kind, std::vector<double> log_masses);

    long n() const { return n_; }
    LawKind kind() const { return kind_; }
    const std::vector<double>& log_masses() const { return logm_; }

    static long index_of(long k, long n) { return (k + n) / 2; }
    long support_point(long index) const { return 2 * index - n_; }

    double log_prob(long k) const;  // log_zero off support or wrong parity
    double prob(long k) const;

    double mean() const;
    double variance() const;

    // log P(S >= threshold): log-sum-exp over atoms k >= threshold, with a
    // relative slack of 1e-12 so that a threshold intended to hit an atom
    // exactly is not lost to rounding. Returns log_zero for an empty tail.
    double log_tail_geq(double threshold) const;
    // log P(lo <= S <= hi), same slack convention on both edges.
    double log_window(double lo, double hi) const;
    // log P(S >= threshold and lo <= S <= hi).
    double log_tail_geq_window(double threshold, double lo, double hi) const;

    // CSV rows (k, log_prob, prob) in ascending k.
    void write_csv(std::ostream& os) const;

private:
    long n_;
    LawKind kind_;
    std::vector<double> logm_;
};

// Exact law of S_n = sum X_i with independent +-1 steps, P(X_i = 1) = p_i:
// the Poisson-binomial dynamic program in log-space, O(n^2) time, O(n) memory.
LatticeDistribution walk_distribution(const FieldTrajectory& traj);

// One sampled path (S_0, ..., S_n); S_0 = 0.
std::vector<long> sample_walk(const FieldTrajectory& traj, std::mt19937_64& rng);

// (1/n) sum_i log(p_i e^lambda + (1-p_i) e^{-lambda}).
double cgf_quenched(const FieldTrajectory& traj, double lambda);

// Limiting cumulant generating function Lambda(lambda) = int_E L(f(y), lambda)
// dmu(y). The torus identity field has the closed form lambda*coth(lambda)-1.
double cgf_limit(const SystemDescriptor& sys, double lambda, double tol);

// Lambda and Lambda' packaged for the conjugate solver; uses the closed form
// where one is registered for the system's field, quadrature otherwise.
ConvexFunction walk_cgf_function(const SystemDescriptor& sys, double tol = 1e-11);

// Fenchel-Legendre transform Lambda*(y) = sup_lambda { lambda y - Lambda(lambda) }.
// Solves Lambda'(lambda) = y by safeguarded Newton on an expanding bracket.
// If y is outside the closure of the range of Lambda', returns +infinity; at
// the edge of the range the supremum is probed directly along the asymptote.
double legendre_transform(const ConvexFunction& cgf, double y);

struct ConjugatePoint {
    double value;      // Lambda*(y)
    double maximizer;  // the lambda attaining the supremum (= (Lambda*)'(y))
};
ConjugatePoint legendre_transform_point(const ConvexFunction& cgf, double y);

// A deviation principle's speed and rate function.
struct RateFunctionSpec {
    enum class Kind { WalkMdp, MagnetizationMdp, MagnetizationLdp };
    Kind kind;
    std::string speed_description;
    std::function<double(double)> rate;  // z -> I(z) >= 0

    // Walk MDP parameter a = int 4f(1-f) dmu.
    double a = std::numeric_limits<double>::quiet_NaN();
    // Magnetization parameters.
    long two_k = 0;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double beta_J = std::numeric_limits<double>::quiet_NaN();
    double sigma_sq = std::numeric_limits<double>::quiet_NaN();
    // Admissible scale-exponent range (open interval) for MDP kinds.
    double alpha_lo = std::numeric_limits<double>::quiet_NaN();
    double alpha_hi = std::numeric_limits<double>::quiet_NaN();

    // Exponent e with speed(n) = n^e: the walk MDP at a_n = n^theta runs at
    // speed a_n^2/n = n^{2 theta - 1}; the magnetization MDP at n^{1-2k+2k alpha}.
    double speed_exponent(double theta_or_alpha) const;
};

// Theorem-level rate of the walk MDP: I(t) = t^2/(2a). Throws
// DegenerateVarianceError if a vanishes numerically (hypothesis a > 0).
RateFunctionSpec walk_mdp_rate(const SystemDescriptor& sys);

}  // namespace mflab
