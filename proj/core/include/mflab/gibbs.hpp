#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mflab/dynsys.hpp"
#include "mflab/errors.hpp"
#include "mflab/walk.hpp"

namespace mflab {

// Mean-field coupling parameters. Only the product beta*J enters the energy,
// but both are kept so reports can echo the user's inputs.
struct ModelParams {
    double beta;
    double J;
    long n;

    ModelParams(double beta_, double J_, long n_);
    double beta_J() const { return beta * J; }
};

using SpinConfiguration = std::vector<std::int8_t>;

// -(betaJ/(2n)) (sum sigma)^2 - (1/2) sum log(p_i/(1-p_i)) sigma_i.
double hamiltonian_energy(const SpinConfiguration& sigma, const FieldTrajectory& traj,
                          const ModelParams& params);

// Exact law of the total magnetization: the product-walk law tilted by
// exp(betaJ k^2/(2n)) and renormalized.
LatticeDistribution magnetization_distribution(const FieldTrajectory& traj,
                                               const ModelParams& params);

// log of sum over configurations of exp(-H); no 2^-n counting factor.
double log_partition(const FieldTrajectory& traj, const ModelParams& params);

// Forward walk table P(S_i = k) for i = 0..n, kept in full so configurations
// can be drawn backward conditioned on the endpoint. Quadratic memory.
class WalkDpTable {
public:
    explicit WalkDpTable(const FieldTrajectory& traj);

    long n() const { return n_; }
    // log P(S_level = k) under the independent-spin product law.
    double log_prob(long level, long k) const;
    // Exact draw of sigma given sum sigma_i = k. The mean-field tilt is a
    // function of the sum alone, so conditioning removes it.
    SpinConfiguration sample_conditioned(long k, std::mt19937_64& rng) const;

private:
    long n_;
    std::vector<double> log_up_, log_down_;
    std::vector<std::vector<double>> rows_;
};

// Caches the DP table and the tilted endpoint law for repeated draws.
class GibbsSampler {
public:
    GibbsSampler(const FieldTrajectory& traj, const ModelParams& params);

    const LatticeDistribution& magnetization_law() const { return law_; }
    SpinConfiguration sample(std::mt19937_64& rng) const;

private:
    WalkDpTable table_;
    LatticeDistribution law_;
    std::vector<double> cdf_;
};

SpinConfiguration sample_configuration(const FieldTrajectory& traj,
                                       const ModelParams& params,
                                       std::mt19937_64& rng);

// Density of the rescaled auxiliary Gaussian-mixing coordinate:
// exp(-n Gn(m + s n^-(1-alpha))) / integral of the same over the whole line.
class HsDensity {
public:
    HsDensity(const FieldTrajectory& traj, const ModelParams& params, double m,
              double alpha);

    double log_value(double s) const;
    double operator()(double s) const { return std::exp(log_value(s)); }
    // Maximizer of the density in s, found during normalization.
    double argmax() const { return argmax_; }

private:
    FieldTrajectory traj_;
    double beta_J_;
    long n_;
    double m_;
    double scale_;  // n^-(1-alpha)
    double log_norm_;
    double argmax_;
};

double hs_density(const FieldTrajectory& traj, const ModelParams& params, double m,
                  double alpha, double s);

}  // namespace mflab
