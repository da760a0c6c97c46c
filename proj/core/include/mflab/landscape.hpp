#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mflab/dynsys.hpp"

namespace mflab {

// d^order/ds^order of L(phi, s) = log(phi e^s + (1-phi) e^{-s}).
// Order 0 is L itself via the shifted form logcosh(s+c) - logcosh(c) with
// c = atanh(2 phi - 1); order j >= 1 evaluates the tanh derivative polynomial
// D_j at u = tanh(s+c), where D_1 = u and D_{j+1} = (1-u^2) D_j'. Degenerate
// phi in {0,1} gives the linear forms +-s (all higher derivatives zero).
// Orders above 12 throw UnsupportedOrderError.
double field_cumulant(double phi, double s, int order);

// G^(order)(s) for G(s) = betaJ s^2/2 - int L(f(y), betaJ s) dmu(y).
// Derivatives differentiate under the integral and carry the chain-rule factor
// (betaJ)^order; the torus identity field uses the closed form
// G(s) = betaJ s^2/2 - (betaJ s coth(betaJ s) - 1) for the value.
double eval_G(const SystemDescriptor& sys, double beta_J, double s, int order,
              double tol = 1e-10);

// G_n^(order)(s) for G_n(s) = betaJ s^2/2 - (1/n) sum_i L(p_i, betaJ s).
double eval_Gn(const FieldTrajectory& traj, double beta_J, double s, int order);

struct ClassifyTolerances {
    // A derivative of order j counts as nonzero above tau_rel * max(1, (betaJ)^j).
    double tau_rel = 1e-6;
    // |G''(m)| (relatively) inside this band earns a near-degenerate warning:
    // the parameters sit numerically close to a type change.
    double near_band = 1e-4;
    // Minima within this (relative) value distance of the lowest one are global.
    double value_tie = 1e-9;
    // |G'(m)| target for the stationarity solve, scaled by max(1, betaJ).
    double stationary_ftol = 1e-12;
    int grid_points = 4001;
    int order_cap = 12;
};

// A classified minimizer of G: location, type 2k (first nonvanishing
// derivative order at or above 2), strength lambda = G^(2k)(m), value G(m),
// and whether it attains the global minimum.
struct MinimumProfile {
    double m;
    long two_k;
    double lambda;
    double value;
    bool global_min;
    std::vector<std::string> warnings;
};

// Locates every minimum of G on (-1,1) by scanning G' on a uniform grid for
// -/+ sign changes (all stationary points lie inside: G'(s) has the sign of s
// for |s| >= 1), polishing each bracket with safeguarded Newton, and
// classifying by the first above-tolerance derivative. A first nonvanishing
// derivative at odd order raises ClassificationError with the derivative table.
std::vector<MinimumProfile> find_and_classify_minima(
    const SystemDescriptor& sys, double beta_J, const ClassifyTolerances& tols = {});

// The inverse temperature at which G''(0) = betaJ - (betaJ)^2 int 4f(1-f) dmu
// changes sign: the symmetric-branch phase transition. Requires a centered
// field (int (2f-1) dmu = 0) and a bracket straddling the sign change.
double critical_beta(const SystemDescriptor& sys, double J,
                     std::pair<double, double> bracket = {0.0, 0.0});

}  // namespace mflab
