#include "mflab/deviations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mflab/gibbs.hpp"
#include "mflab/numerics.hpp"

namespace mflab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double factorial(long m) {
    double f = 1.0;
    for (long i = 2; i <= m; ++i) f *= double(i);
    return f;
}

bool errors_non_increasing_tail(const std::vector<double>& err) {
    size_t m = std::min<size_t>(err.size(), 3);
    for (size_t i = err.size() - m; i + 1 < err.size(); ++i)
        if (err[i + 1] > err[i] + 1e-15 * std::max(1.0, err[i])) return false;
    return true;
}

}  // namespace

TrajectoryProvider orbit_family(const SystemDescriptor& sys, double x0) {
    return [sys, x0](long n) { return orbit(sys, x0, n); };
}

double ldp_rate_magnetization(const SystemDescriptor& sys, double beta_J, double s) {
    if (!(beta_J > 0.0))
        throw DomainError("ldp_rate_magnetization: betaJ must be positive");
    if (s < -1.0 || s > 1.0) return inf;
    ConvexFunction cgf = walk_cgf_function(sys);
    auto F = [&](double z) {
        return legendre_transform(cgf, z) - 0.5 * beta_J * z * z;
    };
    // The infimum of F over [-1,1] is attained on the minimizer set of the
    // limiting free-energy landscape; a coarse direct scan guards the
    // reduction in case a profile is missed.
    std::vector<MinimumProfile> profiles = find_and_classify_minima(sys, beta_J);
    double fmin = inf;
    for (const MinimumProfile& p : profiles)
        if (p.global_min) fmin = std::min(fmin, F(p.m));
    const int scan = 81;
    int best = -1;
    for (int i = 0; i < scan; ++i) {
        double z = -1.0 + 2.0 * double(i) / (scan - 1);
        double v = F(z);
        if (v < fmin - 1e-10 * std::max(1.0, std::fabs(fmin))) {
            fmin = v;
            best = i;
        }
    }
    if (best > 0 && best + 1 < scan) {
        // Golden-section polish of an unexpected scan minimum.
        double a = -1.0 + 2.0 * double(best - 1) / (scan - 1);
        double b = -1.0 + 2.0 * double(best + 1) / (scan - 1);
        const double g = 0.6180339887498949;
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = F(x1), f2 = F(x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = F(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = F(x2);
            }
        }
        fmin = std::min(fmin, std::min(f1, f2));
    }
    double rate = F(s) - fmin;
    if (rate < 0.0 && rate >= -1e-9) rate = 0.0;
    return rate;
}

RateFunctionSpec mdp_rate_magnetization(const MinimumProfile& profile, double beta_J) {
    if (!(beta_J > 0.0))
        throw DomainError("mdp_rate_magnetization: betaJ must be positive");
    long two_k = profile.two_k;
    double lambda = profile.lambda;
    if (two_k < 2 || two_k % 2 != 0)
        throw DomainError("mdp_rate_magnetization: profile order must be even, >= 2");
    if (!(lambda > 0.0))
        throw DomainError("mdp_rate_magnetization: profile curvature must be positive");
    RateFunctionSpec spec;
    spec.kind = RateFunctionSpec::Kind::MagnetizationMdp;
    spec.two_k = two_k;
    spec.lambda = lambda;
    spec.beta_J = beta_J;
    spec.alpha_lo = 1.0 - 1.0 / double(two_k);
    spec.alpha_hi = 1.0;
    spec.speed_description = "n^(1 - 2k + 2k alpha)";
    if (two_k == 2) {
        if (!(lambda < beta_J))
            throw DegenerateVarianceError(
                "mdp_rate_magnetization: lambda >= betaJ leaves sigma^2 = "
                "1/lambda - 1/betaJ nonpositive");
        double sigma_sq = 1.0 / lambda - 1.0 / beta_J;
        spec.sigma_sq = sigma_sq;
        spec.rate = [sigma_sq](double z) { return z * z / (2.0 * sigma_sq); };
    } else {
        double fact = factorial(two_k);
        double lam = lambda;
        long tk = two_k;
        spec.rate = [lam, fact, tk](double z) {
            return lam * std::pow(z, double(tk)) / fact;
        };
    }
    return spec;
}

double clt_normalization(long two_k, double lambda_tilde) {
    if (two_k < 2 || two_k % 2 != 0)
        throw DomainError("clt_normalization: order must be even, >= 2");
    if (!(lambda_tilde > 0.0))
        throw DomainError("clt_normalization: lambda_tilde must be positive");
    double k = double(two_k) / 2.0;
    double c = lambda_tilde / factorial(two_k);
    return k * std::pow(c, 1.0 / double(two_k)) / std::tgamma(1.0 / double(two_k));
}

double clt_limit_density(long two_k, double lambda, double beta_J, double s) {
    if (two_k < 2 || two_k % 2 != 0)
        throw DomainError("clt_limit_density: order must be even, >= 2");
    if (!(lambda > 0.0))
        throw DomainError("clt_limit_density: lambda must be positive");
    double lambda_tilde;
    if (two_k == 2) {
        if (!(lambda < beta_J))
            throw DegenerateVarianceError(
                "clt_limit_density: lambda >= betaJ leaves the limiting variance "
                "nonpositive");
        lambda_tilde = 1.0 / (1.0 / lambda - 1.0 / beta_J);
    } else {
        lambda_tilde = lambda;
    }
    double c = lambda_tilde / factorial(two_k);
    return clt_normalization(two_k, lambda_tilde) *
           std::exp(-c * std::pow(s, double(two_k)));
}

ScalingCheckTable scaling_limit_check(const TrajectoryProvider& provider,
                                      std::span<const long> n_grid, double beta_J,
                                      const MinimumProfile& profile, double alpha,
                                      std::span<const double> s_grid, double radius) {
    long two_k = profile.two_k;
    if (!(alpha > 1.0 - 1.0 / double(two_k) && alpha < 1.0))
        throw DomainError("scaling_limit_check: alpha outside (1 - 1/2k, 1)");
    if (n_grid.empty() || s_grid.empty())
        throw DomainError("scaling_limit_check: empty grid");
    double fact = factorial(two_k);
    ScalingCheckTable table;
    table.s_grid.assign(s_grid.begin(), s_grid.end());
    table.alpha = alpha;
    table.radius = radius;
    for (long n : n_grid) {
        FieldTrajectory traj = provider(n);
        double scale = std::pow(double(n), -(1.0 - alpha));
        double speed = std::pow(double(n), double(two_k) * (1.0 - alpha));
        double gm = eval_Gn(traj, beta_J, profile.m, 0);
        double window_edge = radius * std::pow(double(n), 1.0 - alpha);
        double sup_err = 0.0;
        bool lower_ok = true;
        for (double s : s_grid) {
            double scaled =
                speed * (eval_Gn(traj, beta_J, profile.m + s * scale, 0) - gm);
            double limit = profile.lambda * std::pow(s, double(two_k)) / fact;
            sup_err = std::max(sup_err, std::fabs(scaled - limit));
            if (std::fabs(s) <= window_edge) {
                double bound = 0.5 * profile.lambda *
                               std::pow(std::fabs(s), double(two_k)) / fact;
                for (long j = 1; j < two_k; ++j)
                    bound -= std::pow(std::fabs(s), double(j));
                if (scaled < bound - 1e-12 * std::max(1.0, std::fabs(bound)))
                    lower_ok = false;
            }
        }
        table.rows.push_back({n, sup_err, lower_ok});
    }
    return table;
}

LaplaceCheckResult laplace_limit_check(const std::function<double(double)>& f,
                                       double M, std::span<const double> gamma_grid) {
    if (!(M > 0.0)) throw DomainError("laplace_limit_check: M must be positive");
    if (gamma_grid.empty()) throw DomainError("laplace_limit_check: empty gamma grid");
    for (size_t i = 0; i < gamma_grid.size(); ++i) {
        if (!(gamma_grid[i] > 0.0))
            throw DomainError("laplace_limit_check: gamma must be positive");
        if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1]))
            throw DomainError("laplace_limit_check: gamma grid must increase");
    }
    // Locate max f on [-M, M]: dense scan plus one parabolic refinement.
    const int scan = 10001;
    double fmax = -inf, xmax = -M;
    std::vector<double> fs(scan);
    for (int i = 0; i < scan; ++i) {
        double x = -M + 2.0 * M * double(i) / (scan - 1);
        fs[i] = f(x);
        if (fs[i] > fmax) {
            fmax = fs[i];
            xmax = x;
        }
    }
    int imax = int(std::max_element(fs.begin(), fs.end()) - fs.begin());
    if (imax > 0 && imax + 1 < scan) {
        double y0 = fs[imax - 1], y1 = fs[imax], y2 = fs[imax + 1];
        double denom = y0 - 2.0 * y1 + y2;
        if (denom < 0.0) {
            double step = 2.0 * M / (scan - 1);
            double off = 0.5 * step * (y0 - y2) / denom;
            if (std::fabs(off) <= step) {
                double xr = xmax + off;
                double fr = f(xr);
                if (fr > fmax) fmax = fr;
            }
        }
    }
    LaplaceCheckResult res;
    res.max_f = fmax;
    res.gammas.assign(gamma_grid.begin(), gamma_grid.end());
    for (double gamma : gamma_grid) {
        auto g = [&](double x) { return std::exp(gamma * (f(x) - fmax)); };
        QuadratureResult q = integrate(g, -M, M, 1e-9 * std::max(1.0, 2.0 * M));
        double value = fmax + std::log(q.value) / gamma;
        res.values.push_back(value);
        res.errors.push_back(std::fabs(value - fmax));
    }
    return res;
}

std::vector<double> DeviationVerdict::errors() const {
    std::vector<double> err(r.size());
    for (size_t i = 0; i < r.size(); ++i) err[i] = std::fabs(r[i] - target);
    return err;
}

void DeviationVerdict::write_csv(std::ostream& os) const {
    os << "n,speed,log_prob,r_n,err\n";
    std::vector<double> err = errors();
    for (size_t i = 0; i < grid.size(); ++i)
        os << grid[i] << ',' << format_double(speed[i]) << ','
           << format_double(log_prob[i]) << ',' << format_double(r[i]) << ','
           << format_double(err[i]) << '\n';
}

DeviationVerdict verify_walk_mdp(const SystemDescriptor& sys, double x0, double theta,
                                 double t, std::span<const long> n_grid) {
    if (!(theta > 0.5 && theta < 1.0))
        throw DomainError("verify_walk_mdp: theta must lie in (1/2, 1)");
    if (!(t > 0.0)) throw DomainError("verify_walk_mdp: t must be positive");
    if (n_grid.empty()) throw DomainError("verify_walk_mdp: empty n grid");
    for (long n : n_grid)
        if (n < 1 || n > 20000)
            throw DomainError(
                "verify_walk_mdp: n outside [1, 2*10^4] (quadratic-cost law)");
    RateFunctionSpec spec = walk_mdp_rate(sys);
    DeviationVerdict v;
    v.target = spec.rate(t);
    for (long n : n_grid) {
        FieldTrajectory traj = orbit(sys, x0, n);
        LatticeDistribution dist = walk_distribution(traj);
        NeumaierSum mean;
        for (double p : traj.p) mean.add(2.0 * p - 1.0);
        double a_n = std::pow(double(n), theta);
        double threshold = t * a_n + mean.value();
        double lp = dist.log_tail_geq(threshold);
        if (is_log_zero(lp))
            throw EventEmptyError(
                "verify_walk_mdp: the event {S_n >= " + format_double(threshold) +
                "} carries no atoms at n = " + std::to_string(n));
        double speed = std::pow(double(n), 2.0 * theta - 1.0);
        v.grid.push_back(n);
        v.log_prob.push_back(lp);
        v.speed.push_back(speed);
        v.r.push_back(-lp / speed);
    }
    v.trend = errors_non_increasing_tail(v.errors());
    return v;
}

DeviationVerdict verify_magnetization_mdp(const TrajectoryProvider& provider,
                                          double beta, double J,
                                          std::span<const long> n_grid,
                                          const MinimumProfile& profile, double alpha,
                                          double z, std::optional<double> window) {
    long two_k = profile.two_k;
    if (!(alpha > 1.0 - 1.0 / double(two_k) && alpha < 1.0))
        throw DomainError("verify_magnetization_mdp: alpha outside (1 - 1/2k, 1)");
    if (!(z > 0.0)) throw DomainError("verify_magnetization_mdp: z must be positive");
    if (n_grid.empty()) throw DomainError("verify_magnetization_mdp: empty n grid");
    if (window && !(*window > 0.0))
        throw DomainError("verify_magnetization_mdp: window must be positive");
    double beta_J = beta * J;
    RateFunctionSpec spec = mdp_rate_magnetization(profile, beta_J);
    double exponent = spec.speed_exponent(alpha);
    DeviationVerdict v;
    v.target = spec.rate(z);
    v.window = window;
    for (long n : n_grid) {
        FieldTrajectory traj = provider(n);
        ModelParams params(beta, J, n);
        LatticeDistribution dist = magnetization_distribution(traj, params);
        double center = double(n) * profile.m;
        double threshold = center + z * std::pow(double(n), alpha);
        double lp;
        if (window) {
            double lo = center - *window * double(n);
            double hi = center + *window * double(n);
            double lw = dist.log_window(lo, hi);
            if (is_log_zero(lw))
                throw WindowEmptyError(
                    "verify_magnetization_mdp: conditioning window [" +
                    format_double(lo) + ", " + format_double(hi) +
                    "] carries no atoms at n = " + std::to_string(n));
            double le = dist.log_tail_geq_window(threshold, lo, hi);
            if (is_log_zero(le))
                throw EventEmptyError(
                    "verify_magnetization_mdp: the event {M_n >= " +
                    format_double(threshold) +
                    "} misses the window at n = " + std::to_string(n));
            lp = le - lw;
        } else {
            lp = dist.log_tail_geq(threshold);
            if (is_log_zero(lp))
                throw EventEmptyError(
                    "verify_magnetization_mdp: the event {M_n >= " +
                    format_double(threshold) +
                    "} carries no atoms at n = " + std::to_string(n));
        }
        double speed = std::pow(double(n), exponent);
        v.grid.push_back(n);
        v.log_prob.push_back(lp);
        v.speed.push_back(speed);
        v.r.push_back(-lp / speed);
    }
    v.trend = errors_non_increasing_tail(v.errors());
    return v;
}

}  // namespace mflab
