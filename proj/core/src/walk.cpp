#include "mflab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "closed_forms.hpp"

namespace mflab {

LatticeDistribution::LatticeDistribution(long n, LawKind kind,
                                         std::vector<double> log_masses)
    : n_(n), kind_(kind), logm_(std::move(log_masses)) {
    if (n_ < 1) throw DomainError("LatticeDistribution: need n >= 1");
    if (logm_.size() != static_cast<size_t>(n_ + 1))
        throw DomainError("LatticeDistribution: mass vector must have n+1 atoms");
    double lse = logsumexp(logm_);
    if (!std::isfinite(lse))
        throw DomainError("LatticeDistribution: masses do not normalize");
    for (double& lm : logm_)
        if (lm != log_zero) lm -= lse;
}

double LatticeDistribution::log_prob(long k) const {
    if (k < -n_ || k > n_ || ((k + n_) & 1L)) return log_zero;
    return logm_[static_cast<size_t>(index_of(k, n_))];
}

double LatticeDistribution::prob(long k) const {
    double lm = log_prob(k);
    return lm == log_zero ? 0.0 : std::exp(lm);
}

double LatticeDistribution::mean() const {
    NeumaierSum s;
    for (long j = 0; j <= n_; ++j) {
        double lm = logm_[static_cast<size_t>(j)];
        if (lm != log_zero) s.add(std::exp(lm) * double(2 * j - n_));
    }
    return s.value();
}

double LatticeDistribution::variance() const {
    double mu = mean();
    NeumaierSum s;
    for (long j = 0; j <= n_; ++j) {
        double lm = logm_[static_cast<size_t>(j)];
        if (lm == log_zero) continue;
        double d = double(2 * j - n_) - mu;
        s.add(std::exp(lm) * d * d);
    }
    return s.value();
}

namespace {

// Thresholds are compared with a relative slack so that a cutoff meant to sit
// exactly on an atom survives the rounding of t*a_n-style arithmetic.
inline double slacked(double threshold) {
    return threshold - 1e-12 * std::max(1.0, std::fabs(threshold));
}

}  // namespace

double LatticeDistribution::log_tail_geq(double threshold) const {
    double thr = slacked(threshold);
    long j0 = static_cast<long>(std::ceil((thr + double(n_)) / 2.0));
    if (j0 < 0) j0 = 0;
    if (j0 > n_) return log_zero;
    return logsumexp(std::span<const double>(logm_).subspan(static_cast<size_t>(j0)));
}

double LatticeDistribution::log_window(double lo, double hi) const {
    double l = slacked(lo);
    double h = hi + 1e-12 * std::max(1.0, std::fabs(hi));
    long j0 = static_cast<long>(std::ceil((l + double(n_)) / 2.0));
    long j1 = static_cast<long>(std::floor((h + double(n_)) / 2.0));
    j0 = std::max(j0, 0L);
    j1 = std::min(j1, n_);
    if (j0 > j1) return log_zero;
    return logsumexp(std::span<const double>(logm_).subspan(
        static_cast<size_t>(j0), static_cast<size_t>(j1 - j0 + 1)));
}

double LatticeDistribution::log_tail_geq_window(double threshold, double lo,
                                                double hi) const {
    return log_window(std::max(threshold, lo), hi);
}

void LatticeDistribution::write_csv(std::ostream& os) const {
    os << "k,log_prob,prob\n";
    for (long j = 0; j <= n_; ++j) {
        double lm = logm_[static_cast<size_t>(j)];
        os << (2 * j - n_) << ',' << format_double(lm) << ','
           << format_double(lm == log_zero ? 0.0 : std::exp(lm)) << '\n';
    }
}

LatticeDistribution walk_distribution(const FieldTrajectory& traj) {
    long n = traj.n();
    if (n < 1) throw DomainError("walk_distribution: empty trajectory");
    std::vector<double> prev(1, 0.0), cur;
    for (long i = 1; i <= n; ++i) {
        double p = traj.p[static_cast<size_t>(i - 1)];
        double lp = p > 0.0 ? std::log(p) : log_zero;
        double lq = p < 1.0 ? std::log1p(-p) : log_zero;
        cur.assign(static_cast<size_t>(i + 1), log_zero);
        for (long j = 0; j <= i; ++j) {
            double up = j >= 1 ? prev[static_cast<size_t>(j - 1)] : log_zero;
            double down = j <= i - 1 ? prev[static_cast<size_t>(j)] : log_zero;
            double a = (up == log_zero || lp == log_zero) ? log_zero : up + lp;
            double b = (down == log_zero || lq == log_zero) ? log_zero : down + lq;
            cur[static_cast<size_t>(j)] = logaddexp(a, b);
        }
        prev.swap(cur);
    }
    return LatticeDistribution(n, LawKind::Walk, std::move(prev));
}

std::vector<long> sample_walk(const FieldTrajectory& traj, std::mt19937_64& rng) {
    long n = traj.n();
    std::vector<long> path(static_cast<size_t>(n + 1));
    path[0] = 0;
    for (long i = 1; i <= n; ++i) {
        bool up = uniform01(rng) < traj.p[static_cast<size_t>(i - 1)];
        path[static_cast<size_t>(i)] = path[static_cast<size_t>(i - 1)] + (up ? 1 : -1);
    }
    return path;
}

double cgf_quenched(const FieldTrajectory& traj, double lambda) {
    if (traj.n() < 1) throw DomainError("cgf_quenched: empty trajectory");
    NeumaierSum s;
    for (double p : traj.p) s.add(step_cgf(p, lambda));
    return s.value() / double(traj.n());
}

namespace {

// d/dlambda L(phi, lambda) = tanh(lambda + atanh(2 phi - 1)), written as a
// Moebius transform of tanh(lambda) so degenerate phi needs no special case.
inline double step_cgf_deriv(double phi, double lambda) {
    double tau = std::tanh(lambda);
    double m = 2.0 * phi - 1.0;
    return (tau + m) / (1.0 + tau * m);
}

}  // namespace

double cgf_limit(const SystemDescriptor& sys, double lambda, double tol) {
    if (detail::has_torus_identity_closed_form(sys))
        return detail::torus_identity_cgf(lambda);
    if (sys.kind == SystemKind::ConstantField)
        return step_cgf(sys.field.eval(0.0), lambda);
    return invariant_integral(
        sys, [&](double y) { return step_cgf(sys.field.eval(y), lambda); }, tol);
}

ConvexFunction walk_cgf_function(const SystemDescriptor& sys, double tol) {
    if (detail::has_torus_identity_closed_form(sys)) {
        return {[](double t) { return detail::torus_identity_cgf(t); },
                [](double t) { return detail::torus_identity_cgf_deriv(t); }};
    }
    if (sys.kind == SystemKind::ConstantField) {
        double p = sys.field.eval(0.0);
        return {[p](double t) { return step_cgf(p, t); },
                [p](double t) { return step_cgf_deriv(p, t); }};
    }
    SystemDescriptor copy = sys;
    return {[copy, tol](double t) {
                return invariant_integral(
                    copy, [&](double y) { return step_cgf(copy.field.eval(y), t); },
                    tol);
            },
            [copy, tol](double t) {
                return invariant_integral(
                    copy,
                    [&](double y) { return step_cgf_deriv(copy.field.eval(y), t); },
                    tol);
            }};
}

ConjugatePoint legendre_transform_point(const ConvexFunction& cgf, double y) {
    const double inf = std::numeric_limits<double>::infinity();
    double lo = -1.0, hi = 1.0;
    bool bracketed = true;
    try {
        expand_bracket(cgf.deriv, y, lo, hi);
    } catch (const BracketError&) {
        bracketed = false;
    }
    if (bracketed) {
        RootResult root = solve_bracketed(cgf.deriv, nullptr, y, lo, hi, 1e-12, 1e-15, 200);
        return {root.x * y - cgf.value(root.x), root.x};
    }
    // y at or beyond the edge of the range of the derivative: the supremum is
    // the asymptote limit of y*lambda - Lambda(lambda), finite exactly when
    // the underlying law puts positive mass on the extreme path.
    double d = (y >= cgf.deriv(0.0)) ? 1.0 : -1.0;
    double r1 = y * (30.0 * d) - cgf.value(30.0 * d);
    double r2 = y * (60.0 * d) - cgf.value(60.0 * d);
    if (std::fabs(r2 - r1) <= 1e-6 * std::max(1.0, std::fabs(r2)))
        return {r2, d * inf};
    return {inf, d * inf};
}

double legendre_transform(const ConvexFunction& cgf, double y) {
    return legendre_transform_point(cgf, y).value;
}

double RateFunctionSpec::speed_exponent(double theta_or_alpha) const {
    switch (kind) {
        case Kind::WalkMdp:
            return 2.0 * theta_or_alpha - 1.0;
        case Kind::MagnetizationMdp:
            // two_k already stores the full even order 2k.
            return 1.0 - double(two_k) + double(two_k) * theta_or_alpha;
        case Kind::MagnetizationLdp:
            return 1.0;
    }
    return 1.0;
}

RateFunctionSpec walk_mdp_rate(const SystemDescriptor& sys) {
    double a = invariant_integral(
        sys,
        [&](double y) {
            double f = sys.field.eval(y);
            return 4.0 * f * (1.0 - f);
        },
        1e-10);
    if (!(a > 1e-12))
        throw DegenerateVarianceError(
            "walk_mdp_rate: step variance a = int 4f(1-f) dmu vanishes");
    RateFunctionSpec spec;
    spec.kind = RateFunctionSpec::Kind::WalkMdp;
    spec.speed_description = "a_n^2/n = n^(2 theta - 1) with a_n = n^theta";
    spec.a = a;
    spec.alpha_lo = 0.5;
    spec.alpha_hi = 1.0;
    spec.rate = [a](double t) { return t * t / (2.0 * a); };
    return spec;
}

}  // namespace mflab
