#include "mflab/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "closed_forms.hpp"
#include "mflab/walk.hpp"

namespace mflab {

namespace {

constexpr int kOrderCap = 12;

// Coefficient tables of the tanh derivative polynomials D_1..D_12
// (D_{j+1} = (1-u^2) D_j', D_1 = u). Coefficients are integers well below
// 2^53, so double arithmetic builds them exactly.
const std::vector<std::vector<double>>& tanh_poly_table() {
    static const std::vector<std::vector<double>> table = [] {
        std::vector<std::vector<double>> t;
        t.reserve(kOrderCap);
        t.push_back({0.0, 1.0});  // D_1 = u
        for (int j = 1; j < kOrderCap; ++j) {
            const std::vector<double>& d = t.back();
            std::vector<double> der(d.size() > 1 ? d.size() - 1 : 1, 0.0);
            for (size_t i = 1; i < d.size(); ++i) der[i - 1] = double(i) * d[i];
            std::vector<double> next(der.size() + 2, 0.0);
            for (size_t i = 0; i < der.size(); ++i) {
                next[i] += der[i];
                next[i + 2] -= der[i];
            }
            t.push_back(std::move(next));
        }
        return t;
    }();
    return table;
}

inline double horner(const std::vector<double>& c, double u) {
    double v = 0.0;
    for (size_t i = c.size(); i-- > 0;) v = v * u + c[i];
    return v;
}

inline double p_poly(double beta_J, double s, int order) {
    if (order == 1) return beta_J * s;
    if (order == 2) return beta_J;
    return 0.0;
}

}  // namespace

double field_cumulant(double phi, double s, int order) {
    if (order < 0) throw DomainError("field_cumulant: negative order");
    if (order > kOrderCap)
        throw UnsupportedOrderError("field_cumulant: derivative order above 12");
    if (!(phi >= 0.0 && phi <= 1.0))
        throw DomainError("field_cumulant: phi must lie in [0,1]");
    if (phi == 0.0 || phi == 1.0) {
        double sign = phi == 1.0 ? 1.0 : -1.0;
        if (order == 0) return sign * s;
        if (order == 1) return sign;
        return 0.0;
    }
    if (order == 0) return step_cgf(phi, s);
    // u = tanh(s + atanh(2 phi - 1)) as a Moebius transform of tanh(s):
    // exact at every magnitude of s and phi without forming the infinite shift.
    double tau = std::tanh(s);
    double m = 2.0 * phi - 1.0;
    double u = (tau + m) / (1.0 + tau * m);
    return horner(tanh_poly_table()[static_cast<size_t>(order - 1)], u);
}

double eval_G(const SystemDescriptor& sys, double beta_J, double s, int order,
              double tol) {
    if (!(beta_J > 0.0)) throw DomainError("eval_G: betaJ must be positive");
    if (order < 0) throw DomainError("eval_G: negative order");
    if (order > kOrderCap) throw UnsupportedOrderError("eval_G: order above 12");
    double t = beta_J * s;
    if (order == 0) return beta_J * s * s / 2.0 - cgf_limit(sys, t, tol);
    double integral;
    if (order <= 2 && detail::has_torus_identity_closed_form(sys)) {
        integral = order == 1 ? detail::torus_identity_cgf_deriv(t)
                              : detail::torus_identity_cgf_second(t);
    } else if (sys.kind == SystemKind::ConstantField) {
        integral = field_cumulant(sys.field.eval(0.0), t, order);
    } else {
        integral = invariant_integral(
            sys, [&](double y) { return field_cumulant(sys.field.eval(y), t, order); },
            tol);
    }
    return p_poly(beta_J, s, order) - std::pow(beta_J, order) * integral;
}

double eval_Gn(const FieldTrajectory& traj, double beta_J, double s, int order) {
    if (!(beta_J > 0.0)) throw DomainError("eval_Gn: betaJ must be positive");
    if (order < 0) throw DomainError("eval_Gn: negative order");
    if (order > kOrderCap) throw UnsupportedOrderError("eval_Gn: order above 12");
    long n = traj.n();
    if (n < 1) throw DomainError("eval_Gn: empty trajectory");
    double t = beta_J * s;
    NeumaierSum sum;
    if (order == 0) {
        for (double p : traj.p) sum.add(step_cgf(p, t));
        return beta_J * s * s / 2.0 - sum.value() / double(n);
    }
    for (double p : traj.p) sum.add(field_cumulant(p, t, order));
    return p_poly(beta_J, s, order) -
           std::pow(beta_J, order) * (sum.value() / double(n));
}

namespace {

struct Candidate {
    double lo, hi;  // bracket with G' < 0 on the left, > 0 on the right
};

std::string derivative_table_string(const std::vector<std::pair<int, double>>& rows,
                                    double beta_J, double tau_rel) {
    std::ostringstream os;
    os << "order,value,threshold\n";
    for (auto [j, v] : rows)
        os << j << ',' << format_double(v) << ','
           << format_double(tau_rel * std::max(1.0, std::pow(beta_J, j))) << '\n';
    return os.str();
}

}  // namespace

std::vector<MinimumProfile> find_and_classify_minima(const SystemDescriptor& sys,
                                                     double beta_J,
                                                     const ClassifyTolerances& tols) {
    if (!(beta_J > 0.0))
        throw DomainError("find_and_classify_minima: betaJ must be positive");
    const double qtol = 1e-11;
    auto g1 = [&](double s) { return eval_G(sys, beta_J, s, 1, qtol); };
    auto g2 = [&](double s) { return eval_G(sys, beta_J, s, 2, qtol); };

    const double lo_end = -1.0 + 1e-9, hi_end = 1.0 - 1e-9;
    int npts = std::max(tols.grid_points, 3);
    std::vector<double> ss(static_cast<size_t>(npts)), gv(static_cast<size_t>(npts));
    double h = (hi_end - lo_end) / double(npts - 1);
    for (int i = 0; i < npts; ++i) {
        ss[static_cast<size_t>(i)] = lo_end + i * h;
        gv[static_cast<size_t>(i)] = g1(ss[static_cast<size_t>(i)]);
    }
    std::vector<Candidate> cands;
    for (int i = 0; i + 1 < npts; ++i) {
        double a = gv[static_cast<size_t>(i)], b = gv[static_cast<size_t>(i + 1)];
        if (a < 0.0 && b > 0.0) {
            cands.push_back({ss[static_cast<size_t>(i)], ss[static_cast<size_t>(i + 1)]});
        } else if (a == 0.0) {
            // Exact zero on the grid: a minimum if the neighbors bracket -/+.
            double left = i > 0 ? gv[static_cast<size_t>(i - 1)] : -1.0;
            if (left < 0.0 && b > 0.0)
                cands.push_back({i > 0 ? ss[static_cast<size_t>(i - 1)]
                                       : ss[static_cast<size_t>(i)] - h,
                                 ss[static_cast<size_t>(i + 1)]});
        }
    }
    if (cands.empty())
        throw BracketError("find_and_classify_minima: no sign change of G' on (-1,1)");

    std::vector<MinimumProfile> profiles;
    for (const Candidate& c : cands) {
        // One refinement pass narrows the bracket before the Newton polish.
        double a = c.lo, b = c.hi, fa = g1(a);
        const int refine = 40;
        for (int i = 1; i <= refine; ++i) {
            double x = c.lo + (c.hi - c.lo) * double(i) / refine;
            double fx = g1(x);
            if (fa < 0.0 && fx >= 0.0) {
                a = c.lo + (c.hi - c.lo) * double(i - 1) / refine;
                b = x;
                break;
            }
            fa = fx;
        }
        RootResult root = solve_bracketed(g1, g2, 0.0, a, b,
                                          tols.stationary_ftol * std::max(1.0, beta_J),
                                          1e-15, 200);
        double m = root.x;

        // A flat (degenerate) minimum limits how precisely the G' root pins m:
        // a residual offset delta feeds lambda*delta into the odd derivatives.
        // When an odd order fires while the following even order dominates,
        // re-center on the zero of that odd derivative, which is simple and
        // well conditioned exactly in this situation, then classify again.
        std::vector<std::pair<int, double>> derivs;
        long two_k = 0;
        double lambda = 0.0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            derivs.clear();
            int odd_j = 0;
            double odd_v = 0.0;
            for (int j = 2; j <= tols.order_cap; ++j) {
                double v = eval_G(sys, beta_J, m, j, qtol);
                derivs.emplace_back(j, v);
                double tau = tols.tau_rel * std::max(1.0, std::pow(beta_J, j));
                if (std::fabs(v) <= tau) continue;
                if (j % 2 == 0) {
                    if (v < 0.0)
                        throw ClassificationError(
                            "find_and_classify_minima: negative even derivative at a "
                            "bracketed minimum (order " + std::to_string(j) + ")",
                            derivative_table_string(derivs, beta_J, tols.tau_rel));
                    two_k = j;
                    lambda = v;
                } else {
                    odd_j = j;
                    odd_v = v;
                }
                break;
            }
            if (two_k != 0) break;
            if (odd_j == 0)
                throw ClassificationError(
                    "find_and_classify_minima: all derivatives up to order " +
                        std::to_string(tols.order_cap) + " below tolerance",
                    derivative_table_string(derivs, beta_J, tols.tau_rel));
            bool rescued = false;
            if (attempt < 3 && odd_j + 1 <= tols.order_cap) {
                double g_next = eval_G(sys, beta_J, m, odd_j + 1, qtol);
                double tau_next =
                    tols.tau_rel * std::max(1.0, std::pow(beta_J, odd_j + 1));
                if (g_next > tau_next) {
                    double w = std::min(1e-2, 4.0 * std::fabs(odd_v) / g_next);
                    auto gj = [&](double s) { return eval_G(sys, beta_J, s, odd_j, qtol); };
                    double lo2 = m - w, hi2 = m + w;
                    if ((gj(lo2) > 0.0) != (gj(hi2) > 0.0)) {
                        RootResult rr = solve_bracketed(gj, nullptr, 0.0, lo2, hi2,
                                                        0.0, 1e-15, 200);
                        m = rr.x;
                        rescued = true;
                    }
                }
            }
            if (!rescued)
                throw ClassificationError(
                    "find_and_classify_minima: first nonvanishing derivative at odd "
                    "order " + std::to_string(odd_j),
                    derivative_table_string(derivs, beta_J, tols.tau_rel));
        }
        if (two_k == 0)
            throw ClassificationError(
                "find_and_classify_minima: classification did not settle after "
                "re-centering",
                derivative_table_string(derivs, beta_J, tols.tau_rel));

        MinimumProfile prof;
        prof.m = m;
        prof.two_k = two_k;
        prof.lambda = lambda;
        prof.value = eval_G(sys, beta_J, m, 0, qtol);
        prof.global_min = false;
        double r2 = std::fabs(derivs.front().second) / std::max(1.0, beta_J * beta_J);
        if (two_k == 2 && r2 <= tols.near_band)
            prof.warnings.push_back(
                "near-degenerate: |G''(m)| inside the critical band; type may flip "
                "under tiny parameter changes");
        if (two_k >= 4 && r2 > 1e-2 * tols.tau_rel)
            prof.warnings.push_back(
                "near-degenerate: G''(m) only marginally below the classification "
                "threshold");
        profiles.push_back(std::move(prof));
    }

    double gmin = profiles.front().value;
    for (const MinimumProfile& p : profiles) gmin = std::min(gmin, p.value);
    for (MinimumProfile& p : profiles)
        p.global_min = (p.value - gmin) <= tols.value_tie * std::max(1.0, std::fabs(gmin));
    return profiles;
}

double critical_beta(const SystemDescriptor& sys, double J,
                     std::pair<double, double> bracket) {
    if (!(J > 0.0)) throw DomainError("critical_beta: J must be positive");
    double mean_field = invariant_integral(
        sys, [&](double y) { return 2.0 * sys.field.eval(y) - 1.0; }, 1e-10);
    if (std::fabs(mean_field) > 1e-8)
        throw UnsupportedBranchError(
            "critical_beta: field is not centered (int (2f-1) dmu = " +
            format_double(mean_field) + "); the m=0 branch does not apply");
    double lo = bracket.first, hi = bracket.second;
    if (!(hi > lo)) {
        lo = 0.1 / J;
        hi = 100.0 / J;
    }
    auto curvature = [&](double beta) { return eval_G(sys, beta * J, 0.0, 2, 1e-11); };
    double flo = curvature(lo), fhi = curvature(hi);
    if ((flo > 0.0) == (fhi > 0.0))
        throw BracketError("critical_beta: no sign change of G''(0) over the bracket");
    RootResult root = solve_bracketed(curvature, nullptr, 0.0, lo, hi, 1e-10, 1e-14, 200);
    return root.x;
}

}  // namespace mflab
