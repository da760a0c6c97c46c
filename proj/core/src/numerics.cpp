#include "mflab/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

namespace mflab {

double logsumexp(std::span<const double> xs) {
    double m = log_zero;
    for (double x : xs)
        if (x > m) m = x;
    if (m == log_zero) return log_zero;
    NeumaierSum s;
    for (double x : xs)
        if (x != log_zero) s.add(std::exp(x - m));
    return m + std::log(s.value());
}

namespace {

struct Panel {
    double a, b;
    double fa, fm, fb;
    double s;         // Simpson estimate over [a,b]
    double tol;       // absolute tolerance share for this panel
    double err_hint;  // parent's Richardson estimate, for reporting on bail-out
};

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol, int initial_nodes, long max_evals) {
    if (!(b > a)) {
        if (a == b) return {0.0, 0.0, 0};
        throw DomainError("integrate: bad interval");
    }
    if (!(tol > 0.0)) throw DomainError("integrate: tolerance must be positive");
    int panels = std::max(1, (initial_nodes - 1) / 2);
    long evals = 0;
    double h = (b - a) / (2.0 * panels);
    std::vector<double> fx(2 * panels + 1);
    for (int i = 0; i <= 2 * panels; ++i) {
        fx[i] = f(a + i * h);
        ++evals;
    }
    std::vector<Panel> stack;
    stack.reserve(64);
    for (int i = 0; i < panels; ++i) {
        double pa = a + 2 * i * h, pb = a + 2 * (i + 1) * h;
        double s = simpson(pa, pb, fx[2 * i], fx[2 * i + 1], fx[2 * i + 2]);
        stack.push_back({pa, pb, fx[2 * i], fx[2 * i + 1], fx[2 * i + 2], s,
                         tol / panels, std::fabs(s)});
    }
    NeumaierSum value, err_acc;
    const double min_width = 8.0 * std::numeric_limits<double>::epsilon() *
                             std::max({std::fabs(a), std::fabs(b), 1.0});
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        if (evals + 2 > max_evals) {
            // Out of budget: total up what we have plus the raw estimates of
            // everything still pending and report the achieved error.
            NeumaierSum rest_v, rest_e;
            rest_v.add(p.s);
            rest_e.add(p.err_hint);
            for (const Panel& q : stack) {
                rest_v.add(q.s);
                rest_e.add(q.err_hint);
            }
            double partial = value.value() + rest_v.value();
            double achieved = err_acc.value() + rest_e.value();
            throw QuadratureError("integrate: evaluation cap reached before tolerance",
                                  partial, achieved);
        }
        double m = 0.5 * (p.a + p.b);
        double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
        double flm = f(lm), frm = f(rm);
        evals += 2;
        double sl = simpson(p.a, m, p.fa, flm, p.fm);
        double sr = simpson(m, p.b, p.fm, frm, p.fb);
        double err = (sl + sr - p.s) / 15.0;
        if (std::fabs(err) <= p.tol || (p.b - p.a) <= min_width) {
            value.add(sl + sr + err);
            err_acc.add(std::fabs(err));
        } else {
            stack.push_back({p.a, m, p.fa, flm, p.fm, sl, 0.5 * p.tol, std::fabs(err)});
            stack.push_back({m, p.b, p.fm, frm, p.fb, sr, 0.5 * p.tol, std::fabs(err)});
        }
    }
    return {value.value(), err_acc.value(), evals};
}

LogIntegralResult log_integrate_exp(const std::function<double(double)>& logf,
                                    double center_guess, double initial_halfwidth,
                                    double rel_tol, double window_drop, long max_evals) {
    if (!(initial_halfwidth > 0.0)) throw DomainError("log_integrate_exp: bad halfwidth");
    const int scan_points = 129;
    double lo = center_guess - initial_halfwidth;
    double hi = center_guess + initial_halfwidth;
    std::vector<double> xs(scan_points), ys(scan_points);
    auto rescan = [&]() {
        double step = (hi - lo) / (scan_points - 1);
        for (int i = 0; i < scan_points; ++i) {
            xs[i] = lo + i * step;
            ys[i] = logf(xs[i]);
        }
    };
    rescan();
    for (int round = 0; round < 200; ++round) {
        int imax = int(std::max_element(ys.begin(), ys.end()) - ys.begin());
        double peak = ys[imax];
        bool grow_lo = ys.front() > peak - window_drop;
        bool grow_hi = ys.back() > peak - window_drop;
        if (!grow_lo && !grow_hi) break;
        double w = hi - lo;
        if (grow_lo) lo -= w;
        if (grow_hi) hi += w;
        if (round == 199)
            throw QuadratureError("log_integrate_exp: integrand does not decay", 0.0,
                                  std::numeric_limits<double>::infinity());
        rescan();
    }
    int imax = int(std::max_element(ys.begin(), ys.end()) - ys.begin());
    double peak = ys[imax];
    // Shrink onto the mass-carrying region so a peak much narrower than the
    // requested window is resolved by the scan before the adaptive pass.
    for (int round = 0; round < 8; ++round) {
        int ilo = imax, ihi = imax;
        for (int i = 0; i < scan_points; ++i)
            if (ys[i] > peak - window_drop) {
                ilo = std::min(ilo, i);
                ihi = std::max(ihi, i);
            }
        if (ihi - ilo >= 8 || (ilo == 0 && ihi == scan_points - 1)) break;
        lo = xs[std::max(0, ilo - 1)];
        hi = xs[std::min(scan_points - 1, ihi + 1)];
        rescan();
        imax = int(std::max_element(ys.begin(), ys.end()) - ys.begin());
        peak = ys[imax];
    }
    // Parabolic refinement of the maximizer through the best grid triple.
    double argmax = xs[imax];
    if (imax > 0 && imax + 1 < scan_points) {
        double y0 = ys[imax - 1], y1 = ys[imax], y2 = ys[imax + 1];
        double denom = y0 - 2.0 * y1 + y2;
        if (denom < 0.0) {
            double step = xs[1] - xs[0];
            double off = 0.5 * step * (y0 - y2) / denom;
            if (std::fabs(off) <= step) argmax = xs[imax] + off;
            double p = logf(argmax);
            if (p > peak) peak = p;
        }
    }
    // Coarse trapezoid of the scaled integrand provides the scale for the
    // absolute tolerance handed to the adaptive pass.
    NeumaierSum trap;
    double step = xs[1] - xs[0];
    for (int i = 0; i + 1 < scan_points; ++i)
        trap.add(0.5 * step * (std::exp(ys[i] - peak) + std::exp(ys[i + 1] - peak)));
    double scale = std::max(trap.value(), std::numeric_limits<double>::min());
    auto g = [&](double u) { return std::exp(logf(u) - peak); };
    QuadratureResult q = integrate(g, lo, hi, rel_tol * scale, 257, max_evals);
    return {peak + std::log(q.value), argmax};
}

RootResult solve_bracketed(const std::function<double(double)>& f,
                           const std::function<double(double)>& df, double target,
                           double lo, double hi, double ftol, double xtol, int max_iter) {
    if (!(hi > lo)) throw DomainError("solve_bracketed: bad bracket");
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo > 0.0) == (fhi > 0.0))
        throw BracketError("solve_bracketed: no sign change over bracket");
    double x = 0.5 * (lo + hi);
    double fx = f(x) - target;
    double best_x = x, best_f = std::fabs(fx);
    long it = 1;
    for (; it <= max_iter; ++it) {
        if ((fx > 0.0) == (fhi > 0.0)) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        if (std::fabs(fx) <= ftol) break;
        if (hi - lo <= xtol * std::max(1.0, std::fabs(x))) break;
        double trial;
        double d = df ? df(x) : 0.0;
        if (std::isfinite(d) && d != 0.0) {
            trial = x - fx / d;
            if (!(trial > lo && trial < hi)) trial = 0.5 * (lo + hi);
        } else {
            trial = 0.5 * (lo + hi);
        }
        x = trial;
        fx = f(x) - target;
        if (std::fabs(fx) < best_f) {
            best_f = std::fabs(fx);
            best_x = x;
        }
    }
    if (std::fabs(fx) <= best_f) return {x, fx, it};
    return {best_x, (best_f == std::fabs(fx) ? fx : f(best_x) - target), it};
}

void expand_bracket(const std::function<double(double)>& f, double target, double& lo,
                    double& hi, int max_doublings) {
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    for (int k = 0; k < max_doublings; ++k) {
        if ((flo > 0.0) != (fhi > 0.0) || flo == 0.0 || fhi == 0.0) return;
        double w = hi - lo;
        lo -= w;
        hi += w;
        flo = f(lo) - target;
        fhi = f(hi) - target;
    }
    if ((flo > 0.0) != (fhi > 0.0) || flo == 0.0 || fhi == 0.0) return;
    throw BracketError("expand_bracket: no sign change after doubling out");
}

double fit_loglog_slope(std::span<const long> ns, std::span<const double> ds,
                        double floor) {
    if (ns.size() != ds.size() || ns.empty())
        throw DomainError("fit_loglog_slope: mismatched or empty inputs");
    bool all_floor = true;
    for (double d : ds)
        if (d > floor) all_floor = false;
    if (all_floor) return 0.0;
    size_t k = ns.size();
    std::vector<double> x(k), y(k);
    for (size_t i = 0; i < k; ++i) {
        x[i] = std::log(double(ns[i]));
        y[i] = std::log(std::max(ds[i], floor));
    }
    double xbar = 0.0, ybar = 0.0;
    for (size_t i = 0; i < k; ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= double(k);
    ybar /= double(k);
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < k; ++i) {
        sxy += (x[i] - xbar) * (y[i] - ybar);
        sxx += (x[i] - xbar) * (x[i] - xbar);
    }
    if (sxx == 0.0) throw DomainError("fit_loglog_slope: degenerate grid");
    return sxy / sxx;
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace mflab
