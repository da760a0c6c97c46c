#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "mflab/deviations.hpp"
#include "oracles.hpp"

using namespace mflab;

namespace {

SystemDescriptor golden_sys() {
    return torus_rotation(golden_rotation, FieldFunction::identity());
}

double torus_cgf_naive(double t) {
    if (t == 0.0) return 0.0;
    return t / std::tanh(t) - 1.0;
}

double binary_entropy_conjugate(double y) {
    double a = (1.0 + y) / 2.0, b = (1.0 - y) / 2.0;
    double va = a > 0.0 ? a * std::log(1.0 + y) : 0.0;
    double vb = b > 0.0 ? b * std::log(1.0 - y) : 0.0;
    return va + vb;
}

}  // namespace

TEST_CASE("orbit family reproduces single orbits at each size") {
    TrajectoryProvider provider = orbit_family(golden_sys(), 0.3);
    FieldTrajectory t5 = provider(5);
    REQUIRE(t5.n() == 5);
    FieldTrajectory direct = orbit(golden_sys(), 0.3, 5);
    for (size_t i = 0; i < 5; ++i) CHECK(t5.p[i] == direct.p[i]);
}

TEST_CASE("large-deviation rate: golden rotation below the transition") {
    SystemDescriptor sys = golden_sys();
    CHECK(ldp_rate_magnetization(sys, 1.0, 0.0) <= 1e-12);
    CHECK(ldp_rate_magnetization(sys, 1.0, 0.5) ==
          doctest::Approx(0.07031472791576).epsilon(1e-9));
    CHECK(std::fabs(ldp_rate_magnetization(sys, 1.0, -0.5) -
                    ldp_rate_magnetization(sys, 1.0, 0.5)) < 1e-10);
    CHECK(std::isinf(ldp_rate_magnetization(sys, 1.0, 1.0001)));
    CHECK(std::isinf(ldp_rate_magnetization(sys, 1.0, -2.0)));
    for (int i = 0; i <= 20; ++i) {
        double s = -1.0 + 2.0 * double(i) / 20.0;
        CHECK(ldp_rate_magnetization(sys, 1.0, s) >= 0.0);
    }
    // dense-scan oracle over the naive closed-form conjugate
    auto F = [&](double z) {
        return oracle::legendre_sup_dense(torus_cgf_naive, z) - 0.5 * z * z;
    };
    double fmin = oracle::grid_minimize(F, -1.0, 1.0, 2001).second;
    for (double s : {-0.9, -0.3, 0.25, 0.7}) {
        CHECK(ldp_rate_magnetization(sys, 1.0, s) ==
              doctest::Approx(F(s) - fmin).epsilon(1e-6));
    }
}

TEST_CASE("large-deviation rate vanishes exactly on the minimizer set") {
    SystemDescriptor sys = golden_sys();
    for (double bj : {1.0, 2.0}) {
        for (const auto& p : find_and_classify_minima(sys, bj))
            if (p.global_min) CHECK(ldp_rate_magnetization(sys, bj, p.m) <= 1e-9);
    }
    SystemDescriptor cf = constant_field(0.5);
    auto profiles = find_and_classify_minima(cf, 2.0);
    for (const auto& p : profiles)
        if (p.global_min) CHECK(ldp_rate_magnetization(cf, 2.0, p.m) <= 1e-9);
    // between the two wells the rate is strictly positive
    double mid = ldp_rate_magnetization(cf, 2.0, 0.0);
    auto F0 = [&](double z) { return binary_entropy_conjugate(z) - z * z; };
    double fmin0 = oracle::grid_minimize(F0, -1.0, 1.0, 4001).second;
    CHECK(mid == doctest::Approx(-fmin0).epsilon(1e-8));
    CHECK(mid > 0.3);
}

TEST_CASE("moderate-deviation rate from classified profiles") {
    SystemDescriptor sys = golden_sys();
    auto quartic = find_and_classify_minima(sys, 1.5).front();
    RateFunctionSpec spec = mdp_rate_magnetization(quartic, 1.5);
    CHECK(spec.kind == RateFunctionSpec::Kind::MagnetizationMdp);
    CHECK(spec.two_k == 4);
    CHECK(spec.rate(1.0) == doctest::Approx(0.1125).epsilon(1e-9));
    CHECK(spec.rate(2.0) == doctest::Approx(1.8).epsilon(1e-8));
    CHECK(spec.rate(-1.0) == doctest::Approx(0.1125).epsilon(1e-9));
    CHECK(spec.alpha_lo == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(spec.alpha_hi == 1.0);
    CHECK(!spec.speed_description.empty());

    auto quadratic = find_and_classify_minima(sys, 1.0).front();
    RateFunctionSpec g = mdp_rate_magnetization(quadratic, 1.0);
    CHECK(g.sigma_sq == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(g.rate(1.0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(g.speed_exponent(0.75) == doctest::Approx(0.5).epsilon(1e-14));

    MinimumProfile bad{0.0, 2, 1.2, 0.0, true, {}};
    CHECK_THROWS_AS(mdp_rate_magnetization(bad, 1.0), DegenerateVarianceError);
    MinimumProfile odd{0.0, 3, 1.0, 0.0, true, {}};
    CHECK_THROWS_AS(mdp_rate_magnetization(odd, 1.0), DomainError);
}

TEST_CASE("limit density: normalization closed form versus quadrature") {
    CHECK(clt_normalization(2, 1.0) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-12));
    double c4 = clt_normalization(4, 2.7);
    CHECK(c4 == doctest::Approx(0.31947512683633555).epsilon(1e-12));
    double mass = oracle::romberg(
        [](double u) { return std::exp(-2.7 * u * u * u * u / 24.0); }, -8.0, 8.0, 18);
    CHECK(c4 == doctest::Approx(1.0 / mass).epsilon(1e-9));

    // density: value at zero is the normalization; total mass is one
    CHECK(clt_limit_density(4, 2.7, 1.5, 0.0) == doctest::Approx(c4).epsilon(1e-13));
    double total = oracle::romberg(
        [](double s) { return clt_limit_density(4, 2.7, 1.5, s); }, -8.0, 8.0, 18);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(clt_limit_density(2, 1.5, 1.0, 0.0), DegenerateVarianceError);
    CHECK_THROWS_AS(clt_normalization(3, 1.0), DomainError);
    CHECK_THROWS_AS(clt_normalization(2, 0.0), DomainError);
}

TEST_CASE("quadratic-minimum density ratio reproduces the deviation rate") {
    SystemDescriptor sys = golden_sys();
    auto prof = find_and_classify_minima(sys, 1.0).front();
    RateFunctionSpec spec = mdp_rate_magnetization(prof, 1.0);
    for (double s : {0.4, 1.0, 1.9}) {
        double ratio = -std::log(clt_limit_density(2, prof.lambda, 1.0, s) /
                                 clt_limit_density(2, prof.lambda, 1.0, 0.0));
        CHECK(ratio == doctest::Approx(spec.rate(s)).epsilon(1e-11));
    }
}

TEST_CASE("scaling check: zero offset is exact, errors shrink with n") {
    SystemDescriptor sys = golden_sys();
    auto prof = find_and_classify_minima(sys, 1.5).front();
    TrajectoryProvider provider = orbit_family(sys, 0.3);

    std::vector<long> ns = {1000};
    std::vector<double> zero = {0.0};
    ScalingCheckTable at0 = scaling_limit_check(provider, ns, 1.5, prof, 0.8, zero);
    CHECK(at0.rows[0].sup_error <= 1e-12);
    CHECK(at0.rows[0].lower_bound_ok);

    std::vector<long> grid = {1000, 10000};
    std::vector<double> ss;
    for (int i = 0; i <= 8; ++i) ss.push_back(-2.0 + 0.5 * i);
    ScalingCheckTable tab = scaling_limit_check(provider, grid, 1.5, prof, 0.8, ss);
    REQUIRE(tab.rows.size() == 2);
    CHECK(tab.rows[1].sup_error < tab.rows[0].sup_error);
    CHECK(tab.alpha == 0.8);

    CHECK_THROWS_AS(scaling_limit_check(provider, grid, 1.5, prof, 0.6, ss), DomainError);
}

TEST_CASE("scaling check: classic mean-field model at a million sites") {
    SystemDescriptor cf = constant_field(0.5);
    auto prof = find_and_classify_minima(cf, 1.0).front();
    std::vector<long> ns = {1000000};
    std::vector<double> ss = {1.0};
    ScalingCheckTable tab =
        scaling_limit_check(orbit_family(cf, 0.0), ns, 1.0, prof, 0.8, ss);
    CHECK(tab.rows[0].sup_error < 1e-2);
    CHECK(tab.rows[0].lower_bound_ok);
}

TEST_CASE("laplace probe reproduces its three closed-form examples") {
    std::vector<double> gammas = {100.0, 1000.0, 10000.0};

    LaplaceCheckResult peak = laplace_limit_check(
        [](double x) { return -x * x; }, 1.0, gammas);
    CHECK(peak.max_f == 0.0);
    CHECK(peak.values.back() ==
          doctest::Approx(-0.5 * std::log(1e4 / M_PI) / 1e4).epsilon(1e-6));
    CHECK(peak.errors.back() < 1e-3);

    LaplaceCheckResult edge = laplace_limit_check(
        [](double x) { return x; }, 2.0, gammas);
    CHECK(edge.max_f == 2.0);
    CHECK(edge.values.back() ==
          doctest::Approx(2.0 - std::log(1e4) / 1e4).epsilon(1e-9));
    CHECK(edge.errors.back() < 1e-3);

    LaplaceCheckResult flat = laplace_limit_check(
        [](double) { return 0.7; }, 1.0, gammas);
    CHECK(flat.values.back() ==
          doctest::Approx(0.7 + std::log(2.0) / 1e4).epsilon(1e-9));

    // errors shrink as gamma grows in all three cases
    for (const auto& res : {peak, edge, flat})
        for (size_t i = 1; i < res.errors.size(); ++i)
            CHECK(res.errors[i] <= res.errors[i - 1] + 1e-12);

    std::vector<double> bad = {100.0, 50.0};
    CHECK_THROWS_AS(laplace_limit_check([](double x) { return x; }, 1.0, bad),
                    DomainError);
    CHECK_THROWS_AS(laplace_limit_check([](double x) { return x; }, 0.0, gammas),
                    DomainError);
}

TEST_CASE("walk tail verdict approaches the quadratic rate from above") {
    SystemDescriptor sys = golden_sys();
    std::vector<long> grid = {1000, 4000};
    DeviationVerdict v = verify_walk_mdp(sys, 0.0, 0.75, 1.0, grid);
    CHECK(v.target == doctest::Approx(0.75).epsilon(1e-10));
    REQUIRE(v.r.size() == 2);
    std::vector<double> err = v.errors();
    CHECK(err[0] == doctest::Approx(0.0871).epsilon(2e-2));
    CHECK(err[1] < err[0]);
    CHECK(v.r[1] > v.target);
    CHECK(v.trend);

    std::ostringstream os;
    v.write_csv(os);
    CHECK(os.str().find("n,speed,log_prob,r_n,err\n") == 0);

    CHECK_THROWS_AS(verify_walk_mdp(sys, 0.0, 0.5, 1.0, grid), DomainError);
    CHECK_THROWS_AS(verify_walk_mdp(sys, 0.0, 0.75, 0.0, grid), DomainError);
    std::vector<long> too_big = {50000};
    CHECK_THROWS_AS(verify_walk_mdp(sys, 0.0, 0.75, 1.0, too_big), DomainError);
    std::vector<long> small = {100};
    CHECK_THROWS_AS(verify_walk_mdp(constant_field(0.5), 0.0, 0.75, 5.0, small),
                    EventEmptyError);
}

TEST_CASE("exact fair-walk tail at ten thousand steps") {
    std::vector<long> grid = {10000};
    DeviationVerdict v = verify_walk_mdp(constant_field(0.5), 0.0, 0.75, 1.0, grid);
    // the scaled tail sits a prefactor above the limiting rate 1/2
    CHECK(v.r[0] == doctest::Approx(0.5321366313574319).epsilon(1e-9));
}

TEST_CASE("magnetization tail verdict: gaussian regime with and without window") {
    SystemDescriptor sys = golden_sys();
    auto prof = find_and_classify_minima(sys, 1.0).front();
    TrajectoryProvider provider = orbit_family(sys, 0.0);
    std::vector<long> grid = {1000, 4000};

    DeviationVerdict v = verify_magnetization_mdp(provider, 1.0, 1.0, grid, prof, 0.75, 1.0);
    CHECK(v.target == doctest::Approx(0.25).epsilon(1e-10));
    std::vector<double> err = v.errors();
    CHECK(err[0] == doctest::Approx(0.0757).epsilon(2e-2));
    CHECK(err[1] < err[0]);
    CHECK(!v.window.has_value());

    DeviationVerdict w =
        verify_magnetization_mdp(provider, 1.0, 1.0, grid, prof, 0.75, 1.0, 0.3);
    REQUIRE(w.window.has_value());
    CHECK(*w.window == 0.3);
    // conditioning on a law-of-large-numbers window barely moves the tail
    CHECK(std::fabs(w.r[1] - v.r[1]) < 1e-6);
}

TEST_CASE("magnetization tail verdict: degenerate window and event errors") {
    SystemDescriptor sys = golden_sys();
    auto prof = find_and_classify_minima(sys, 1.0).front();
    TrajectoryProvider provider = orbit_family(sys, 0.0);

    // odd n and a sub-lattice window: no atoms inside
    std::vector<long> odd = {999};
    CHECK_THROWS_AS(
        verify_magnetization_mdp(provider, 1.0, 1.0, odd, prof, 0.75, 1.0, 1e-4),
        WindowEmptyError);
    // even n keeps the zero atom in the window but the tail event misses it
    std::vector<long> even = {1000};
    CHECK_THROWS_AS(
        verify_magnetization_mdp(provider, 1.0, 1.0, even, prof, 0.75, 1.0, 1e-4),
        EventEmptyError);

    std::vector<long> grid = {500};
    CHECK_THROWS_AS(
        verify_magnetization_mdp(provider, 1.0, 1.0, grid, prof, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(
        verify_magnetization_mdp(provider, 1.0, 1.0, grid, prof, 0.75, -1.0), DomainError);
    CHECK_THROWS_AS(
        verify_magnetization_mdp(provider, 1.0, 1.0, grid, prof, 0.75, 1.0, -0.1),
        DomainError);
}

TEST_CASE("degenerate-minimum verdict runs at its slow speed") {
    SystemDescriptor sys = golden_sys();
    auto prof = find_and_classify_minima(sys, 1.5).front();
    TrajectoryProvider provider = orbit_family(sys, 0.0);
    std::vector<long> grid = {500, 1000};
    DeviationVerdict v =
        verify_magnetization_mdp(provider, 1.5, 1.0, grid, prof, 0.8, 1.0, 0.3);
    CHECK(v.target == doctest::Approx(0.1125).epsilon(1e-9));
    for (double r : v.r) CHECK(std::isfinite(r));
    // speed n^{0.2}
    CHECK(v.speed[1] == doctest::Approx(std::pow(1000.0, 0.2)).epsilon(1e-12));
}
