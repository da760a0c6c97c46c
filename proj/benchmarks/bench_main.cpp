// Hot paths: the O(n^2) law tables, the free-energy evaluations behind the
// classifier, and the little numeric kernels everything else leans on.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mflab/deviations.hpp"
#include "mflab/dynsys.hpp"
#include "mflab/gibbs.hpp"
#include "mflab/landscape.hpp"
#include "mflab/walk.hpp"

using namespace mflab;

namespace {

SystemDescriptor rotation_sys() {
    return torus_rotation(golden_rotation, FieldFunction::identity());
}

void BM_WalkDistribution(benchmark::State& state) {
    FieldTrajectory traj = orbit(rotation_sys(), 0.0, state.range(0));
    for (auto _ : state) {
        LatticeDistribution d = walk_distribution(traj);
        benchmark::DoNotOptimize(d.log_masses().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WalkDistribution)->Range(256, 4096)->Complexity(benchmark::oNSquared);

void BM_MagnetizationDistribution(benchmark::State& state) {
    long n = state.range(0);
    FieldTrajectory traj = orbit(rotation_sys(), 0.0, n);
    ModelParams params(1.0, 1.0, n);
    for (auto _ : state) {
        LatticeDistribution d = magnetization_distribution(traj, params);
        benchmark::DoNotOptimize(d.log_masses().data());
    }
}
BENCHMARK(BM_MagnetizationDistribution)->Arg(1024);

void BM_Logsumexp(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::vector<double> xs(size_t(state.range(0)));
    for (double& x : xs) x = -700.0 + 1400.0 * uniform01(rng);
    for (auto _ : state) benchmark::DoNotOptimize(logsumexp(xs));
}
BENCHMARK(BM_Logsumexp)->Arg(1024);

void BM_EvalGn(benchmark::State& state) {
    FieldTrajectory traj = orbit(rotation_sys(), 0.3, state.range(0));
    double s = 0.4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_Gn(traj, 1.5, s, 0));
        s = -s;
    }
}
BENCHMARK(BM_EvalGn)->Arg(10000)->Arg(100000);

void BM_EvalGQuadrature(benchmark::State& state) {
    // an unlabeled field forces the quadrature path the closed form skips
    SystemDescriptor sys = torus_rotation(
        golden_rotation, FieldFunction{"identity-by-hand", [](double y) { return y; }});
    for (auto _ : state) benchmark::DoNotOptimize(eval_G(sys, 1.5, 0.4, 0));
}
BENCHMARK(BM_EvalGQuadrature);

void BM_FieldCumulantOrder6(benchmark::State& state) {
    double s = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(field_cumulant(0.37, s, 6));
        s = -s;
    }
}
BENCHMARK(BM_FieldCumulantOrder6);

void BM_ClassifyMinima(benchmark::State& state) {
    SystemDescriptor sys = rotation_sys();
    for (auto _ : state) {
        auto profiles = find_and_classify_minima(sys, 1.5);
        benchmark::DoNotOptimize(profiles.data());
    }
}
BENCHMARK(BM_ClassifyMinima);

void BM_LegendreTransform(benchmark::State& state) {
    ConvexFunction cgf = walk_cgf_function(rotation_sys());
    double y = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(legendre_transform(cgf, y));
        y = -y;
    }
}
BENCHMARK(BM_LegendreTransform);

void BM_LdpRate(benchmark::State& state) {
    SystemDescriptor sys = rotation_sys();
    double s = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ldp_rate_magnetization(sys, 1.0, s));
        s = -s;
    }
}
BENCHMARK(BM_LdpRate);

}  // namespace

BENCHMARK_MAIN();
