#include <benchmark/benchmark.h>

#include "geotomo/inversion.hpp"
#include "geotomo/ray_transform.hpp"

using namespace geotomo;

namespace {

SurfacePtr cap(int n) {
    IsothermalSurface::Params p;
    p.n = n;
    p.n_theta = 64;
    p.half_width = 1.1;
    p.r0 = 0.8;
    return IsothermalSurface::constant_curvature(1.0, p);
}

}  // namespace

static void BM_ExitTime(benchmark::State& state) {
    auto s = cap(65);
    GeodesicTracer tr(*s);
    int t = 0;
    for (auto _ : state) {
        double b = kTwoPi * (t++ % 64) / 64.0;
        double tau = tr.exit_time(0.8 * std::cos(b), 0.8 * std::sin(b), b + kPi + 0.3);
        benchmark::DoNotOptimize(tau);
    }
}
BENCHMARK(BM_ExitTime);

static void BM_ForwardTransform(benchmark::State& state) {
    auto s = cap(65);
    Rng rng(5);
    SmFunction f = random_sm_phantom(*s, 2, rng, true, Parity::Even);
    FanBeamGrid fan = fan_beam_grid(*s, int(state.range(0)), 32);
    for (auto _ : state) {
        RayData data = forward_transform(*s, f, fan);
        benchmark::DoNotOptimize(data.values.data());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(fan.size()));
    state.SetLabel("rays");
}
BENCHMARK(BM_ForwardTransform)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

static void BM_TransportSolve(benchmark::State& state) {
    auto s = cap(int(state.range(0)));
    Rng rng(6);
    SmFunction f = random_sm_phantom(*s, 2, rng, true, Parity::Even);
    for (auto _ : state) {
        SmFunction u = transport_solve(*s, f);
        benchmark::DoNotOptimize(u.mode(0));
    }
}
BENCHMARK(BM_TransportSolve)->Arg(33)->Arg(49)->Unit(benchmark::kMillisecond);

static void BM_RayBundleApply(benchmark::State& state) {
    auto s = cap(49);
    FanBeamGrid fan = fan_beam_grid(*s, 192, 64);
    RayBundle bundle(*s, fan, 2, 0.04);
    CplxVec x(bundle.unknowns(), cplx(0.3, -0.1)), y;
    for (auto _ : state) {
        bundle.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_RayBundleApply)->Unit(benchmark::kMillisecond);
