#include <benchmark/benchmark.h>

#include "geotomo/identities.hpp"
#include "geotomo/inversion.hpp"
#include "geotomo/operators.hpp"

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

static void BM_ApplyGeodesicField(benchmark::State& state) {
    auto s = cap(int(state.range(0)));
    Rng rng(1);
    SmFunction u = random_sm_phantom(*s, 4, rng, false);
    for (auto _ : state) {
        SmFunction xu = apply_frame_field(FrameField::X, *s, u);
        benchmark::DoNotOptimize(xu.mode(0));
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(s->grid().nodes()) * 9);
}
BENCHMARK(BM_ApplyGeodesicField)->Arg(65)->Arg(129)->Arg(257);

static void BM_InnerProduct(benchmark::State& state) {
    auto s = cap(int(state.range(0)));
    Rng rng(2);
    SmFunction u = random_sm_phantom(*s, 4, rng, false);
    SmFunction v = random_sm_phantom(*s, 4, rng, false);
    for (auto _ : state) {
        cplx ip = l2_inner_product(*s, u, v);
        benchmark::DoNotOptimize(ip);
    }
}
BENCHMARK(BM_InnerProduct)->Arg(65)->Arg(129)->Arg(257);

static void BM_PestovResidual(benchmark::State& state) {
    auto s = cap(int(state.range(0)));
    Rng rng(3);
    SmFunction u = random_sm_phantom(*s, 3, rng, false);
    for (auto _ : state) {
        ResidualReport rep = pestov_residual(*s, u);
        benchmark::DoNotOptimize(rep.relative);
    }
}
BENCHMARK(BM_PestovResidual)->Arg(65)->Arg(129);

static void BM_SolenoidalDecompose(benchmark::State& state) {
    auto s = cap(49);
    Rng rng(4);
    SymmetricTensor f = random_tensor_phantom(*s, 2, rng);
    for (auto _ : state) {
        DecompositionResult dec = solenoidal_decompose(*s, f);
        benchmark::DoNotOptimize(dec.iterations);
    }
}
BENCHMARK(BM_SolenoidalDecompose)->Unit(benchmark::kMillisecond);
