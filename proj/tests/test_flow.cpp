#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geotomo/geodesic_flow.hpp"
#include "geotomo/operators.hpp"
#include "geotomo/ray_transform.hpp"

using namespace geotomo;

namespace {

SurfacePtr euclid(int n = 49, int nt = 16) {
    IsothermalSurface::Params p;
    p.n = n;
    p.n_theta = nt;
    p.half_width = 1.1;
    p.r0 = 1.0;
    return IsothermalSurface::euclidean(p);
}

SurfacePtr curved(double K, double r0, int n = 49, int nt = 16) {
    IsothermalSurface::Params p;
    p.n = n;
    p.n_theta = nt;
    p.half_width = 1.1;
    p.r0 = r0;
    return IsothermalSurface::constant_curvature(K, p);
}

}  // namespace

TEST_CASE("straight lines on the flat disk") {
    auto s = euclid();
    GeodesicTracer tr(*s);
    PhaseState st;
    st.x = 0.0;
    st.y = 0.0;
    st.theta = 0.0;
    PhaseState out = tr.flow(st, 0.5);
    CHECK(out.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.y == doctest::Approx(0.0));
    CHECK(out.theta == doctest::Approx(0.0));

    st.x = -0.5;
    out = tr.flow(st, 1.0);
    CHECK(out.x == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("flow reversibility on the hyperbolic family") {
    auto s = curved(-1.0, 0.9);
    GeodesicTracer tr(*s);
    PhaseState st;
    st.x = 0.2;
    st.y = -0.1;
    st.theta = 1.1;
    PhaseState fwd = tr.flow(st, 0.7);
    PhaseState rev;
    rev.x = fwd.x;
    rev.y = fwd.y;
    rev.theta = wrap_angle(fwd.theta + kPi);
    PhaseState back = tr.flow(rev, 0.7);
    CHECK(std::abs(back.x - st.x) < 1e-9);
    CHECK(std::abs(back.y - st.y) < 1e-9);
    CHECK(std::abs(wrap_angle(back.theta + kPi) - st.theta) < 1e-9);
}

TEST_CASE("euclidean exit times") {
    auto s = euclid();
    GeodesicTracer tr(*s);
    CHECK(tr.exit_time(1.0, 0.0, kPi) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(tr.exit_time(1.0, 0.0, kPi + kPi / 3.0) == doctest::Approx(1.0).epsilon(1e-8));
    // outflow boundary state: instant exit
    CHECK(tr.exit_time(1.0, 0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(tr.exit_time(1.05, 0.0, 0.0), DomainError);

    // chord-length oracle 2 cos(alpha) across incidence angles
    for (double a : {-1.2, -0.5, 0.0, 0.4, 1.3}) {
        double tau = tr.exit_time(std::cos(0.7), std::sin(0.7), 0.7 + kPi + a);
        CHECK(tau == doctest::Approx(2.0 * std::cos(a)).epsilon(1e-8));
    }
}

TEST_CASE("exit time decreases toward tangency on the flat disk") {
    auto s = euclid();
    GeodesicTracer tr(*s);
    double prev = 3.0;
    for (double a = 0.0; a < kPi / 2 - 0.05; a += 0.1) {
        double tau = tr.exit_time(1.0, 0.0, kPi + a);
        CHECK(tau < prev);
        prev = tau;
    }
    CHECK(prev < 0.25);  // tau -> 0 at grazing incidence
}

TEST_CASE("RK4 exit positions converge at fourth order") {
    auto s = curved(1.0, 0.8);
    double errs[3];
    int idx = 0;
    for (double ht : {0.16, 0.08, 0.04}) {
        GeodesicTracer tr(*s, ht);
        GeodesicTracer ref(*s, ht / 2.0);
        double worst = 0.0;
        for (int t = 0; t < 12; ++t) {
            double b = kTwoPi * t / 12.0;
            RayEnd e1 = tr.trace_to_exit(0.8 * std::cos(b), 0.8 * std::sin(b), b + kPi + 0.3);
            RayEnd e2 = ref.trace_to_exit(0.8 * std::cos(b), 0.8 * std::sin(b), b + kPi + 0.3);
            worst = std::max(worst, std::hypot(e1.x - e2.x, e1.y - e2.y));
        }
        errs[idx++] = worst;
    }
    double r1 = std::log2(errs[0] / errs[1]);
    double r2 = std::log2(errs[1] / errs[2]);
    CHECK(r1 >= 3.8);
    CHECK(r2 >= 3.8);
}

TEST_CASE("nontrapping violations surface as errors") {
    // equator inside the disk: rays near it never leave
    auto s = curved(4.5, 0.99, 17, 8);
    GeodesicTracer tr(*s);
    CHECK_THROWS_AS(tr.exit_time(0.9428, 0.0, kPi / 2.0), NontrappingError);
    // and propagate out of parallel machinery
    FanBeamGrid fan = fan_beam_grid(*s, 8, 4);
    CHECK_THROWS_AS(InfluxMap(*s, fan), NontrappingError);
}

TEST_CASE("fan beam grid") {
    auto s = euclid();
    FanBeamGrid g4 = fan_beam_grid(*s, 4, 1);
    CHECK(g4.size() == 4);
    CHECK(g4.alpha(0) == doctest::Approx(0.0));  // single Gauss node at normal incidence

    FanBeamGrid g = fan_beam_grid(*s, 24, 8);
    double wsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        wsum += g.weight(i);
        PhaseState ps = g.sample_state(i);
        // influx condition <v, nu> <= 0
        double dot = std::cos(ps.theta) * ps.x + std::sin(ps.theta) * ps.y;
        CHECK(dot <= 1e-12);
        CHECK(g.weight(i) > 0.0);
    }
    CHECK(wsum == doctest::Approx(kTwoPi * kPi).epsilon(1e-12));
}

TEST_CASE("fan beam stencil interpolates bilinearly") {
    auto s = euclid();
    FanBeamGrid g = fan_beam_grid(*s, 16, 6);
    // a function linear in beta spacing interpolates exactly between nodes
    std::vector<cplx> vals(g.size());
    for (int ib = 0; ib < 16; ++ib)
        for (int ia = 0; ia < 6; ++ia)
            vals[g.index(ib, ia)] = std::sin(g.beta(ib)) + 0.2 * g.alpha(ia);
    std::size_t idx[4];
    double w[4];
    double beta = 0.5 * (g.beta(3) + g.beta(4));
    double alpha = g.alpha(2);
    g.stencil(beta, alpha, idx, w);
    cplx got = 0.0;
    for (int q = 0; q < 4; ++q) got += w[q] * vals[idx[q]];
    double want = 0.5 * (std::sin(g.beta(3)) + std::sin(g.beta(4))) + 0.2 * alpha;
    CHECK(got.real() == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("invariant extension of constants and first-integral property") {
    auto s = curved(1.0, 0.8, 49, 32);
    FanBeamGrid fan = fan_beam_grid(*s, 48, 16);
    InfluxMap map(*s, fan);

    std::vector<cplx> ones(fan.size(), cplx(1.0));
    SmFunction ext = map.extend(ones);
    for (std::size_t nd : s->grid().inside_nodes()) {
        CHECK(std::abs(ext.at(0, nd) - 1.0) < 1e-12);
    }

    // smooth data: X h_psi vanishes to grid tolerance
    std::vector<cplx> smooth(fan.size());
    for (int ib = 0; ib < fan.n_beta(); ++ib)
        for (int ia = 0; ia < fan.n_alpha(); ++ia)
            smooth[fan.index(ib, ia)] =
                std::cos(fan.beta(ib)) + 0.5 * std::sin(fan.alpha(ia));
    SmFunction hext = map.extend_eval([&](double beta, double alpha) {
        return cplx(std::cos(beta) + 0.5 * std::sin(alpha));
    });
    SmFunction xh = apply_frame_field(FrameField::X, *s, hext);
    double rel = l2_norm(*s, xh) / l2_norm(*s, hext);
    CHECK(rel < 0.08);
}

TEST_CASE("extension composed with the forward transform") {
    // h = I f extends to the full-chord integral through each phase point
    auto s = euclid(49, 32);
    FanBeamGrid fan = fan_beam_grid(*s, 96, 48);
    auto f = [](double x, double y, double) {
        return cplx(std::exp(-3.0 * (x * x + y * y)));
    };
    RayData data = forward_transform(*s, f, fan);
    InfluxMap map(*s, fan);
    SmFunction ext = map.extend(data.values);

    GeodesicTracer tr(*s);
    const Grid& g = s->grid();
    for (auto [i, j] : {std::pair{24, 24}, {30, 20}, {18, 28}}) {
        double x = g.x(i), y = g.y(j);
        for (double th : {0.3, 2.1}) {
            cplx fwd = 0.0, bwd = 0.0;
            tr.integrate(x, y, th, f, fwd);
            tr.integrate(x, y, th + kPi, f, bwd);
            cplx full = fwd + bwd;
            CHECK(std::abs(ext.value_at_node(i, j, th) - full) < 1e-2);
        }
    }
}
