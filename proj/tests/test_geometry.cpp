#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geotomo/grid.hpp"
#include "geotomo/surface.hpp"
#include "geotomo/util.hpp"

using namespace geotomo;

namespace {

IsothermalSurface::Params params(int n, double r0, int nt = 16) {
    IsothermalSurface::Params p;
    p.n = n;
    p.n_theta = nt;
    p.half_width = 1.1;
    p.r0 = r0;
    return p;
}

// independent curvature oracle: second differences of lambda
double curvature_fd(const IsothermalSurface& s, double x, double y, double h) {
    auto l = [&](double a, double b) { return s.lambda(a, b); };
    double lap = (l(x + h, y) + l(x - h, y) + l(x, y + h) + l(x, y - h) - 4.0 * l(x, y)) / (h * h);
    return -std::exp(-2.0 * l(x, y)) * lap;
}

}  // namespace

TEST_CASE("disk cell overlap sums to the disk area") {
    Grid g(57, 1.1, 0.83);
    double total = 0.0;
    for (double w : g.weights()) total += w;
    CHECK(total == doctest::Approx(kPi * 0.83 * 0.83).epsilon(1e-12));
}

TEST_CASE("curvature of the built-in families") {
    auto flat = IsothermalSurface::euclidean(params(33, 1.0));
    CHECK(flat->gaussian_curvature(0.3, -0.4) == doctest::Approx(0.0));

    auto cap = IsothermalSurface::constant_curvature(1.0, params(33, 0.8));
    CHECK(cap->gaussian_curvature(0.2, 0.1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cap->gaussian_curvature(0.0, 0.0) ==
          doctest::Approx(curvature_fd(*cap, 0.0, 0.0, 1e-3)).epsilon(1e-5));

    auto hyp = IsothermalSurface::constant_curvature(-1.0, params(33, 0.9));
    CHECK(hyp->gaussian_curvature(-0.5, 0.3) == doctest::Approx(-1.0).epsilon(1e-12));

    // lambda = x is harmonic, so K = 0; confirmed against the oracle
    ScalarField lin = ScalarField::from_expression(parse_expression("x"));
    IsothermalSurface s(lin, params(33, 0.9));
    CHECK(s.gaussian_curvature(0.2, 0.4) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(curvature_fd(s, 0.2, 0.4, 1e-3)) < 1e-6);

    CHECK_THROWS_AS(s.gaussian_curvature(0.95, 0.4), DomainError);
}

TEST_CASE("curvature field matches the oracle at second order") {
    for (double K : {1.0, -1.0}) {
        auto s = IsothermalSurface::constant_curvature(K, params(33, 0.8));
        double e_coarse = 0.0, e_fine = 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            double h = pass == 0 ? 2e-2 : 1e-2;
            double worst = 0.0;
            for (double x : {-0.4, 0.0, 0.3})
                for (double y : {-0.2, 0.5})
                    worst = std::max(
                        worst, std::abs(curvature_fd(*s, x, y, h) - s->gaussian_curvature(x, y)));
            (pass == 0 ? e_coarse : e_fine) = worst;
        }
        double rate = std::log2(e_coarse / e_fine);
        CHECK(rate >= 1.8);
    }
}

TEST_CASE("area form primitive") {
    auto flat = IsothermalSurface::euclidean(params(33, 1.0));
    AreaFormPrimitive phi = area_form_primitive(*flat);
    CHECK(phi.rho(0.3, 0.2) == doctest::Approx(0.5).epsilon(1e-12));
    double p1, p2;
    phi.components(0.0, 0.0, p1, p2);
    CHECK(p1 == 0.0);
    CHECK(p2 == 0.0);
    phi.components(0.4, -0.3, p1, p2);
    CHECK(p1 == doctest::Approx(0.5 * 0.3));
    CHECK(p2 == doctest::Approx(0.5 * 0.4));

    // d(phi) = e^{2 lambda} dx dy on the curved family, via numerical d
    auto cap = IsothermalSurface::constant_curvature(1.0, params(33, 0.8));
    AreaFormPrimitive phic = area_form_primitive(*cap);
    double worst = 0.0;
    double h = 1e-4;
    for (double x : {-0.3, 0.1, 0.45})
        for (double y : {-0.5, 0.0, 0.25}) {
            double a1p, a2p, a1m, a2m, b1p, b2p, b1m, b2m;
            phic.components(x + h, y, a1p, a2p);
            phic.components(x - h, y, a1m, a2m);
            phic.components(x, y + h, b1p, b2p);
            phic.components(x, y - h, b1m, b2m);
            double dA2_dx = (a2p - a2m) / (2 * h);
            double dA1_dy = (b1p - b1m) / (2 * h);
            double want = std::exp(2.0 * cap->lambda(x, y));
            worst = std::max(worst, std::abs(dA2_dx - dA1_dy - want));
        }
    CHECK(worst <= 1e-7);
}

TEST_CASE("boundary curve and convexity") {
    auto cap = IsothermalSurface::constant_curvature(1.0, params(33, 0.8));
    // closed form for this family: kg = 1/r0 - r0/4
    double want = 1.0 / 0.8 - 0.8 / 4.0;
    for (double kg : cap->boundary().kg) CHECK(kg == doctest::Approx(want).epsilon(1e-10));
    CHECK(cap->boundary().strictly_convex);

    // metric-unit outer normal: nu = e^{-lambda} (cos b, sin b), |nu|_g = 1
    double b = 1.2;
    double x, y;
    cap->boundary().point(b, x, y);
    double nu1 = std::exp(-cap->lambda(x, y)) * std::cos(b);
    double nu2 = std::exp(-cap->lambda(x, y)) * std::sin(b);
    double glen = std::exp(2.0 * cap->lambda(x, y)) * (nu1 * nu1 + nu2 * nu2);
    CHECK(glen == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simplicity certificates for the three acceptance surfaces") {
    auto flat = IsothermalSurface::euclidean(params(33, 1.0));
    SimplicityReport r1 = certify_simple(*flat, 32, 16);
    CHECK(r1.convex);
    CHECK(r1.nontrapping);
    CHECK(r1.no_conjugate_points);

    auto hyp = IsothermalSurface::constant_curvature(-1.0, params(33, 0.9));
    SimplicityReport r2 = certify_simple(*hyp, 32, 16);
    CHECK(r2.simple());
    CHECK(r2.min_jacobi > 0.0);

    auto cap = IsothermalSurface::constant_curvature(1.0, params(33, 0.8));
    SimplicityReport r3 = certify_simple(*cap, 32, 16);
    CHECK(r3.simple());
}

TEST_CASE("certification is monotone in r0 for the positive-curvature family") {
    bool passed_large = false;
    for (double r0 : {0.8, 0.6, 0.4}) {
        auto s = IsothermalSurface::constant_curvature(1.0, params(33, r0));
        SimplicityReport rep = certify_simple(*s, 24, 12);
        if (r0 == 0.8) {
            passed_large = rep.simple();
            CHECK(passed_large);
        } else if (passed_large) {
            CHECK(rep.simple());
        }
    }
}

TEST_CASE("a steep cap fails certification without throwing") {
    // K = 4.5 pushes the equator inside r0 = 0.99: not convex, conjugate points
    auto s = IsothermalSurface::constant_curvature(4.5, params(33, 0.99));
    SimplicityReport rep = certify_simple(*s, 24, 12);
    CHECK_FALSE(rep.simple());
    CHECK_FALSE(rep.convex);
}

TEST_CASE("grid field surfaces interpolate the conformal factor") {
    // sample the cap family onto a grid and rebuild through bicubic
    int n = 81;
    double hw = 1.1;
    std::vector<double> vals(std::size_t(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double x = -hw + 2.0 * hw * i / (n - 1);
            double y = -hw + 2.0 * hw * j / (n - 1);
            vals[std::size_t(j) * n + i] = -std::log(1.0 + 0.25 * (x * x + y * y));
        }
    ScalarField lam = ScalarField::from_grid(vals, n, n, hw, 3);
    IsothermalSurface s(lam, params(33, 0.8));
    CHECK(s.lambda(0.31, -0.22) ==
          doctest::Approx(-std::log(1.0 + 0.25 * (0.31 * 0.31 + 0.22 * 0.22))).epsilon(1e-5));
    CHECK(s.gaussian_curvature(0.31, -0.22) == doctest::Approx(1.0).epsilon(2e-2));
}
