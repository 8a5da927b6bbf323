#include "geotomo/surface.hpp"

#include <cmath>

#include "geotomo/geodesic_flow.hpp"

namespace geotomo {

IsothermalSurface::IsothermalSurface(ScalarField lambda, const Params& p)
    : lambda_(std::move(lambda)), n_theta_(p.n_theta) {
    if (p.n_theta < 8 || p.n_theta % 2 != 0) throw ConfigError("n_theta must be even and >= 8");
    grid_ = std::make_shared<Grid>(p.n, p.half_width, p.r0);

    const Grid& g = *grid_;
    lam_.resize(g.nodes());
    lam_x_.resize(g.nodes());
    lam_y_.resize(g.nodes());
    exp_lam_.resize(g.nodes());
    exp_neg_lam_.resize(g.nodes());
    exp_2lam_.resize(g.nodes());
    curv_.resize(g.nodes());

    double max_speed = 0.0, max_turn = 0.0, max_exp = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        for (int i = 0; i < g.n(); ++i) {
            std::size_t k = g.idx(i, j);
            double x = g.x(i), y = g.y(j);
            double l = lambda_.f(x, y);
            lam_[k] = l;
            lam_x_[k] = lambda_.fx(x, y);
            lam_y_[k] = lambda_.fy(x, y);
            exp_lam_[k] = std::exp(l);
            exp_neg_lam_[k] = std::exp(-l);
            exp_2lam_[k] = std::exp(2.0 * l);
            curv_[k] = -std::exp(-2.0 * l) * (lambda_.fxx(x, y) + lambda_.fyy(x, y));
            if (!std::isfinite(lam_[k]) || !std::isfinite(curv_[k]))
                throw DomainError("conformal factor not finite on the computational square");
            if (g.inside(k)) {
                double grad = std::hypot(lam_x_[k], lam_y_[k]);
                max_speed = std::max(max_speed, exp_neg_lam_[k]);
                max_turn = std::max(max_turn, exp_neg_lam_[k] * grad);
                max_exp = std::max(max_exp, exp_lam_[k]);
            }
        }
    }

    ht_ = p.ht > 0.0 ? p.ht : std::min(0.01, max_turn > 0.0 ? 0.1 / max_turn : 0.01);
    t_max_ = p.tmax_factor * (2.0 * p.r0) * max_exp;

    // boundary samples: kg = e^{-lambda} (1/r0 + dlambda/dr)
    const int nb = 256;
    boundary_.r0 = p.r0;
    boundary_.beta.resize(nb);
    boundary_.kg.resize(nb);
    double min_kg = 1e300;
    for (int s = 0; s < nb; ++s) {
        double b = kTwoPi * s / nb;
        double cx = std::cos(b), sy = std::sin(b);
        double x = p.r0 * cx, y = p.r0 * sy;
        double dldr = lambda_.fx(x, y) * cx + lambda_.fy(x, y) * sy;
        double kg = std::exp(-lambda_.f(x, y)) * (1.0 / p.r0 + dldr);
        boundary_.beta[s] = b;
        boundary_.kg[s] = kg;
        min_kg = std::min(min_kg, kg);
    }
    boundary_.strictly_convex = min_kg > 0.0;
}

double IsothermalSurface::gaussian_curvature(double x, double y) const {
    if (!contains(x, y, 1e-12)) throw DomainError("point outside the working disk");
    return -std::exp(-2.0 * lambda_.f(x, y)) * (lambda_.fxx(x, y) + lambda_.fyy(x, y));
}

SurfacePtr IsothermalSurface::euclidean(const Params& p) {
    return std::make_shared<IsothermalSurface>(ScalarField::zero(), p);
}

SurfacePtr IsothermalSurface::constant_curvature(double K, const Params& p) {
    // lambda = -log(1 + K r^2 / 4) gives Gaussian curvature K.
    double c = K / 4.0;
    ScalarField s;
    auto u = [c](double x, double y) { return 1.0 + c * (x * x + y * y); };
    s.f = [u](double x, double y) { return -std::log(u(x, y)); };
    s.fx = [u, c](double x, double y) { return -2.0 * c * x / u(x, y); };
    s.fy = [u, c](double x, double y) { return -2.0 * c * y / u(x, y); };
    s.fxx = [u, c](double x, double y) {
        double v = u(x, y);
        return -2.0 * c / v + 4.0 * c * c * x * x / (v * v);
    };
    s.fyy = [u, c](double x, double y) {
        double v = u(x, y);
        return -2.0 * c / v + 4.0 * c * c * y * y / (v * v);
    };
    s.fxy = [u, c](double x, double y) {
        double v = u(x, y);
        return 4.0 * c * c * x * y / (v * v);
    };
    s.analytic = true;
    return std::make_shared<IsothermalSurface>(std::move(s), p);
}

// ---------------------------------------------------------------------------

double AreaFormPrimitive::rho(double x, double y) const {
    static thread_local std::vector<double> gl_x, gl_w;
    if (int(gl_x.size()) != quad_points) gauss_legendre(quad_points, gl_x, gl_w);
    double acc = 0.0;
    for (int q = 0; q < quad_points; ++q) {
        double t = 0.5 * (gl_x[q] + 1.0);
        acc += 0.5 * gl_w[q] * t * std::exp(2.0 * surface->lambda(t * x, t * y));
    }
    return acc;
}

void AreaFormPrimitive::rho_grad(double x, double y, double& gx, double& gy) const {
    static thread_local std::vector<double> gl_x, gl_w;
    if (int(gl_x.size()) != quad_points) gauss_legendre(quad_points, gl_x, gl_w);
    gx = gy = 0.0;
    for (int q = 0; q < quad_points; ++q) {
        double t = 0.5 * (gl_x[q] + 1.0);
        double e = std::exp(2.0 * surface->lambda(t * x, t * y));
        gx += 0.5 * gl_w[q] * 2.0 * t * t * e * surface->lambda_x(t * x, t * y);
        gy += 0.5 * gl_w[q] * 2.0 * t * t * e * surface->lambda_y(t * x, t * y);
    }
}

void AreaFormPrimitive::components(double x, double y, double& p1, double& p2) const {
    double r = rho(x, y);
    p1 = -r * y;
    p2 = r * x;
}

AreaFormPrimitive area_form_primitive(const IsothermalSurface& surface, int quad_points) {
    if (quad_points < 4) throw NumericError("area form quadrature too coarse", 0.0);
    return AreaFormPrimitive{&surface, quad_points};
}

// ---------------------------------------------------------------------------

SimplicityReport certify_simple(const IsothermalSurface& surface, int n_boundary,
                                int n_directions) {
    SimplicityReport rep;
    double min_kg = 1e300;
    for (double kg : surface.boundary().kg) min_kg = std::min(min_kg, kg);
    rep.min_kg = min_kg;
    rep.convex = min_kg > 0.0;

    rep.nontrapping = true;
    rep.no_conjugate_points = true;
    rep.min_jacobi = 1e300;
    rep.max_exit_time = 0.0;

    GeodesicTracer tracer(surface);
    for (int s = 0; s < n_boundary; ++s) {
        double beta = kTwoPi * s / n_boundary;
        for (int d = 0; d < n_directions; ++d) {
            // open in alpha: strictly non-tangential influx directions
            double alpha = -kPi / 2.0 + kPi * (d + 0.5) / n_directions;
            double x, y;
            surface.boundary().point(beta, x, y);
            double theta = beta + kPi + alpha;
            JacobiResult jr;
            try {
                jr = tracer.trace_with_jacobi(x, y, theta);
            } catch (const NontrappingError&) {
                rep.nontrapping = false;
                continue;
            }
            rep.max_exit_time = std::max(rep.max_exit_time, jr.exit_time);
            rep.min_jacobi = std::min(rep.min_jacobi, jr.min_b);
            if (jr.min_b <= 0.0) rep.no_conjugate_points = false;
        }
    }
    return rep;
}

}  // namespace geotomo
