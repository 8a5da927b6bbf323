#include "geotomo/integrating_factors.hpp"

#include <cmath>

#include "geotomo/operators.hpp"

namespace geotomo {

HodgeDecomposition hodge_decompose(const IsothermalSurface& surface, const Connection1Form& A,
                                   int nr, int npsi) {
    const auto& a1 = A.comp1();
    const auto& a2 = A.comp2();

    // b: Delta b = d_x A_2 - d_y A_1, b|dM = 0
    auto curl = [&](double x, double y) { return a2.dx(x, y) - a1.dy(x, y); };
    PolarField b = solve_poisson_dirichlet(curl, surface.r0(), nr, npsi);

    // a: Delta a = div A with Neumann da/dn = A . nu. (div(star db) = 0 and
    // the tangential trace of b vanishes, so b drops out of both data.)
    auto div = [&](double x, double y) { return a1.dx(x, y) + a2.dy(x, y); };
    double r0 = surface.r0();
    auto neu = [&](double psi) {
        double c = std::cos(psi), s = std::sin(psi);
        return a1.value(r0 * c, r0 * s) * c + a2.value(r0 * c, r0 * s) * s;
    };
    PolarField a = solve_poisson_neumann(div, neu, surface.r0(), nr, npsi);

    HodgeDecomposition out{std::move(a), std::move(b),
                           SmFunction(surface.grid_ptr(), 0, Support::Disk),
                           SmFunction(surface.grid_ptr(), 0, Support::Disk), 0.0};

    // node samples + reconstruction residual ||A - da - star db|| over the disk
    const Grid& g = surface.grid();
    double num = 0.0, den = 0.0;
    for (std::size_t node : g.inside_nodes()) {
        int i = int(node % g.n());
        int j = int(node / g.n());
        double x = g.x(i), y = g.y(j);
        out.a_nodes.at(0, node) = out.a.value(x, y);
        out.b_nodes.at(0, node) = out.b.value(x, y);
        cplx ax, ay, bx, by;
        out.a.gradient(x, y, ax, ay);
        out.b.gradient(x, y, bx, by);
        // star db = b_x dy - b_y dx
        cplx r1 = a1.value(x, y) - (ax - by);
        cplx r2 = a2.value(x, y) - (ay + bx);
        double w = g.weight(node);
        num += w * (std::norm(r1) + std::norm(r2));
        den += w * (std::norm(a1.value(x, y)) + std::norm(a2.value(x, y)));
    }
    out.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return out;
}

namespace {

// Legendre P_q by recurrence
double legendre(int q, double x) {
    double p0 = 1.0, p1 = x;
    if (q == 0) return p0;
    for (int k = 2; k <= q; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// synthesis matrix of the smooth boundary basis, beam-major; columns carry a
// Sobolev-style down-weighting so plain Tikhonov on the scaled coefficients
// penalizes oscillatory data
struct BoundaryBasis {
    int n_p, n_q;
    std::vector<cplx> rows;     // fan.size() x (2 n_p + 1)(n_q + 1)
    std::vector<double> colw;   // per-column weight 1/(1 + p^2 + q^2)

    double kappa;

    BoundaryBasis(const FanBeamGrid& fan, int beta_modes, int alpha_degree, double glancing_power)
        : n_p(beta_modes), n_q(alpha_degree), kappa(glancing_power) {
        const std::size_t nc = cols();
        rows.resize(fan.size() * nc);
        colw.resize(nc);
        for (int p = -n_p; p <= n_p; ++p)
            for (int q = 0; q <= n_q; ++q)
                colw[std::size_t(p + n_p) * (n_q + 1) + q] = 1.0 / (1.0 + p * p);
        for (std::size_t s = 0; s < fan.size(); ++s) {
            int ib = int(s / fan.n_alpha());
            int ia = int(s % fan.n_alpha());
            double beta = fan.beta(ib);
            double sa = std::sin(fan.alpha(ia));
            double taper = std::pow(std::cos(fan.alpha(ia)), kappa);
            std::size_t o = s * nc;
            for (int p = -n_p; p <= n_p; ++p) {
                cplx eb = std::polar(1.0, p * beta);
                for (int q = 0; q <= n_q; ++q)
                    rows[o + std::size_t(p + n_p) * (n_q + 1) + q] = taper * eb * legendre(q, sa);
            }
        }
    }

    std::size_t cols() const { return std::size_t(2 * n_p + 1) * (n_q + 1); }

    // h = B (colw .* c)
    void synth(const CplxVec& c, CplxVec& h) const {
        const std::size_t nc = cols();
        h.assign(rows.size() / nc, cplx(0.0));
        for (std::size_t s = 0; s < h.size(); ++s) {
            cplx acc = 0.0;
            const cplx* row = rows.data() + s * nc;
            for (std::size_t t = 0; t < nc; ++t) acc += row[t] * colw[t] * c[t];
            h[s] = acc;
        }
    }

    void synth_adjoint(const CplxVec& h, CplxVec& c) const {
        const std::size_t nc = cols();
        c.assign(nc, cplx(0.0));
        for (std::size_t s = 0; s < h.size(); ++s) {
            const cplx* row = rows.data() + s * nc;
            for (std::size_t t = 0; t < nc; ++t) c[t] += std::conj(row[t]) * colw[t] * h[s];
        }
    }

    // un-scaled coefficients for closed-form evaluation
    CplxVec actual_coefficients(const CplxVec& c) const {
        CplxVec out(c.size());
        for (std::size_t t = 0; t < c.size(); ++t) out[t] = colw[t] * c[t];
        return out;
    }
};

}  // namespace

I0StarSolveResult i0star_solve(const InfluxMap& map, const SmFunction& target,
                               const I0StarSolveOptions& opt) {
    const IsothermalSurface& surface = map.surface();
    const Grid& g = surface.grid();
    const auto& nodes = g.inside_nodes();

    std::vector<double> sqw(nodes.size());
    for (std::size_t r = 0; r < nodes.size(); ++r)
        sqw[r] = std::sqrt(g.weight(nodes[r]) * surface.exp_2lam()[nodes[r]]);

    BoundaryBasis basis(map.fan(), opt.beta_modes, opt.alpha_degree, opt.glancing_power);

    auto apply = [&](const CplxVec& c, CplxVec& y) {
        CplxVec h;
        basis.synth(c, h);
        SmFunction bp = map.backproject(h);
        y.resize(nodes.size());
        for (std::size_t r = 0; r < nodes.size(); ++r) y[r] = sqw[r] * bp.at(0, nodes[r]);
    };
    auto apply_t = [&](const CplxVec& y, CplxVec& c) {
        std::vector<cplx> nodevals(g.nodes(), cplx(0.0));
        for (std::size_t r = 0; r < nodes.size(); ++r) nodevals[nodes[r]] = sqw[r] * y[r];
        CplxVec h = map.backproject_adjoint(nodevals);
        basis.synth_adjoint(h, c);
    };

    CplxVec b(nodes.size());
    double tnorm = 0.0;
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        b[r] = sqw[r] * target.at(0, nodes[r]);
        tnorm += std::norm(b[r]);
    }
    tnorm = std::sqrt(tnorm);

    double sigma = power_estimate_norm(apply, apply_t, basis.cols(), nodes.size());
    CglsOptions copt;
    copt.max_iterations = opt.max_iterations;
    copt.tolerance = opt.tolerance;
    copt.regularization = opt.reg_rel * sigma * sigma;

    CplxVec c(basis.cols(), cplx(0.0));
    CglsResult cg = cgls(apply, apply_t, b, c, copt);

    I0StarSolveResult res;
    res.iterations = cg.iterations;
    basis.synth(c, res.boundary_data);
    res.smooth_eval = [c = basis.actual_coefficients(c), np = opt.beta_modes,
                       nq = opt.alpha_degree,
                       kap = opt.glancing_power](double beta, double alpha) -> cplx {
        double sa = std::sin(alpha);
        cplx acc = 0.0;
        double taper = std::pow(std::max(std::cos(alpha), 0.0), kap);
        for (int p = -np; p <= np; ++p) {
            cplx eb = std::polar(1.0, p * beta);
            for (int q = 0; q <= nq; ++q)
                acc += c[std::size_t(p + np) * (nq + 1) + q] * eb * legendre(q, sa);
        }
        return taper * acc;
    };

    CplxVec fit;
    apply(c, fit);
    double misfit = 0.0;
    for (std::size_t r = 0; r < fit.size(); ++r) misfit += std::norm(fit[r] - b[r]);
    res.fit_residual = tnorm > 0.0 ? std::sqrt(misfit) / tnorm : std::sqrt(misfit);
    if (cg.iterations >= copt.max_iterations && res.fit_residual > 0.5)
        throw NumericError("I0* solve hit the iteration cap", res.fit_residual);
    return res;
}

IntegratingFactor holomorphic_integrating_factor(const IsothermalSurface& surface,
                                                 const Connection1Form& A,
                                                 FactorOrientation orientation,
                                                 const InfluxMap& map, const FactorOptions& opt) {
    HodgeDecomposition hodge = hodge_decompose(surface, A, opt.poisson_nr, opt.poisson_npsi);

    // target for the even first integral: w'_0 = -i b (holomorphic) or +i b,
    // scaled by 2 pi because I0* integrates over the fiber
    SmFunction target = hodge.b_nodes;
    cplx scale = orientation == FactorOrientation::Holomorphic ? cplx(0.0, -kTwoPi)
                                                               : cplx(0.0, kTwoPi);
    target *= scale;

    I0StarSolveResult solve = i0star_solve(map, target, opt.solve);
    if (solve.fit_residual > opt.failure_threshold)
        throw NumericError("integrating factor pipeline failed: I0* fit residual too large",
                           solve.fit_residual);

    SmFunction wprime = map.extend_eval(solve.smooth_eval);
    SmFunction what = wprime.even_part();
    SmFunction w = orientation == FactorOrientation::Holomorphic ? what.holomorphic_filter()
                                                                 : what.antiholomorphic_filter();
    w -= hodge.a_nodes;

    IntegratingFactor out;
    out.hodge_residual = hodge.residual;
    out.i0star_fit = solve.fit_residual;
    out.iterations = solve.iterations;

    SmFunction xw = apply_frame_field(FrameField::X, surface, w);
    SmFunction ar = mask_to_disk(surface, A.restriction());
    SmFunction resid = mask_to_disk(surface, xw + ar.with_band(xw.band()));
    double an = l2_norm(surface, ar);
    out.transport_residual = an > 0.0 ? l2_norm(surface, resid) / an : l2_norm(surface, resid);
    out.wrong_side_energy =
        orientation == FactorOrientation::Holomorphic
            ? energy_fraction(surface, w, [](int k) { return k < 0; })
            : energy_fraction(surface, w, [](int k) { return k > 0; });
    out.w = std::move(w);
    return out;
}

HolomorphicTransportReport verify_holomorphic_transport(const IsothermalSurface& surface,
                                                        const SmFunction& f, int jobs) {
    double neg = energy_fraction(surface, f, [](int k) { return k < 0; });
    if (neg > 1e-10)
        throw DomainError("verify_holomorphic_transport expects a holomorphic right-hand side");
    SmFunction u = transport_solve(surface, f, jobs);
    HolomorphicTransportReport rep;
    rep.negative_energy_fraction = energy_fraction(surface, u, [](int k) { return k < 0; });
    rep.zero_mode_fraction = energy_fraction(surface, u, [](int k) { return k == 0; });
    rep.u = std::move(u);
    return rep;
}

}  // namespace geotomo
