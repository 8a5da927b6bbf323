#include "geotomo/tensor.hpp"

#include <cmath>

namespace geotomo {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Parity parity_of(int m) { return m % 2 == 0 ? Parity::Even : Parity::Odd; }

}  // namespace

SymmetricTensor::SymmetricTensor(int degree, SmFunction restriction)
    : degree_(degree), rep_(std::move(restriction)) {
    if (degree < 0) throw DomainError("negative tensor degree");
    if (rep_.band() != degree)
        rep_ = rep_.with_band(degree);  // shrinking throws if modes above m are non-negligible
    rep_.enforce_parity(parity_of(degree));
}

SymmetricTensor SymmetricTensor::from_components(const IsothermalSurface& surface,
                                                 const std::vector<ScalarField>& comps,
                                                 Support support) {
    const int m = int(comps.size()) - 1;
    if (m < 0) throw DomainError("need m+1 component fields");
    const Grid& g = surface.grid();
    const int nt = std::max(4 * (m + 1), 8);

    std::vector<double> cth(nt), sth(nt);
    for (int l = 0; l < nt; ++l) {
        cth[l] = std::cos(kTwoPi * l / nt);
        sth[l] = std::sin(kTwoPi * l / nt);
    }
    std::vector<double> cmj(m + 1);
    for (int j = 0; j <= m; ++j) cmj[j] = binom(m, j);

    std::vector<cplx> vals(g.nodes() * std::size_t(nt), cplx(0.0));
    for (int jn = 0; jn < g.n(); ++jn)
        for (int in = 0; in < g.n(); ++in) {
            std::size_t node = g.idx(in, jn);
            if (support == Support::Disk && !g.inside(node)) continue;
            double x = g.x(in), yy = g.y(jn);
            double em = std::exp(-m * surface.lam()[node]);
            std::vector<double> c(m + 1);
            for (int j = 0; j <= m; ++j) c[j] = comps[j].f(x, yy);
            for (int l = 0; l < nt; ++l) {
                double acc = 0.0;
                for (int j = 0; j <= m; ++j) {
                    double pw = 1.0;
                    for (int q = 0; q < m - j; ++q) pw *= cth[l];
                    for (int q = 0; q < j; ++q) pw *= sth[l];
                    acc += cmj[j] * c[j] * pw;
                }
                vals[node * nt + l] = em * acc;
            }
        }

    SmFunction rep = SmFunction::from_theta_samples(surface.grid_ptr(), nt, vals, support);
    rep = rep.with_band(m);
    rep.enforce_parity(parity_of(m));
    rep.symmetrize_real();
    return SymmetricTensor(m, std::move(rep));
}

SymmetricTensor SymmetricTensor::from_matrix2(const IsothermalSurface& surface,
                                              const ScalarField& f11, const ScalarField& f12,
                                              const ScalarField& f21, const ScalarField& f22) {
    const Grid& g = surface.grid();
    for (int t = 0; t < 32; ++t) {
        double x = g.half_width() * std::cos(kTwoPi * t / 32.0) * 0.7;
        double y = g.half_width() * std::sin(kTwoPi * t / 32.0) * 0.7;
        double a = f12.f(x, y), b = f21.f(x, y);
        double scale = std::max({1.0, std::abs(a), std::abs(b)});
        if (std::abs(a - b) > 1e-10 * scale)
            throw DomainError("tensor components are not symmetric");
    }
    return from_components(surface, {f11, f12, f22});
}

SymmetricTensor SymmetricTensor::from_modes(const IsothermalSurface& surface, int degree,
                                            const SmFunction& modes) {
    if (modes.grid_ptr().get() != surface.grid_ptr().get())
        throw ShapeError("mode grid does not match the surface");
    // validate parity and conjugate symmetry before accepting
    int want = degree % 2;
    for (int k = -modes.band(); k <= modes.band(); ++k) {
        bool wrong_parity = ((std::abs(k) % 2) != want);
        for (std::size_t s = 0; s < modes.grid().nodes(); ++s) {
            if (wrong_parity && std::abs(modes.at(k, s)) > 1e-10)
                throw DomainError("mode parity violates the tensor degree");
        }
    }
    for (int k = 0; k <= modes.band(); ++k) {
        for (std::size_t s = 0; s < modes.grid().nodes(); ++s) {
            cplx a = modes.at(k, s), b = std::conj(modes.at(-k, s));
            if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a)))
                throw DomainError("modes violate conjugate symmetry");
        }
    }
    SmFunction rep = modes;
    rep.symmetrize_real();
    return SymmetricTensor(degree, std::move(rep));
}

std::vector<std::vector<double>> SymmetricTensor::components_on_grid(
    const IsothermalSurface& surface) const {
    const Grid& g = surface.grid();
    const int m = degree_;
    std::vector<std::vector<double>> comps(m + 1, std::vector<double>(g.nodes(), 0.0));

    // polynomial work buffers in the monomial basis xi1^{m-j} xi2^j
    std::vector<double> q(m + 1), p(m + 1), raised(m + 1);
    for (std::size_t s = 0; s < g.nodes(); ++s) {
        if (rep_.support() == Support::Disk && !g.inside(s)) continue;
        double el = std::exp(surface.lam()[s]);
        double e2 = el * el;
        std::fill(q.begin(), q.end(), 0.0);
        for (int k = m; k >= 0; k -= 2) {
            std::fill(p.begin(), p.end(), 0.0);
            if (k == 0) {
                p[0] = rep_.at(0, s).real();
            } else {
                cplx fk = rep_.at(k, s) * std::pow(el, k);
                cplx ipow(1.0, 0.0);
                for (int j = 0; j <= k; ++j) {
                    p[j] = 2.0 * binom(k, j) * (fk * ipow).real();
                    ipow *= cplx(0.0, 1.0);
                }
            }
            // raise degree k -> m by multiplying (e^{2 lambda}(xi1^2 + xi2^2))^{(m-k)/2}
            int deg = k;
            while (deg < m) {
                std::fill(raised.begin(), raised.end(), 0.0);
                for (int j = 0; j <= deg; ++j) {
                    raised[j] += e2 * p[j];
                    raised[j + 2] += e2 * p[j];
                }
                deg += 2;
                for (int j = 0; j <= deg; ++j) p[j] = raised[j];
            }
            for (int j = 0; j <= m; ++j) q[j] += p[j];
            if (k == 0) break;
        }
        for (int j = 0; j <= m; ++j) comps[j][s] = q[j] / binom(m, j);
    }
    return comps;
}

SymmetricTensor inner_derivative(const IsothermalSurface& surface, const SymmetricTensor& h) {
    SmFunction xh = apply_frame_field(FrameField::X, surface, h.restriction());
    return SymmetricTensor(h.degree() + 1, std::move(xh));
}

SymmetricTensor divergence(const IsothermalSurface& surface, const SymmetricTensor& f) {
    if (f.degree() == 0) throw DomainError("divergence needs degree >= 1");
    SmFunction xf = apply_frame_field(FrameField::X, surface, f.restriction());
    const int mb = f.degree() - 1;
    SmFunction out(surface.grid_ptr(), mb, xf.support(), parity_of(mb), true);
    for (int k = -mb; k <= mb; ++k)
        std::copy(xf.mode(k), xf.mode(k) + surface.grid().nodes(), out.mode(k));
    out.symmetrize_real();
    return SymmetricTensor(mb, std::move(out));
}

// ---------------------------------------------------------------------------
// Solenoidal/potential split.

namespace {

// second-order FD stencil along one axis at (i,j) honoring the inside mask;
// returns entry count, node offsets are in units of the axis stride
int fd_stencil(const Grid& g, int i, int j, int axis, int off[3], double coef[3]) {
    const int n = g.n();
    const double h = g.h();
    auto ok = [&](int d) {
        int ii = axis == 0 ? i + d : i;
        int jj = axis == 0 ? j : j + d;
        if (ii < 0 || jj < 0 || ii >= n || jj >= n) return false;
        return g.inside(ii, jj);
    };
    if (ok(-1) && ok(1)) {
        off[0] = -1; coef[0] = -0.5 / h;
        off[1] = 1;  coef[1] = 0.5 / h;
        return 2;
    }
    if (ok(1) && ok(2)) {
        off[0] = 0; coef[0] = -1.5 / h;
        off[1] = 1; coef[1] = 2.0 / h;
        off[2] = 2; coef[2] = -0.5 / h;
        return 3;
    }
    if (ok(-1) && ok(-2)) {
        off[0] = 0;  coef[0] = 1.5 / h;
        off[1] = -1; coef[1] = -2.0 / h;
        off[2] = -2; coef[2] = 0.5 / h;
        return 3;
    }
    if (ok(1)) {
        off[0] = 0; coef[0] = -1.0 / h;
        off[1] = 1; coef[1] = 1.0 / h;
        return 2;
    }
    if (ok(-1)) {
        off[0] = 0;  coef[0] = 1.0 / h;
        off[1] = -1; coef[1] = -1.0 / h;
        return 2;
    }
    return 0;
}

struct PotentialSystem {
    const IsothermalSurface& surface;
    std::vector<std::size_t> unknown_nodes;       // grid nodes carrying h DOFs
    std::vector<std::int32_t> unknown_slot;       // node -> slot or -1
    std::vector<std::size_t> out_nodes;           // all inside nodes
    std::vector<double> sqrt_w;                   // sqrt(2 pi w e^{2 lambda}) per out node
    std::vector<int> in_modes, out_modes;         // fiber frequencies

    PotentialSystem(const IsothermalSurface& s, int m) : surface(s) {
        const Grid& g = s.grid();
        double margin = s.r0() - 0.5 * g.h();
        unknown_slot.assign(g.nodes(), -1);
        for (std::size_t node : g.inside_nodes()) {
            int i = int(node % g.n());
            int j = int(node / g.n());
            double x = g.x(i), y = g.y(j);
            out_nodes.push_back(node);
            sqrt_w.push_back(std::sqrt(kTwoPi * g.weight(node) * s.exp_2lam()[node]));
            if (x * x + y * y <= margin * margin) {
                unknown_slot[node] = std::int32_t(unknown_nodes.size());
                unknown_nodes.push_back(node);
            }
        }
        for (int k = -(m - 1); k <= m - 1; ++k)
            if (((std::abs(k) % 2)) == ((m - 1) % 2)) in_modes.push_back(k);
        for (int k = -m; k <= m; ++k)
            if (((std::abs(k) % 2)) == (m % 2)) out_modes.push_back(k);
    }

    std::size_t nx() const { return unknown_nodes.size() * in_modes.size(); }
    std::size_t ny() const { return out_nodes.size() * out_modes.size(); }

    // Enumerate matrix entries of row (out node, out mode) as pairs
    // (in slot, coefficient); fn(col, coeff).
    template <typename Fn>
    void row_entries(std::size_t row, Fn&& fn) const {
        const Grid& g = surface.grid();
        const std::size_t node = out_nodes[row % out_nodes.size()];
        const int q = out_modes[row / out_nodes.size()];
        const int i = int(node % g.n());
        const int j = int(node / g.n());
        const double enl = surface.exp_neg_lam()[node];
        const double sw = sqrt_w[row % out_nodes.size()];
        const cplx dl(0.5 * surface.lam_x()[node], -0.5 * surface.lam_y()[node]);
        const cplx dlb = std::conj(dl);

        int offs[3];
        double cf[3];
        auto emit_mode = [&](int k, bool plus) {
            // locate the input mode index
            int mi = -1;
            for (std::size_t t = 0; t < in_modes.size(); ++t)
                if (in_modes[t] == k) mi = int(t);
            if (mi < 0) return;
            const std::size_t mode_base = std::size_t(mi) * unknown_nodes.size();
            auto emit = [&](std::size_t nd, cplx c) {
                std::int32_t slot = unknown_slot[nd];
                if (slot >= 0 && c != 0.0) fn(mode_base + std::size_t(slot), sw * enl * c);
            };
            // derivative part: dz for eta+, dzbar for eta-
            int cnt = fd_stencil(g, i, j, 0, offs, cf);
            for (int t = 0; t < cnt; ++t)
                emit(g.idx(i + offs[t], j), cplx(0.5 * cf[t], 0.0));
            cnt = fd_stencil(g, i, j, 1, offs, cf);
            for (int t = 0; t < cnt; ++t)
                emit(g.idx(i, j + offs[t]), plus ? cplx(0.0, -0.5 * cf[t]) : cplx(0.0, 0.5 * cf[t]));
            // zeroth-order lambda term at the row node
            emit(node, plus ? (-double(k)) * dl : double(k) * dlb);
        };
        emit_mode(q - 1, true);   // eta+ image of mode q-1
        emit_mode(q + 1, false);  // eta- image of mode q+1
    }

    void apply(const CplxVec& x, CplxVec& y) const {
        y.assign(ny(), cplx(0.0));
        parallel_for(std::int64_t(ny()), [&](std::int64_t lo, std::int64_t hi, int) {
            for (std::int64_t r = lo; r < hi; ++r) {
                cplx acc = 0.0;
                row_entries(std::size_t(r), [&](std::size_t col, cplx c) { acc += c * x[col]; });
                y[std::size_t(r)] = acc;
            }
        });
    }

    void apply_adjoint(const CplxVec& y, CplxVec& x) const {
        x.assign(nx(), cplx(0.0));
        for (std::size_t r = 0; r < ny(); ++r) {
            cplx v = y[r];
            if (v == 0.0) continue;
            row_entries(r, [&](std::size_t col, cplx c) { x[col] += std::conj(c) * v; });
        }
    }
};

}  // namespace

DecompositionResult solenoidal_decompose(const IsothermalSurface& surface,
                                         const SymmetricTensor& f, const CglsOptions& opt) {
    const int m = f.degree();
    if (m < 1) throw DomainError("solenoidal decomposition needs degree >= 1");

    PotentialSystem sys(surface, m);

    // right-hand side: the restriction of f on inside nodes, row-weighted
    CplxVec b(sys.ny(), cplx(0.0));
    for (std::size_t mi = 0; mi < sys.out_modes.size(); ++mi) {
        int k = sys.out_modes[mi];
        for (std::size_t r = 0; r < sys.out_nodes.size(); ++r)
            b[mi * sys.out_nodes.size() + r] =
                sys.sqrt_w[r] * f.restriction().at(k, sys.out_nodes[r]);
    }

    CplxVec x(sys.nx(), cplx(0.0));
    CglsResult cg = cgls([&](const CplxVec& in, CplxVec& out) { sys.apply(in, out); },
                         [&](const CplxVec& in, CplxVec& out) { sys.apply_adjoint(in, out); }, b,
                         x, opt);
    if (!cg.converged && cg.backward_error > 1e-3)
        throw NumericError("potential solve did not converge", cg.backward_error);

    // unpack h
    SmFunction hrep(surface.grid_ptr(), std::max(m - 1, 0), Support::Disk,
                    m % 2 == 0 ? Parity::Odd : Parity::Even, true);
    for (std::size_t mi = 0; mi < sys.in_modes.size(); ++mi) {
        int k = sys.in_modes[mi];
        cplx* dst = hrep.mode(k);
        for (std::size_t t = 0; t < sys.unknown_nodes.size(); ++t)
            dst[sys.unknown_nodes[t]] = x[mi * sys.unknown_nodes.size() + t];
    }
    hrep.symmetrize_real();
    SymmetricTensor h(m - 1, std::move(hrep));

    SymmetricTensor dh = inner_derivative(surface, h);
    SmFunction fs_rep = f.restriction();
    fs_rep -= dh.restriction();
    fs_rep.symmetrize_real();
    SymmetricTensor fs(m, std::move(fs_rep));

    DecompositionResult res;
    double fn = l2_norm(surface, f.restriction());
    SmFunction recon = fs.restriction() + dh.restriction() - f.restriction();
    res.reconstruction_residual = fn > 0 ? l2_norm(surface, recon) / fn : 0.0;

    // delta is defined by adjointness, so the solenoidal residual is the
    // normal-equation residual of f^s against the one of f
    auto adjoint_norm = [&](const SymmetricTensor& t) {
        CplxVec y(sys.ny(), cplx(0.0)), g;
        for (std::size_t mi = 0; mi < sys.out_modes.size(); ++mi) {
            int k = sys.out_modes[mi];
            for (std::size_t r = 0; r < sys.out_nodes.size(); ++r)
                y[mi * sys.out_nodes.size() + r] =
                    sys.sqrt_w[r] * t.restriction().at(k, sys.out_nodes[r]);
        }
        sys.apply_adjoint(y, g);
        double acc = 0.0;
        for (const cplx& v : g) acc += std::norm(v);
        return std::sqrt(acc);
    };
    double dn = adjoint_norm(f);
    res.solenoidal_residual = dn > 0 ? adjoint_norm(fs) / dn : adjoint_norm(fs);
    res.iterations = cg.iterations;
    res.solenoidal = std::move(fs);
    res.potential = std::move(h);
    return res;
}

}  // namespace geotomo
