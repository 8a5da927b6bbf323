#include "geotomo/operators.hpp"

#include <cmath>

namespace geotomo {

namespace {

void check_grid(const IsothermalSurface& surface, const SmFunction& u) {
    if (surface.grid_ptr().get() != u.grid_ptr().get()) throw ShapeError("surface/function grid mismatch");
}

void check_headroom(const IsothermalSurface& surface, const SmFunction& u) {
    if (u.band() + 1 > surface.n_theta() / 2)
        throw BandOverflowError("frequency shift exceeds representable band (band " +
                                std::to_string(u.band()) + ", n_theta " +
                                std::to_string(surface.n_theta()) + ")");
}

// Accumulates fp * (eta+ u) + fm * (eta- u) into out (out has band + 1).
void eta_accumulate(const IsothermalSurface& surface, const SmFunction& u, SmFunction& out,
                    cplx fp, cplx fm) {
    const Grid& g = surface.grid();
    const std::size_t nn = g.nodes();
    const auto& enl = surface.exp_neg_lam();
    const auto& lx = surface.lam_x();
    const auto& ly = surface.lam_y();

    std::vector<cplx> dx(nn), dy(nn);
    for (int k = -u.band(); k <= u.band(); ++k) {
        const cplx* uk = u.mode(k);
        differentiate_x(g, u.support(), uk, dx.data());
        differentiate_y(g, u.support(), uk, dy.data());
        cplx* up = fp != 0.0 ? out.mode(k + 1) : nullptr;
        cplx* um = fm != 0.0 ? out.mode(k - 1) : nullptr;
        for (std::size_t s = 0; s < nn; ++s) {
            if (u.support() == Support::Disk && !g.inside(s)) continue;
            cplx dz = 0.5 * (dx[s] - cplx(0, 1) * dy[s]);
            cplx dzb = 0.5 * (dx[s] + cplx(0, 1) * dy[s]);
            cplx dl(0.5 * lx[s], -0.5 * ly[s]);    // d_z lambda
            cplx dlb(0.5 * lx[s], 0.5 * ly[s]);    // d_zbar lambda
            if (up) up[s] += fp * enl[s] * (dz - double(k) * dl * uk[s]);
            if (um) um[s] += fm * enl[s] * (dzb + double(k) * dlb * uk[s]);
        }
    }
}

}  // namespace

SmFunction eta_op(int sign, const IsothermalSurface& surface, const SmFunction& u) {
    check_grid(surface, u);
    check_headroom(surface, u);
    SmFunction out(u.grid_ptr(), u.band() + 1, u.support(), flip(u.parity()), false);
    if (sign > 0)
        eta_accumulate(surface, u, out, 1.0, 0.0);
    else
        eta_accumulate(surface, u, out, 0.0, 1.0);
    return out;
}

SmFunction apply_V(const SmFunction& u) {
    SmFunction out = u;
    for (int k = -u.band(); k <= u.band(); ++k) {
        cplx* p = out.mode(k);
        cplx f(0.0, double(k));
        for (std::size_t s = 0; s < u.grid().nodes(); ++s) p[s] *= f;
    }
    return out;
}

SmFunction apply_frame_field(FrameField which, const IsothermalSurface& surface,
                             const SmFunction& u) {
    check_grid(surface, u);
    if (which == FrameField::V) return apply_V(u);
    check_headroom(surface, u);
    SmFunction out(u.grid_ptr(), u.band() + 1, u.support(), flip(u.parity()), u.is_real());
    if (which == FrameField::X) {
        // X = eta+ + eta-
        eta_accumulate(surface, u, out, 1.0, 1.0);
    } else {
        // Xperp = -i (eta+ - eta-)
        eta_accumulate(surface, u, out, cplx(0, -1), cplx(0, 1));
    }
    return out;
}

SmFunction connection_multiply(const IsothermalSurface& surface, const Connection1Form& A,
                               const SmFunction& u) {
    check_grid(surface, u);
    check_headroom(surface, u);
    const Grid& g = surface.grid();
    SmFunction out(u.grid_ptr(), u.band() + 1, u.support(), flip(u.parity()), false);
    const auto& ap = A.a_plus();
    const auto& am = A.a_minus();
    for (int k = -u.band(); k <= u.band(); ++k) {
        const cplx* uk = u.mode(k);
        cplx* up = out.mode(k + 1);
        cplx* um = out.mode(k - 1);
        for (std::size_t s = 0; s < g.nodes(); ++s) {
            if (u.support() == Support::Disk && !g.inside(s)) continue;
            up[s] += ap[s] * uk[s];
            um[s] += am[s] * uk[s];
        }
    }
    return out;
}

SmFunction mu_op(int sign, const IsothermalSurface& surface, const Connection1Form& A,
                 const SmFunction& u) {
    check_grid(surface, u);
    check_headroom(surface, u);
    SmFunction out(u.grid_ptr(), u.band() + 1, u.support(), flip(u.parity()), false);
    const Grid& g = surface.grid();
    if (sign > 0) {
        eta_accumulate(surface, u, out, 1.0, 0.0);
        const auto& ap = A.a_plus();
        for (int k = -u.band(); k <= u.band(); ++k) {
            const cplx* uk = u.mode(k);
            cplx* up = out.mode(k + 1);
            for (std::size_t s = 0; s < g.nodes(); ++s) {
                if (u.support() == Support::Disk && !g.inside(s)) continue;
                up[s] += ap[s] * uk[s];
            }
        }
    } else {
        eta_accumulate(surface, u, out, 0.0, 1.0);
        const auto& am = A.a_minus();
        for (int k = -u.band(); k <= u.band(); ++k) {
            const cplx* uk = u.mode(k);
            cplx* um = out.mode(k - 1);
            for (std::size_t s = 0; s < g.nodes(); ++s) {
                if (u.support() == Support::Disk && !g.inside(s)) continue;
                um[s] += am[s] * uk[s];
            }
        }
    }
    return out;
}

SmFunction apply_X_plus_A(const IsothermalSurface& surface, const Connection1Form& A,
                          const SmFunction& u) {
    SmFunction out = apply_frame_field(FrameField::X, surface, u);
    SmFunction au = connection_multiply(surface, A, u);
    out += au;
    return out;
}

SmFunction node_field_multiply(const std::vector<double>& field, const SmFunction& u) {
    if (field.size() != u.grid().nodes()) throw ShapeError("node field size mismatch");
    SmFunction out = u;
    for (int k = -u.band(); k <= u.band(); ++k) {
        cplx* p = out.mode(k);
        for (std::size_t s = 0; s < field.size(); ++s) p[s] *= field[s];
    }
    return out;
}

SmFunction node_field_multiply(const std::vector<cplx>& field, const SmFunction& u) {
    if (field.size() != u.grid().nodes()) throw ShapeError("node field size mismatch");
    SmFunction out = u;
    out.set_real(false);
    for (int k = -u.band(); k <= u.band(); ++k) {
        cplx* p = out.mode(k);
        for (std::size_t s = 0; s < field.size(); ++s) p[s] *= field[s];
    }
    return out;
}

SmFunction mask_to_disk(const IsothermalSurface& surface, const SmFunction& u) {
    check_grid(surface, u);
    const Grid& g = surface.grid();
    SmFunction out = u;
    for (int k = -u.band(); k <= u.band(); ++k) {
        cplx* p = out.mode(k);
        for (std::size_t s = 0; s < g.nodes(); ++s)
            if (!g.inside(s)) p[s] = 0.0;
    }
    return out;
}

cplx l2_inner_product(const IsothermalSurface& surface, const SmFunction& u, const SmFunction& v) {
    check_grid(surface, u);
    check_grid(surface, v);
    const Grid& g = surface.grid();
    const auto& e2l = surface.exp_2lam();
    const auto& w = g.weights();
    int kmax = std::min(u.band(), v.band());
    cplx acc = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        const cplx* uk = u.mode(k);
        const cplx* vk = v.mode(k);
        cplx sum = 0.0;
        for (std::size_t s = 0; s < g.nodes(); ++s) {
            if (w[s] == 0.0) continue;
            sum += w[s] * e2l[s] * uk[s] * std::conj(vk[s]);
        }
        acc += sum;
    }
    return kTwoPi * acc;
}

double l2_norm(const IsothermalSurface& surface, const SmFunction& u) {
    return std::sqrt(std::max(0.0, l2_inner_product(surface, u, u).real()));
}

std::vector<double> mode_energies(const IsothermalSurface& surface, const SmFunction& u) {
    check_grid(surface, u);
    const Grid& g = surface.grid();
    const auto& e2l = surface.exp_2lam();
    const auto& w = g.weights();
    std::vector<double> out(2 * u.band() + 1, 0.0);
    for (int k = -u.band(); k <= u.band(); ++k) {
        const cplx* uk = u.mode(k);
        double sum = 0.0;
        for (std::size_t s = 0; s < g.nodes(); ++s) {
            if (w[s] == 0.0) continue;
            sum += w[s] * e2l[s] * std::norm(uk[s]);
        }
        out[k + u.band()] = kTwoPi * sum;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fiber-grid products with band headroom.

namespace {

SmFunction via_theta_grid(const SmFunction& a, const SmFunction& b, bool exponential) {
    const Grid& g = a.grid();
    int band_out = exponential ? 2 * std::max(a.band(), 1) : a.band() + b.band();
    int nt = 2 * (2 * band_out + 2);
    Support sup = a.support();
    if (!exponential && b.support() == Support::Disk) sup = Support::Disk;

    std::vector<cplx> vals(g.nodes() * std::size_t(nt), cplx(0.0));
    for (std::size_t node = 0; node < g.nodes(); ++node) {
        if (sup == Support::Disk && !g.inside(node)) continue;
        int i = int(node % g.n());
        int j = int(node / g.n());
        for (int l = 0; l < nt; ++l) {
            double th = kTwoPi * l / nt;
            cplx va = a.value_at_node(i, j, th);
            vals[node * nt + l] = exponential ? std::exp(va) : va * b.value_at_node(i, j, th);
        }
    }
    SmFunction full = SmFunction::from_theta_samples(a.grid_ptr(), nt, vals, sup);
    return full.with_band(std::min(band_out, full.band()));
}

}  // namespace

SmFunction sm_multiply(const SmFunction& a, const SmFunction& b) {
    if (a.grid_ptr().get() != b.grid_ptr().get()) throw ShapeError("grid mismatch in product");
    return via_theta_grid(a, b, false);
}

SmFunction sm_exp(const SmFunction& u) { return via_theta_grid(u, u, true); }

}  // namespace geotomo
