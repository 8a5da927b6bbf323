#include "geotomo/identities.hpp"

#include <cmath>

namespace geotomo {

namespace {

ResidualReport assemble(const IsothermalSurface& surface, std::string name,
                        std::map<std::string, double> terms) {
    ResidualReport rep;
    rep.identity = std::move(name);
    rep.grid_n = surface.grid().n();
    rep.n_theta = surface.n_theta();
    double sum = 0.0, largest = 0.0;
    for (const auto& [k, v] : terms) {
        sum += v;
        largest = std::max(largest, std::abs(v));
    }
    rep.terms = std::move(terms);
    rep.absolute = std::abs(sum);
    rep.relative = largest > 0.0 ? rep.absolute / largest : 0.0;
    return rep;
}

}  // namespace

ResidualReport pestov_residual(const IsothermalSurface& surface, const SmFunction& u) {
    SmFunction vu = apply_V(u);
    SmFunction xvu = apply_frame_field(FrameField::X, surface, vu);
    SmFunction xu = apply_frame_field(FrameField::X, surface, u);
    SmFunction vxu = apply_V(xu);
    SmFunction kvu = node_field_multiply(surface.curvature(), vu);

    std::map<std::string, double> terms;
    terms["XVu_sq"] = l2_inner_product(surface, xvu, xvu).real();
    terms["-KVu_Vu"] = -l2_inner_product(surface, kvu, vu).real();
    terms["Xu_sq"] = l2_inner_product(surface, xu, xu).real();
    terms["-VXu_sq"] = -l2_inner_product(surface, vxu, vxu).real();
    return assemble(surface, "pestov", std::move(terms));
}

ResidualReport attenuated_pestov_residual(const IsothermalSurface& surface,
                                          const Connection1Form& A, const SmFunction& u) {
    if (!A.purely_imaginary()) throw DomainError("attenuated Pestov identity needs conj(A) = -A");
    SmFunction vu = apply_V(u);
    SmFunction xavu = apply_X_plus_A(surface, A, vu);
    SmFunction xau = apply_X_plus_A(surface, A, u);
    SmFunction vxau = apply_V(xau);
    SmFunction kvu = node_field_multiply(surface.curvature(), vu);
    SmFunction fvu = node_field_multiply(A.star_curvature(), vu);

    std::map<std::string, double> terms;
    terms["XAVu_sq"] = l2_inner_product(surface, xavu, xavu).real();
    terms["-KVu_Vu"] = -l2_inner_product(surface, kvu, vu).real();
    terms["XAu_sq"] = l2_inner_product(surface, xau, xau).real();
    terms["-VXAu_sq"] = -l2_inner_product(surface, vxau, vxau).real();
    double curv_term = l2_inner_product(surface, fvu, u).real();
    terms["FAVu_u"] = curv_term;

    // Fourier form of the same term: sum_k i k (star F_A u_k, u_k)
    cplx fourier = 0.0;
    for (int k = -u.band(); k <= u.band(); ++k) {
        SmFunction uk = u.fourier_project(k);
        SmFunction fuk = node_field_multiply(A.star_curvature(), uk);
        fourier += cplx(0.0, double(k)) * l2_inner_product(surface, fuk, uk);
    }
    ResidualReport rep = assemble(surface, "attenuated_pestov", std::move(terms));
    rep.terms["fourier_gap"] = std::abs(fourier.real() - curv_term);
    return rep;
}

ResidualReport hx_commutator_residual(const IsothermalSurface& surface, const SmFunction& u) {
    SmFunction xu = apply_frame_field(FrameField::X, surface, u);
    SmFunction lhs = xu.hilbert_transform();
    lhs -= apply_frame_field(FrameField::X, surface, u.hilbert_transform());

    SmFunction xperp_u0 = apply_frame_field(FrameField::Xperp, surface, u.fourier_project(0));
    SmFunction xperp_u = apply_frame_field(FrameField::Xperp, surface, u);
    SmFunction rhs = xperp_u0 + xperp_u.fourier_project(0);

    SmFunction diff = lhs - rhs;
    double denom = l2_norm(surface, xu);
    double resid = l2_norm(surface, diff);

    ResidualReport rep;
    rep.identity = "hx_commutator";
    rep.grid_n = surface.grid().n();
    rep.n_theta = surface.n_theta();
    rep.absolute = resid;
    rep.relative = denom > 0.0 ? resid / denom : 0.0;
    rep.terms["lhs_norm"] = l2_norm(surface, lhs);
    rep.terms["rhs_norm"] = l2_norm(surface, rhs);
    return rep;
}

ResidualReport mu_commutator_residual(const IsothermalSurface& surface, const Connection1Form& A,
                                      const SmFunction& u) {
    SmFunction mpmu = mu_op(+1, surface, A, mu_op(-1, surface, A, u));
    SmFunction mmpu = mu_op(-1, surface, A, mu_op(+1, surface, A, u));
    SmFunction lhs = mpmu - mmpu;

    SmFunction kvu = node_field_multiply(surface.curvature(), apply_V(u));
    SmFunction fau = node_field_multiply(A.star_curvature(), u);
    SmFunction rhs = kvu + fau;
    rhs *= cplx(0.0, 0.5);

    SmFunction diff = lhs - rhs;
    // normalize by the largest constituent: the commutator itself cancels
    double denom = std::max({l2_norm(surface, mpmu), l2_norm(surface, mmpu),
                             l2_norm(surface, rhs)});
    double resid = l2_norm(surface, diff);

    ResidualReport rep;
    rep.identity = "mu_commutator";
    rep.grid_n = surface.grid().n();
    rep.n_theta = surface.n_theta();
    rep.absolute = resid;
    rep.relative = denom > 0.0 ? resid / denom : 0.0;
    rep.terms["mu_plus_mu_minus_norm"] = l2_norm(surface, mpmu);
    rep.terms["mu_minus_mu_plus_norm"] = l2_norm(surface, mmpu);
    rep.terms["rhs_norm"] = l2_norm(surface, rhs);
    return rep;
}

ResidualReport ppstar_commutator_residual(const IsothermalSurface& surface, const SmFunction& u) {
    // P = VX, P* = XV
    auto X = [&](const SmFunction& w) { return apply_frame_field(FrameField::X, surface, w); };
    SmFunction pu = apply_V(X(u));
    SmFunction pstar_pu = X(apply_V(pu));
    SmFunction p_pstar_u = apply_V(X(X(apply_V(u))));
    SmFunction lhs = pstar_pu - p_pstar_u;

    SmFunction xxu = X(X(u));
    SmFunction vkvu = apply_V(node_field_multiply(surface.curvature(), apply_V(u)));
    SmFunction rhs = vkvu - xxu;

    SmFunction diff = lhs - rhs;
    double denom = std::max({l2_norm(surface, pstar_pu), l2_norm(surface, p_pstar_u),
                             l2_norm(surface, xxu), l2_norm(surface, vkvu)});
    double resid = l2_norm(surface, diff);

    ResidualReport rep;
    rep.identity = "ppstar_commutator";
    rep.grid_n = surface.grid().n();
    rep.n_theta = surface.n_theta();
    rep.absolute = resid;
    rep.relative = denom > 0.0 ? resid / denom : 0.0;
    rep.terms["pstar_p_norm"] = l2_norm(surface, pstar_pu);
    rep.terms["p_pstar_norm"] = l2_norm(surface, p_pstar_u);
    rep.terms["x2_norm"] = l2_norm(surface, xxu);
    rep.terms["vkv_norm"] = l2_norm(surface, vkvu);
    return rep;
}

double degree_defect(const IsothermalSurface& surface, const SmFunction& f) {
    auto energies = mode_energies(surface, f);
    double out = energies[f.band()];  // ||f_0||^2
    for (int k = 2; k <= f.band(); ++k) {
        double e = energies[k + f.band()] + energies[-k + f.band()];
        out -= double(k * k - 1) * e;
    }
    return out;
}

double positivity_probe(const IsothermalSurface& surface, const Connection1Form* A,
                        const SmFunction& v) {
    SmFunction vv = apply_V(v);
    SmFunction xavv = A != nullptr ? apply_X_plus_A(surface, *A, vv)
                                   : apply_frame_field(FrameField::X, surface, vv);
    SmFunction kvv = node_field_multiply(surface.curvature(), vv);
    return l2_inner_product(surface, xavv, xavv).real() -
           l2_inner_product(surface, kvv, vv).real();
}

SmFunction apply_boundary_cutoff(const IsothermalSurface& surface, const SmFunction& u,
                                 int power) {
    const Grid& g = surface.grid();
    std::vector<double> chi(g.nodes());
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i)
            chi[g.idx(i, j)] = radial_cutoff(std::hypot(g.x(i), g.y(j)), surface.r0(), power);
    return node_field_multiply(chi, u);
}

}  // namespace geotomo
