#include "geotomo/connection.hpp"

namespace geotomo {

Connection1Form::Connection1Form(SurfacePtr surface, ComplexField a1, ComplexField a2)
    : surface_(std::move(surface)), a1_(std::move(a1)), a2_(std::move(a2)) {
    const Grid& g = surface_->grid();
    const auto& enl = surface_->exp_neg_lam();
    a_plus_.resize(g.nodes());
    a_minus_.resize(g.nodes());
    star_fa_.resize(g.nodes());
    double max_re = 0.0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            std::size_t s = g.idx(i, j);
            double x = g.x(i), y = g.y(j);
            cplx c1 = a1_.value(x, y), c2 = a2_.value(x, y);
            a_plus_[s] = 0.5 * enl[s] * (c1 - cplx(0, 1) * c2);
            a_minus_[s] = 0.5 * enl[s] * (c1 + cplx(0, 1) * c2);
            star_fa_[s] = enl[s] * enl[s] * (a2_.dx(x, y) - a1_.dy(x, y));
            if (g.inside(s)) max_re = std::max(max_re, std::max(std::abs(c1.real()), std::abs(c2.real())));
        }
    purely_imaginary_ = max_re <= 1e-12;
}

SmFunction Connection1Form::restriction() const {
    SmFunction out(surface_->grid_ptr(), 1, Support::Ambient, Parity::Odd, false);
    std::copy(a_plus_.begin(), a_plus_.end(), out.mode(1));
    std::copy(a_minus_.begin(), a_minus_.end(), out.mode(-1));
    return out;
}

Connection1Form Connection1Form::area_form_attenuation(SurfacePtr surface, double s) {
    auto phi = std::make_shared<AreaFormPrimitive>(area_form_primitive(*surface));
    ScalarField a1im, a2im;
    // A = i s rho (x dy - y dx): A1 = -i s rho y, A2 = i s rho x
    a1im.f = [phi, s](double x, double y) { return -s * phi->rho(x, y) * y; };
    a1im.fx = [phi, s](double x, double y) {
        double gx, gy;
        phi->rho_grad(x, y, gx, gy);
        return -s * gx * y;
    };
    a1im.fy = [phi, s](double x, double y) {
        double gx, gy;
        phi->rho_grad(x, y, gx, gy);
        return -s * (gy * y + phi->rho(x, y));
    };
    a2im.f = [phi, s](double x, double y) { return s * phi->rho(x, y) * x; };
    a2im.fx = [phi, s](double x, double y) {
        double gx, gy;
        phi->rho_grad(x, y, gx, gy);
        return s * (gx * x + phi->rho(x, y));
    };
    a2im.fy = [phi, s](double x, double y) {
        double gx, gy;
        phi->rho_grad(x, y, gx, gy);
        return s * gy * x;
    };
    auto z = [](double, double) { return 0.0; };
    a1im.fxx = a1im.fxy = a1im.fyy = z;
    a2im.fxx = a2im.fxy = a2im.fyy = z;
    a1im.analytic = a2im.analytic = true;
    return Connection1Form(surface, ComplexField::purely_imaginary(a1im),
                           ComplexField::purely_imaginary(a2im));
}

Connection1Form Connection1Form::levi_civita(SurfacePtr surface, int m) {
    if (m < 1) throw DomainError("levi_civita connection needs m >= 1");
    auto lam = std::make_shared<ScalarField>(surface->lambda_field());
    ScalarField a1im, a2im;
    a1im.f = [lam, m](double x, double y) { return -m * lam->fy(x, y); };
    a1im.fx = [lam, m](double x, double y) { return -m * lam->fxy(x, y); };
    a1im.fy = [lam, m](double x, double y) { return -m * lam->fyy(x, y); };
    a2im.f = [lam, m](double x, double y) { return m * lam->fx(x, y); };
    a2im.fx = [lam, m](double x, double y) { return m * lam->fxx(x, y); };
    a2im.fy = [lam, m](double x, double y) { return m * lam->fxy(x, y); };
    auto z = [](double, double) { return 0.0; };
    a1im.fxx = a1im.fxy = a1im.fyy = z;
    a2im.fxx = a2im.fxy = a2im.fyy = z;
    a1im.analytic = a2im.analytic = true;
    return Connection1Form(surface, ComplexField::purely_imaginary(a1im),
                           ComplexField::purely_imaginary(a2im));
}

Connection1Form Connection1Form::zero(SurfacePtr surface) {
    return Connection1Form(std::move(surface), ComplexField::zero(), ComplexField::zero());
}

}  // namespace geotomo
