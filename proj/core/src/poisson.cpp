#include "geotomo/poisson.hpp"

#include <cmath>

namespace geotomo {

PolarField::PolarField(double r0, int nr, int max_mode)
    : r0_(r0), dr_(r0 / nr), nr_(nr), max_mode_(max_mode) {
    data_.assign(std::size_t(2 * max_mode + 1) * nr, cplx(0.0));
}

cplx PolarField::radial_eval(int n, double r) const {
    const cplx* m = mode(n);
    double rc0 = ring_r(0);
    if (r <= rc0) {
        if (n == 0) {
            // even extension: u = a + b r^2 through the first two rings
            double r1 = ring_r(1);
            cplx b = (m[1] - m[0]) / (r1 * r1 - rc0 * rc0);
            return m[0] + b * (r * r - rc0 * rc0);
        }
        double p = std::min(std::abs(n), 3);
        return m[0] * std::pow(r / rc0, p);
    }
    double f = r / dr_ - 0.5;
    int i = int(std::floor(f));
    if (i >= nr_ - 1) {
        // extend past the last ring center with the final slope
        cplx slope = (m[nr_ - 1] - m[nr_ - 2]) / dr_;
        return m[nr_ - 1] + slope * (r - ring_r(nr_ - 1));
    }
    double t = f - i;
    return (1.0 - t) * m[i] + t * m[i + 1];
}

cplx PolarField::radial_deriv(int n, double r) const {
    const cplx* m = mode(n);
    if (nr_ < 3) return 0.0;
    if (r < ring_r(0)) {
        if (n == 0) {
            double rc0 = ring_r(0), r1 = ring_r(1);
            cplx b = (m[1] - m[0]) / (r1 * r1 - rc0 * rc0);
            return 2.0 * b * r;
        }
        return (m[1] - m[0]) / dr_ * std::pow(r / ring_r(0), std::min(std::abs(n) - 1, 2));
    }
    // slopes live at half-points r = (j+1) dr; interpolate between them
    auto half_slope = [&](int j) { return (m[j + 1] - m[j]) / dr_; };
    double f = r / dr_ - 1.0;
    int j = std::clamp(int(std::floor(f)), 0, nr_ - 2);
    double t = std::clamp(f - j, 0.0, 1.0);
    if (j >= nr_ - 2) return half_slope(nr_ - 2);
    return (1.0 - t) * half_slope(j) + t * half_slope(j + 1);
}

cplx PolarField::value(double x, double y) const {
    double r = std::hypot(x, y);
    double psi = std::atan2(y, x);
    cplx acc = radial_eval(0, r);
    for (int n = 1; n <= max_mode_; ++n) {
        cplx e = std::polar(1.0, n * psi);
        acc += radial_eval(n, r) * e + radial_eval(-n, r) * std::conj(e);
    }
    return acc;
}

void PolarField::gradient(double x, double y, cplx& gx, cplx& gy) const {
    double r = std::hypot(x, y);
    double psi = std::atan2(y, x);
    if (r < 1e-12) {
        // du/dx + i du/dy is carried by the n = +/-1 modes at the center
        cplx up = radial_deriv(1, ring_r(0));
        cplx um = radial_deriv(-1, ring_r(0));
        gx = up + um;
        gy = cplx(0, 1) * (up - um);
        return;
    }
    cplx ur = 0.0, upsi = 0.0;
    for (int n = -max_mode_; n <= max_mode_; ++n) {
        cplx e = std::polar(1.0, n * psi);
        ur += radial_deriv(n, r) * e;
        upsi += cplx(0.0, double(n)) * radial_eval(n, r) * e;
    }
    double c = std::cos(psi), s = std::sin(psi);
    gx = c * ur - s * upsi / r;
    gy = s * ur + c * upsi / r;
}

namespace {

// angular DFT of rhs sampled on the polar grid; fills q[n][ring]
std::vector<std::vector<cplx>> angular_modes(const std::function<cplx(double, double)>& f,
                                             double r0, int nr, int npsi, int max_mode) {
    double dr = r0 / nr;
    std::vector<std::vector<cplx>> q(2 * max_mode + 1, std::vector<cplx>(nr, cplx(0.0)));
    std::vector<cplx> ring(npsi);
    for (int i = 0; i < nr; ++i) {
        double r = (i + 0.5) * dr;
        for (int j = 0; j < npsi; ++j) {
            double psi = kTwoPi * j / npsi;
            ring[j] = f(r * std::cos(psi), r * std::sin(psi));
        }
        for (int n = -max_mode; n <= max_mode; ++n) {
            cplx acc = 0.0;
            for (int j = 0; j < npsi; ++j)
                acc += ring[j] * std::polar(1.0, -kTwoPi * n * j / npsi);
            q[n + max_mode][i] = acc / double(npsi);
        }
    }
    return q;
}

// radial tridiagonal for mode n; dirichlet: u(r0) = 0, else flux = fluxbc
void radial_solve(std::vector<cplx>& rhs, int n, double dr, bool dirichlet, cplx fluxbc) {
    const int nr = int(rhs.size());
    std::vector<double> a(nr, 0.0), b(nr, 0.0), c(nr, 0.0);
    for (int i = 0; i < nr; ++i) {
        double ri = (i + 0.5) * dr;
        double rm = i * dr, rp = (i + 1) * dr;
        double diag = -(rm + rp) / (ri * dr * dr) - double(n) * double(n) / (ri * ri);
        if (i > 0) a[i] = rm / (ri * dr * dr);
        if (i < nr - 1) c[i] = rp / (ri * dr * dr);
        b[i] = diag;
        if (i == nr - 1) {
            if (dirichlet) {
                // ghost: (u_g + u_{nr-1})/2 = 0
                b[i] -= rp / (ri * dr * dr);
            } else {
                // prescribed flux r0 u'(r0): cancel the rp coupling, move to rhs
                b[i] += rp / (ri * dr * dr);
                rhs[i] -= fluxbc / (ri * dr);
            }
        }
    }
    solve_tridiagonal(a, b, c, rhs);
}

}  // namespace

PolarField solve_poisson_dirichlet(const std::function<cplx(double, double)>& rhs, double r0,
                                   int nr, int npsi) {
    int max_mode = npsi / 2 - 1;
    auto q = angular_modes(rhs, r0, nr, npsi, max_mode);
    PolarField u(r0, nr, max_mode);
    double dr = r0 / nr;
    for (int n = -max_mode; n <= max_mode; ++n) {
        std::vector<cplx> col = q[n + max_mode];
        radial_solve(col, n, dr, true, 0.0);
        std::copy(col.begin(), col.end(), u.mode(n));
    }
    return u;
}

PolarField solve_poisson_neumann(const std::function<cplx(double, double)>& rhs,
                                 const std::function<cplx(double)>& neumann, double r0, int nr,
                                 int npsi) {
    int max_mode = npsi / 2 - 1;
    auto q = angular_modes(rhs, r0, nr, npsi, max_mode);

    // angular modes of the boundary flux r0 * g(psi)
    std::vector<cplx> gmod(2 * max_mode + 1, cplx(0.0));
    for (int n = -max_mode; n <= max_mode; ++n) {
        cplx acc = 0.0;
        for (int j = 0; j < npsi; ++j)
            acc += neumann(kTwoPi * j / npsi) * std::polar(1.0, -kTwoPi * n * j / npsi);
        gmod[n + max_mode] = acc * r0 / double(npsi);
    }

    PolarField u(r0, nr, max_mode);
    double dr = r0 / nr;
    for (int n = -max_mode; n <= max_mode; ++n) {
        std::vector<cplx> col = q[n + max_mode];
        if (n == 0) {
            // compatibility: sum r_i q_i dr must equal the boundary flux
            cplx mass = 0.0;
            double area = 0.0;
            for (int i = 0; i < nr; ++i) {
                double ri = (i + 0.5) * dr;
                mass += ri * dr * col[i];
                area += ri * dr;
            }
            cplx defect = (mass - gmod[max_mode]) / area;
            for (auto& v : col) v -= defect;
            // pin the first ring; the consistent system then has full rank
            std::vector<double> a(nr, 0.0), b(nr, 0.0), c(nr, 0.0);
            for (int i = 0; i < nr; ++i) {
                double ri = (i + 0.5) * dr;
                double rm = i * dr, rp = (i + 1) * dr;
                if (i > 0) a[i] = rm / (ri * dr * dr);
                if (i < nr - 1) c[i] = rp / (ri * dr * dr);
                b[i] = -(rm + rp) / (ri * dr * dr);
                if (i == nr - 1) {
                    b[i] += rp / (ri * dr * dr);
                    col[i] -= gmod[max_mode] / (ri * dr);
                }
            }
            b[0] = 1.0;
            c[0] = 0.0;
            col[0] = 0.0;
            solve_tridiagonal(a, b, c, col);
            // gauge: zero area mean
            cplx mean = 0.0;
            for (int i = 0; i < nr; ++i) mean += (i + 0.5) * dr * dr * col[i];
            mean /= 0.5 * r0 * r0;
            for (auto& v : col) v -= mean;
        } else {
            radial_solve(col, n, dr, false, gmod[n + max_mode]);
        }
        std::copy(col.begin(), col.end(), u.mode(n));
    }
    return u;
}

}  // namespace geotomo
