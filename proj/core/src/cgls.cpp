#include "geotomo/cgls.hpp"

#include <cmath>

namespace geotomo {

namespace {
double norm2(const CplxVec& v) {
    double acc = 0.0;
    for (const auto& c : v) acc += std::norm(c);
    return acc;
}
}  // namespace

CglsResult cgls(const std::function<void(const CplxVec&, CplxVec&)>& apply_a,
                const std::function<void(const CplxVec&, CplxVec&)>& apply_at,
                const CplxVec& b, CplxVec& x, const CglsOptions& opt) {
    const double reg = opt.regularization;
    CplxVec r(b.size()), q(b.size()), s(x.size()), p(x.size()), tmp(x.size());

    apply_a(x, q);
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - q[i];
    apply_at(r, s);
    if (reg > 0.0)
        for (std::size_t i = 0; i < x.size(); ++i) s[i] -= reg * x[i];
    p = s;
    double gamma = norm2(s);
    const double gamma0 = gamma;
    const double b_norm = std::sqrt(norm2(b));

    CglsResult res;
    if (gamma0 == 0.0 || b_norm == 0.0) {
        res.converged = true;
        return res;
    }

    // convergence on the backward error ||A^T r|| <= tol sigma ||r||, with
    // sigma estimated from the Rayleigh quotients seen so far; the plain
    // gamma/gamma0 test is useless when b is nearly orthogonal to range(A)
    double sigma2 = 0.0;
    const double tol2 = opt.tolerance * opt.tolerance;
    auto done = [&]() {
        double floor = std::max(gamma0 * tol2, sigma2 * norm2(r) * tol2);
        return gamma <= floor && sigma2 > 0.0;
    };

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (done()) break;
        apply_a(p, q);
        double q2 = norm2(q), p2 = norm2(p);
        if (p2 > 0.0) sigma2 = std::max(sigma2, q2 / p2);
        double delta = q2 + reg * p2;
        if (delta <= 0.0) break;
        double alpha = gamma / delta;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * q[i];
        apply_at(r, s);
        if (reg > 0.0)
            for (std::size_t i = 0; i < x.size(); ++i) s[i] -= reg * x[i];
        double gamma_new = norm2(s);
        double beta = gamma_new / gamma;
        gamma = gamma_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = s[i] + beta * p[i];
    }

    res.iterations = it;
    res.normal_residual = std::sqrt(gamma / gamma0);
    double r2 = norm2(r);
    res.backward_error = sigma2 > 0.0 && r2 > 0.0 ? std::sqrt(gamma / (sigma2 * r2)) : 0.0;
    res.relative_residual = std::sqrt(r2) / b_norm;
    res.converged = done() || it < opt.max_iterations;
    return res;
}

double power_estimate_norm(const std::function<void(const CplxVec&, CplxVec&)>& apply_a,
                           const std::function<void(const CplxVec&, CplxVec&)>& apply_at,
                           std::size_t nx, std::size_t ny, int iterations, std::uint64_t seed) {
    Rng rng(seed);
    CplxVec x(nx), y(ny);
    for (auto& v : x) v = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    double sigma = 0.0;
    for (int it = 0; it < iterations; ++it) {
        double nx2 = std::sqrt(norm2(x));
        if (nx2 == 0.0) return 0.0;
        for (auto& v : x) v /= nx2;
        apply_a(x, y);
        sigma = std::sqrt(norm2(y));
        apply_at(y, x);
    }
    return sigma;
}

}  // namespace geotomo
