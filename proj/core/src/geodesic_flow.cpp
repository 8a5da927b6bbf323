#include "geotomo/geodesic_flow.hpp"

#include <algorithm>

namespace geotomo {

PhaseState GeodesicTracer::flow(const PhaseState& st, double duration) const {
    using State = std::array<double, 3>;
    auto deriv = [&](const State& s) -> State {
        Deriv d = rhs(s[0], s[1], s[2]);
        return {d.dx, d.dy, d.dth};
    };
    State cur{st.x, st.y, st.theta};
    double remaining = std::abs(duration);
    double dir = duration >= 0.0 ? 1.0 : -1.0;
    while (remaining > 0.0) {
        double h = std::min(ht_, remaining);
        cur = rk4_step(cur, dir * h, deriv);
        remaining -= h;
        check_square(cur[0], cur[1]);
    }
    PhaseState out;
    out.x = cur[0];
    out.y = cur[1];
    out.theta = wrap_angle(cur[2]);
    out.t = st.t + duration;
    out.exited = !s_.contains(out.x, out.y);
    return out;
}

RayEnd GeodesicTracer::trace_to_exit(double x, double y, double theta) const {
    cplx dummy;
    return integrate(x, y, theta, [](double, double, double) { return cplx(0.0); }, dummy);
}

double GeodesicTracer::exit_time(double x, double y, double theta) const {
    double r = std::hypot(x, y);
    if (r > s_.r0() * (1.0 + 1e-12)) throw DomainError("exit_time: start outside the disk");
    if (r >= s_.r0() * (1.0 - 1e-12)) {
        // boundary state: outflow means instant exit
        double dot = std::cos(theta) * x + std::sin(theta) * y;
        if (dot > 0.0) return 0.0;
    }
    return trace_to_exit(x, y, theta).tau;
}

JacobiResult GeodesicTracer::trace_with_jacobi(double x, double y, double theta) const {
    // b'' + K b = 0 along the ray, b(0) = 0, b'(0) = 1
    using State = std::array<double, 5>;  // x, y, theta, b, b'
    auto deriv = [&](const State& s) -> State {
        Deriv d = rhs(s[0], s[1], s[2]);
        double K = -std::exp(-2.0 * s_.lambda(s[0], s[1])) *
                   (s_.lambda_field().fxx(s[0], s[1]) + s_.lambda_field().fyy(s[0], s[1]));
        return {d.dx, d.dy, d.dth, s[4], -K * s[3]};
    };
    const double r2 = s_.r0() * s_.r0();
    auto outside = [&](const State& s) { return s[0] * s[0] + s[1] * s[1] > r2 * (1.0 + 1e-14); };

    State cur{x, y, wrap_angle(theta), 0.0, 1.0};
    double t = 0.0;
    double min_b = 1e300;
    for (;;) {
        State nxt = rk4_step(cur, ht_, deriv);
        if (outside(nxt)) {
            double lo = 0.0, hi = ht_;
            State hit = nxt;
            for (int it = 0; it < 50 && hi - lo > 1e-12; ++it) {
                double mid = 0.5 * (lo + hi);
                State trial = rk4_step(cur, mid, deriv);
                (outside(trial) ? hi : lo) = mid;
                hit = trial;
            }
            t += 0.5 * (lo + hi);
            min_b = std::min(min_b, hit[3]);
            return {t, min_b};
        }
        cur = nxt;
        t += ht_;
        min_b = std::min(min_b, cur[3]);
        check_square(cur[0], cur[1]);
        if (t > s_.t_max())
            throw NontrappingError("geodesic exceeded T_max; surface may be trapping");
    }
}

// ---------------------------------------------------------------------------

FanBeamGrid::FanBeamGrid(double r0, int n_beta, int n_alpha)
    : r0_(r0), n_beta_(n_beta), n_alpha_(n_alpha) {
    if (n_beta < 1 || n_alpha < 1) throw ConfigError("fan grid counts must be >= 1");
    std::vector<double> gx, gw;
    gauss_legendre(n_alpha, gx, gw);
    alpha_.resize(n_alpha);
    w_alpha_.resize(n_alpha);
    for (int i = 0; i < n_alpha; ++i) {
        alpha_[i] = 0.5 * kPi * gx[i];
        w_alpha_[i] = 0.5 * kPi * gw[i];
    }
}

PhaseState FanBeamGrid::sample_state(std::size_t s) const {
    int ib = int(s / n_alpha_);
    int ia = int(s % n_alpha_);
    double b = beta(ib);
    PhaseState ps;
    ps.x = r0_ * std::cos(b);
    ps.y = r0_ * std::sin(b);
    ps.theta = wrap_angle(b + kPi + alpha_[ia]);
    return ps;
}

void FanBeamGrid::stencil(double b, double a, std::size_t idx[4], double w[4]) const {
    // beta: uniform periodic
    double db = kTwoPi / n_beta_;
    double fb = wrap_angle(b) / db;
    int ib0 = int(std::floor(fb)) % n_beta_;
    int ib1 = (ib0 + 1) % n_beta_;
    double tb = fb - std::floor(fb);

    // alpha: non-uniform open grid, clamped at the ends
    int ia0 = 0;
    double ta = 0.0;
    if (a <= alpha_.front()) {
        ia0 = 0;
        ta = 0.0;
    } else if (a >= alpha_.back()) {
        ia0 = n_alpha_ >= 2 ? n_alpha_ - 2 : 0;
        ta = n_alpha_ >= 2 ? 1.0 : 0.0;
    } else {
        ia0 = int(std::upper_bound(alpha_.begin(), alpha_.end(), a) - alpha_.begin()) - 1;
        ia0 = std::clamp(ia0, 0, n_alpha_ - 2);
        ta = (a - alpha_[ia0]) / (alpha_[ia0 + 1] - alpha_[ia0]);
    }
    int ia1 = std::min(ia0 + 1, n_alpha_ - 1);

    idx[0] = index(ib0, ia0);
    idx[1] = index(ib1, ia0);
    idx[2] = index(ib0, ia1);
    idx[3] = index(ib1, ia1);
    w[0] = (1 - tb) * (1 - ta);
    w[1] = tb * (1 - ta);
    w[2] = (1 - tb) * ta;
    w[3] = tb * ta;
}

FanBeamGrid fan_beam_grid(const IsothermalSurface& surface, int n_beta, int n_alpha) {
    return FanBeamGrid(surface.r0(), n_beta, n_alpha);
}

// ---------------------------------------------------------------------------

InfluxMap::InfluxMap(const IsothermalSurface& surface, const FanBeamGrid& fan, int jobs)
    : s_(surface), fan_(fan), nt_(surface.n_theta()) {
    rows_ = surface.grid().inside_nodes();
    beta_.assign(rows_.size() * nt_, 0.0);
    alpha_.assign(rows_.size() * nt_, 0.0);

    const Grid& g = surface.grid();
    GeodesicTracer tracer(surface);
    parallel_for(
        std::int64_t(rows_.size()),
        [&](std::int64_t lo, std::int64_t hi, int) {
            for (std::int64_t r = lo; r < hi; ++r) {
                std::size_t node = rows_[r];
                int i = int(node % g.n());
                int j = int(node / g.n());
                double x = g.x(i), y = g.y(j);
                for (int l = 0; l < nt_; ++l) {
                    double th = kTwoPi * l / nt_;
                    // flow backwards: trace the reversed direction to its exit
                    RayEnd e = tracer.trace_to_exit(x, y, wrap_angle(th + kPi));
                    double beta = std::atan2(e.y, e.x);
                    double alpha = wrap_pi(e.theta - beta);  // entry dir = e.theta + pi
                    alpha = std::clamp(alpha, -kPi / 2, kPi / 2);
                    beta_[std::size_t(r) * nt_ + l] = beta;
                    alpha_[std::size_t(r) * nt_ + l] = alpha;
                }
            }
        },
        jobs);
}

SmFunction InfluxMap::extend(const std::vector<cplx>& h) const {
    if (h.size() != fan_.size()) throw ShapeError("boundary data size mismatch");
    const Grid& g = s_.grid();
    std::vector<cplx> vals(g.nodes() * std::size_t(nt_), cplx(0.0));
    std::size_t idx[4];
    double w[4];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        std::size_t node = rows_[r];
        for (int l = 0; l < nt_; ++l) {
            fan_.stencil(beta_[r * nt_ + l], alpha_[r * nt_ + l], idx, w);
            cplx acc = 0.0;
            for (int q = 0; q < 4; ++q) acc += w[q] * h[idx[q]];
            vals[node * nt_ + l] = acc;
        }
    }
    return SmFunction::from_theta_samples(s_.grid_ptr(), nt_, vals, Support::Disk);
}

SmFunction InfluxMap::extend_eval(const std::function<cplx(double, double)>& h) const {
    const Grid& g = s_.grid();
    std::vector<cplx> vals(g.nodes() * std::size_t(nt_), cplx(0.0));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        std::size_t node = rows_[r];
        for (int l = 0; l < nt_; ++l)
            vals[node * nt_ + l] = h(beta_[r * nt_ + l], alpha_[r * nt_ + l]);
    }
    return SmFunction::from_theta_samples(s_.grid_ptr(), nt_, vals, Support::Disk);
}

SmFunction InfluxMap::backproject(const std::vector<cplx>& h) const {
    if (h.size() != fan_.size()) throw ShapeError("boundary data size mismatch");
    SmFunction out(s_.grid_ptr(), 0, Support::Disk, Parity::Even, false);
    cplx* m0 = out.mode(0);
    std::size_t idx[4];
    double w[4];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        cplx acc = 0.0;
        for (int l = 0; l < nt_; ++l) {
            fan_.stencil(beta_[r * nt_ + l], alpha_[r * nt_ + l], idx, w);
            for (int q = 0; q < 4; ++q) acc += w[q] * h[idx[q]];
        }
        m0[rows_[r]] = acc * (kTwoPi / nt_);
    }
    return out;
}

std::vector<cplx> InfluxMap::backproject_adjoint(const std::vector<cplx>& node_values) const {
    if (node_values.size() != s_.grid().nodes()) throw ShapeError("node value size mismatch");
    std::vector<cplx> out(fan_.size(), cplx(0.0));
    std::size_t idx[4];
    double w[4];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        cplx v = node_values[rows_[r]] * (kTwoPi / nt_);
        if (v == 0.0) continue;
        for (int l = 0; l < nt_; ++l) {
            fan_.stencil(beta_[r * nt_ + l], alpha_[r * nt_ + l], idx, w);
            for (int q = 0; q < 4; ++q) out[idx[q]] += w[q] * v;
        }
    }
    return out;
}

}  // namespace geotomo
