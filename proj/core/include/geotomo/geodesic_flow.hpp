#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "geotomo/sm_function.hpp"
#include "geotomo/surface.hpp"
#include "geotomo/util.hpp"

namespace geotomo {

struct PhaseState {
    double x = 0.0, y = 0.0;
    double theta = 0.0;  // wrapped to [0, 2pi)
    double t = 0.0;
    bool exited = false;
};

inline double wrap_angle(double th) {
    th = std::fmod(th, kTwoPi);
    return th < 0.0 ? th + kTwoPi : th;
}

// signed angle in (-pi, pi]
inline double wrap_pi(double th) {
    th = std::fmod(th + kPi, kTwoPi);
    if (th <= 0.0) th += kTwoPi;
    return th - kPi;
}

struct RayEnd {
    double tau = 0.0;
    double x = 0.0, y = 0.0, theta = 0.0;
};

struct JacobiResult {
    double exit_time = 0.0;
    double min_b = 0.0;  // min of the Jacobi field over (0, tau]
};

// Fixed-step RK4 integrator for the geodesic equations in the angle form
//   x' = e^{-lambda} cos theta, y' = e^{-lambda} sin theta,
//   theta' = e^{-lambda} (-lambda_x sin theta + lambda_y cos theta),
// with bisection onto the exit circle.
class GeodesicTracer {
  public:
    explicit GeodesicTracer(const IsothermalSurface& surface, double ht = 0.0)
        : s_(surface), ht_(ht > 0.0 ? ht : surface.ht()) {}

    double ht() const { return ht_; }

    // advance for a fixed duration (no exit handling); throws if the point
    // leaves the computational square
    PhaseState flow(const PhaseState& st, double duration) const;

    // time to exit the disk; 0 for outflow boundary states
    double exit_time(double x, double y, double theta) const;

    RayEnd trace_to_exit(double x, double y, double theta) const;

    // ray integral of f along the geodesic through (x, y, theta) until exit;
    // the accumulator rides in the RK4 system, so the quadrature is fourth
    // order. F: cplx(double x, double y, double theta).
    template <typename F>
    RayEnd integrate(double x, double y, double theta, F&& f, cplx& integral) const;

    JacobiResult trace_with_jacobi(double x, double y, double theta) const;

  private:
    const IsothermalSurface& s_;
    double ht_;

    struct Deriv {
        double dx, dy, dth;
    };
    Deriv rhs(double x, double y, double theta) const {
        double l = s_.lambda(x, y);
        double lx = s_.lambda_x(x, y);
        double ly = s_.lambda_y(x, y);
        double e = std::exp(-l);
        double c = std::cos(theta), sn = std::sin(theta);
        return {e * c, e * sn, e * (-lx * sn + ly * c)};
    }

    template <typename State, typename Rhs>
    static State rk4_step(const State& y0, double h, Rhs&& deriv);

    void check_square(double x, double y) const {
        double hw = s_.grid().half_width();
        if (std::abs(x) > hw || std::abs(y) > hw)
            throw NumericError("geodesic left the computational square", std::hypot(x, y));
    }
};

// ---------------------------------------------------------------------------
// Fan-beam parametrization of the influx boundary: uniform beta, open
// Gauss-Legendre alpha in (-pi/2, pi/2) measured from the inward normal.
class FanBeamGrid {
  public:
    FanBeamGrid(double r0, int n_beta, int n_alpha);

    int n_beta() const { return n_beta_; }
    int n_alpha() const { return n_alpha_; }
    double r0() const { return r0_; }
    std::size_t size() const { return std::size_t(n_beta_) * n_alpha_; }

    double beta(int ib) const { return kTwoPi * ib / n_beta_; }
    double alpha(int ia) const { return alpha_[ia]; }
    double weight(std::size_t s) const { return (kTwoPi / n_beta_) * w_alpha_[s % n_alpha_]; }
    std::size_t index(int ib, int ia) const { return std::size_t(ib) * n_alpha_ + ia; }

    // influx phase point of sample s: position on the circle, direction
    // beta + pi + alpha
    PhaseState sample_state(std::size_t s) const;

    // bilinear interpolation stencil at (beta, alpha): 4 sample indices and
    // weights; beta periodic, alpha clamped to the node range
    void stencil(double beta, double alpha, std::size_t idx[4], double w[4]) const;

    std::vector<double> alphas() const { return alpha_; }

  private:
    double r0_;
    int n_beta_, n_alpha_;
    std::vector<double> alpha_, w_alpha_;
};

FanBeamGrid fan_beam_grid(const IsothermalSurface& surface, int n_beta, int n_alpha);

// ---------------------------------------------------------------------------
// Backtrace cache: for every inside node and fiber angle, the influx
// coordinates (beta, alpha) of the geodesic through that phase point. Serves
// the invariant extension (bilinear in the fan grid, or a smooth closed form
// evaluated directly), I_0^* and its adjoint.
class InfluxMap {
  public:
    InfluxMap(const IsothermalSurface& surface, const FanBeamGrid& fan, int jobs = 0);

    const IsothermalSurface& surface() const { return s_; }
    const FanBeamGrid& fan() const { return fan_; }
    int n_theta() const { return nt_; }

    // h_psi(x,v) = h(entry point of the geodesic through (x,v)), bilinear
    SmFunction extend(const std::vector<cplx>& boundary_values) const;

    // same extension for boundary data given in closed form
    SmFunction extend_eval(const std::function<cplx(double, double)>& h) const;

    // I_0^* h at inside nodes (band-0 disk function): fiber average times 2pi
    SmFunction backproject(const std::vector<cplx>& boundary_values) const;

    // adjoint of backproject: scatter node values into beam slots
    std::vector<cplx> backproject_adjoint(const std::vector<cplx>& node_values) const;

  private:
    const IsothermalSurface& s_;
    FanBeamGrid fan_;
    int nt_;
    std::vector<double> beta_, alpha_;  // per (inside node, theta)
    std::vector<std::size_t> rows_;     // inside node list (grid node index)
};

}  // namespace geotomo

// ---------------------------------------------------------------------------
// template bodies

namespace geotomo {

template <typename State, typename Rhs>
State GeodesicTracer::rk4_step(const State& y0, double h, Rhs&& deriv) {
    State k1 = deriv(y0);
    State y1;
    for (std::size_t i = 0; i < y0.size(); ++i) y1[i] = y0[i] + 0.5 * h * k1[i];
    State k2 = deriv(y1);
    for (std::size_t i = 0; i < y0.size(); ++i) y1[i] = y0[i] + 0.5 * h * k2[i];
    State k3 = deriv(y1);
    for (std::size_t i = 0; i < y0.size(); ++i) y1[i] = y0[i] + h * k3[i];
    State k4 = deriv(y1);
    for (std::size_t i = 0; i < y0.size(); ++i)
        y1[i] = y0[i] + (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    return y1;
}

template <typename F>
RayEnd GeodesicTracer::integrate(double x, double y, double theta, F&& f, cplx& integral) const {
    using State = std::array<double, 5>;  // x, y, theta, re I, im I
    auto deriv = [&](const State& s) -> State {
        Deriv d = rhs(s[0], s[1], s[2]);
        cplx v = f(s[0], s[1], s[2]);
        return {d.dx, d.dy, d.dth, v.real(), v.imag()};
    };

    const double r2 = s_.r0() * s_.r0();
    auto outside = [&](const State& s) { return s[0] * s[0] + s[1] * s[1] > r2 * (1.0 + 1e-14); };

    State cur{x, y, wrap_angle(theta), 0.0, 0.0};
    double t = 0.0;
    if (outside(cur)) throw DomainError("ray start outside the disk");

    for (;;) {
        State nxt = rk4_step(cur, ht_, deriv);
        if (outside(nxt)) {
            // bisect the step length onto the circle
            double lo = 0.0, hi = ht_;
            State hit = nxt;
            for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                double mid = 0.5 * (lo + hi);
                State trial = rk4_step(cur, mid, deriv);
                if (outside(trial)) {
                    hi = mid;
                    hit = trial;
                } else {
                    lo = mid;
                    hit = trial;
                }
            }
            t += 0.5 * (lo + hi);
            integral = cplx(hit[3], hit[4]);
            return {t, hit[0], hit[1], wrap_angle(hit[2])};
        }
        cur = nxt;
        t += ht_;
        check_square(cur[0], cur[1]);
        if (t > s_.t_max())
            throw NontrappingError("geodesic exceeded T_max; surface may be trapping");
    }
}

}  // namespace geotomo
