#pragma once

#include <memory>
#include <vector>

#include "geotomo/grid.hpp"
#include "geotomo/scalar_field.hpp"
#include "geotomo/util.hpp"

namespace geotomo {

// Boundary circle r = r0 of the working disk, with the metric-unit outer
// normal and the geodesic curvature k_g = e^{-lambda} (1/r0 + dlambda/dr).
struct BoundaryCurve {
    double r0 = 1.0;
    std::vector<double> beta;       // arc parameter samples in [0, 2pi)
    std::vector<double> kg;         // geodesic curvature at each sample
    bool strictly_convex = false;   // min kg > 0

    // position and g-unit outer normal at parameter b
    void point(double b, double& x, double& y) const {
        x = r0 * std::cos(b);
        y = r0 * std::sin(b);
    }
};

struct SimplicityReport {
    bool convex = false;
    bool nontrapping = false;
    bool no_conjugate_points = false;
    double min_kg = 0.0;
    double max_exit_time = 0.0;
    double min_jacobi = 0.0;  // min of b(t) over (0, tau] across sampled rays
    bool simple() const { return convex && nontrapping && no_conjugate_points; }
};

// Disk-type surface with metric e^{2 lambda} (dx^2 + dy^2) in isothermal
// coordinates, discretized on a square grid. Immutable after construction.
class IsothermalSurface {
  public:
    struct Params {
        int n = 64;               // grid nodes per side
        int n_theta = 64;         // fiber sample count (even)
        double half_width = 1.1;  // computational square half-width
        double r0 = 1.0;
        double ht = 0.0;          // integrator step; 0 = choose from lambda
        double tmax_factor = 10.0;
    };

    IsothermalSurface(ScalarField lambda, const Params& p);

    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    int n_theta() const { return n_theta_; }
    double r0() const { return grid_->r0(); }
    const ScalarField& lambda_field() const { return lambda_; }

    double lambda(double x, double y) const { return lambda_.f(x, y); }
    double lambda_x(double x, double y) const { return lambda_.fx(x, y); }
    double lambda_y(double x, double y) const { return lambda_.fy(x, y); }

    // Gaussian curvature K = -e^{-2 lambda} (lambda_xx + lambda_yy).
    // Throws DomainError outside the closed disk.
    double gaussian_curvature(double x, double y) const;

    // node arrays, indexed like Grid
    const std::vector<double>& lam() const { return lam_; }
    const std::vector<double>& lam_x() const { return lam_x_; }
    const std::vector<double>& lam_y() const { return lam_y_; }
    const std::vector<double>& exp_lam() const { return exp_lam_; }
    const std::vector<double>& exp_neg_lam() const { return exp_neg_lam_; }
    const std::vector<double>& exp_2lam() const { return exp_2lam_; }
    const std::vector<double>& curvature() const { return curv_; }

    const BoundaryCurve& boundary() const { return boundary_; }

    double ht() const { return ht_; }
    double t_max() const { return t_max_; }

    bool contains(double x, double y, double slack = 0.0) const {
        double r = r0() + slack;
        return x * x + y * y <= r * r;
    }

    // the three closed-form families used throughout the tests
    static std::shared_ptr<IsothermalSurface> euclidean(const Params& p);
    static std::shared_ptr<IsothermalSurface> constant_curvature(double K, const Params& p);

  private:
    ScalarField lambda_;
    GridPtr grid_;
    int n_theta_;
    double ht_, t_max_;
    std::vector<double> lam_, lam_x_, lam_y_, exp_lam_, exp_neg_lam_, exp_2lam_, curv_;
    BoundaryCurve boundary_;
};

using SurfacePtr = std::shared_ptr<IsothermalSurface>;

// 1-form phi = rho (x dy - y dx) with d(phi) = e^{2 lambda} dx dy, built from
// the homotopy formula rho(x,y) = int_0^1 t e^{2 lambda(tx,ty)} dt.
struct AreaFormPrimitive {
    const IsothermalSurface* surface;
    int quad_points;

    double rho(double x, double y) const;
    void components(double x, double y, double& p1, double& p2) const;  // phi = p1 dx + p2 dy
    // d(rho)/dx, d(rho)/dy by differentiating under the integral
    void rho_grad(double x, double y, double& gx, double& gy) const;
};

AreaFormPrimitive area_form_primitive(const IsothermalSurface& surface, int quad_points = 48);

// Sampled simplicity certificate: strict convexity from kg, nontrapping and
// conjugate points from influx rays with the Jacobi equation b'' + K b = 0
// integrated alongside the flow.
SimplicityReport certify_simple(const IsothermalSurface& surface, int n_boundary = 128,
                                int n_directions = 64);

}  // namespace geotomo
