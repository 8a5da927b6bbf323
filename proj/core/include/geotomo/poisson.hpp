#pragma once

#include <functional>
#include <vector>

#include "geotomo/util.hpp"

namespace geotomo {

// Scalar field on the disk r <= r0 stored as angular Fourier modes on
// cell-centered radial rings, with evaluation and first derivatives.
class PolarField {
  public:
    PolarField(double r0, int nr, int max_mode);

    double r0() const { return r0_; }
    int nr() const { return nr_; }
    int max_mode() const { return max_mode_; }
    double ring_r(int i) const { return (i + 0.5) * dr_; }

    cplx* mode(int n) { return data_.data() + std::size_t(n + max_mode_) * nr_; }
    const cplx* mode(int n) const { return data_.data() + std::size_t(n + max_mode_) * nr_; }

    cplx value(double x, double y) const;
    void gradient(double x, double y, cplx& gx, cplx& gy) const;

  private:
    double r0_, dr_;
    int nr_, max_mode_;
    std::vector<cplx> data_;

    cplx radial_eval(int n, double r) const;
    cplx radial_deriv(int n, double r) const;
};

// Delta u = rhs on the disk with u = 0 on r = r0 (Euclidean Laplacian;
// conformal rescaling is the caller's business). rhs evaluated in Cartesian
// coordinates.
PolarField solve_poisson_dirichlet(const std::function<cplx(double, double)>& rhs, double r0,
                                   int nr = 192, int npsi = 128);

// Delta u = rhs with du/dr(r0, psi) = neumann(psi); the angular mean of u is
// gauged to zero and the n = 0 compatibility defect is projected out.
PolarField solve_poisson_neumann(const std::function<cplx(double, double)>& rhs,
                                 const std::function<cplx(double)>& neumann, double r0,
                                 int nr = 192, int npsi = 128);

}  // namespace geotomo
