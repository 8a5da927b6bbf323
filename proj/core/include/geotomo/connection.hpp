#pragma once

#include <memory>
#include <vector>

#include "geotomo/scalar_field.hpp"
#include "geotomo/sm_function.hpp"
#include "geotomo/surface.hpp"

namespace geotomo {

// 1-form A = A_1 dx + A_2 dy (complex components allowed) together with its
// node arrays on a surface grid: the eta-shift multipliers
//   a+ = e^{-lambda}(A_1 - i A_2)/2,   a- = e^{-lambda}(A_1 + i A_2)/2,
// and the curvature scalar star F_A = e^{-2 lambda} (d_x A_2 - d_y A_1).
class Connection1Form {
  public:
    Connection1Form(SurfacePtr surface, ComplexField a1, ComplexField a2);

    const ComplexField& comp1() const { return a1_; }
    const ComplexField& comp2() const { return a2_; }
    const std::vector<cplx>& a_plus() const { return a_plus_; }
    const std::vector<cplx>& a_minus() const { return a_minus_; }
    const std::vector<cplx>& star_curvature() const { return star_fa_; }
    bool purely_imaginary() const { return purely_imaginary_; }
    const IsothermalSurface& surface() const { return *surface_; }

    // SM restriction A(x,v) as a two-mode function
    SmFunction restriction() const;

    // A = i s phi with d(phi) = omega_g; star F_A = i s times... i star F_A = -s.
    static Connection1Form area_form_attenuation(SurfacePtr surface, double s);

    // A = -h^{-1} X h for h = e^{im theta}: the closed form
    // A = i m (-lambda_y dx + lambda_x dy).
    static Connection1Form levi_civita(SurfacePtr surface, int m);

    static Connection1Form zero(SurfacePtr surface);

  private:
    SurfacePtr surface_;
    ComplexField a1_, a2_;
    std::vector<cplx> a_plus_, a_minus_, star_fa_;
    bool purely_imaginary_ = false;
};

}  // namespace geotomo
