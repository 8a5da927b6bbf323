#pragma once

#include <map>
#include <string>

#include "geotomo/connection.hpp"
#include "geotomo/operators.hpp"
#include "geotomo/sm_function.hpp"
#include "geotomo/surface.hpp"

namespace geotomo {

// Outcome of evaluating one energy identity on one grid. The relative
// residual is scaled by the largest constituent term: cancellation is the
// phenomenon being measured.
struct ResidualReport {
    std::string identity;
    double absolute = 0.0;
    double relative = 0.0;
    std::map<std::string, double> terms;
    int grid_n = 0;
    int n_theta = 0;
    double rate = 0.0;  // filled by refinement studies only
};

// ||XVu||^2 - (KVu,Vu) + ||Xu||^2 - ||VXu||^2 for u vanishing on the boundary.
ResidualReport pestov_residual(const IsothermalSurface& surface, const SmFunction& u);

// attenuated version, A purely imaginary:
// ||(X+A)Vu||^2 - (KVu,Vu) + ||(X+A)u||^2 - ||V(X+A)u||^2 + (star F_A Vu, u) = 0.
// Also cross-checks the curvature term against sum_k ik (star F_A u_k, u_k);
// the gap is reported under "fourier_gap".
ResidualReport attenuated_pestov_residual(const IsothermalSurface& surface,
                                          const Connection1Form& A, const SmFunction& u);

// [H,X]u = Xperp u_0 + (Xperp u)_0
ResidualReport hx_commutator_residual(const IsothermalSurface& surface, const SmFunction& u);

// [mu+, mu-]u = (i/2)(K V u + (star F_A) u)
ResidualReport mu_commutator_residual(const IsothermalSurface& surface, const Connection1Form& A,
                                      const SmFunction& u);

// [P*, P]u = (-X^2 + V K V)u with P = VX
ResidualReport ppstar_commutator_residual(const IsothermalSurface& surface, const SmFunction& u);

// ||f_0||^2 - sum_{2 <= |k| <= m} (k^2 - 1) ||f_k||^2
double degree_defect(const IsothermalSurface& surface, const SmFunction& f);

// ||(X+A)Vv||^2 - (KVv, Vv); nonnegative on simple surfaces. A may be null.
double positivity_probe(const IsothermalSurface& surface, const Connection1Form* A,
                        const SmFunction& v);

// multiply by the boundary cutoff so that u vanishes on d(SM)
SmFunction apply_boundary_cutoff(const IsothermalSurface& surface, const SmFunction& u,
                                 int power = 3);

}  // namespace geotomo
