#pragma once

#include "geotomo/connection.hpp"
#include "geotomo/sm_function.hpp"
#include "geotomo/surface.hpp"

namespace geotomo {

enum class FrameField : std::uint8_t { X, Xperp, V };

// Geodesic and vertical frame fields as mode-space operators. V acts
// diagonally; X and Xperp act through the eta shifts
//   eta+ : mode k -> e^{-lambda} (d_z u_k - k (d_z lambda) u_k)      in mode k+1
//   eta- : mode k -> e^{-lambda} (d_zbar u_k + k (d_zbar lambda) u_k) in mode k-1
// with d_z = (d_x - i d_y)/2. Spatial derivatives are centered second order,
// one-sided where the support mask requires it.
SmFunction apply_frame_field(FrameField which, const IsothermalSurface& surface,
                             const SmFunction& u);

SmFunction apply_V(const SmFunction& u);

// sign = +1 or -1
SmFunction eta_op(int sign, const IsothermalSurface& surface, const SmFunction& u);
SmFunction mu_op(int sign, const IsothermalSurface& surface, const Connection1Form& A,
                 const SmFunction& u);

// multiplication by the SM restriction A(x,v) = A_j v^j (a +/-1 mode shift)
SmFunction connection_multiply(const IsothermalSurface& surface, const Connection1Form& A,
                               const SmFunction& u);

// (X + A) u
SmFunction apply_X_plus_A(const IsothermalSurface& surface, const Connection1Form& A,
                          const SmFunction& u);

// multiplication by a real node field (curvature, star F_A, cutoffs, ...)
SmFunction node_field_multiply(const std::vector<double>& field, const SmFunction& u);
SmFunction node_field_multiply(const std::vector<cplx>& field, const SmFunction& u);

// zero all modes at nodes outside the disk; for residuals that compare
// disk-supported fields against ambient ones
SmFunction mask_to_disk(const IsothermalSurface& surface, const SmFunction& u);

// (u, v) = int_SM u conj(v) dSigma^3 with dSigma^3 = e^{2 lambda} dx dy dtheta;
// exact in the fiber, disk-overlap weighted in space.
cplx l2_inner_product(const IsothermalSurface& surface, const SmFunction& u, const SmFunction& v);
double l2_norm(const IsothermalSurface& surface, const SmFunction& u);

// per-mode squared norms ||u_k||^2 for k = -band..band
std::vector<double> mode_energies(const IsothermalSurface& surface, const SmFunction& u);

// fraction of ||u||^2 carried by modes with pred(k) true
template <typename Pred>
double energy_fraction(const IsothermalSurface& surface, const SmFunction& u, Pred pred) {
    auto e = mode_energies(surface, u);
    double tot = 0.0, sel = 0.0;
    for (int k = -u.band(); k <= u.band(); ++k) {
        tot += e[k + u.band()];
        if (pred(k)) sel += e[k + u.band()];
    }
    return tot > 0.0 ? sel / tot : 0.0;
}

// Pointwise product of two SM functions via oversampled fiber values
// (band headroom x2), used for e^w and h*u style compositions.
SmFunction sm_multiply(const SmFunction& a, const SmFunction& b);
// exp(u) through the fiber grid with doubled band
SmFunction sm_exp(const SmFunction& u);

}  // namespace geotomo
