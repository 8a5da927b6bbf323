#pragma once

#include <vector>

#include "geotomo/cgls.hpp"
#include "geotomo/operators.hpp"
#include "geotomo/sm_function.hpp"
#include "geotomo/surface.hpp"

namespace geotomo {

// Symmetric m-tensor represented through its SM restriction: a real function
// with modes |k| <= m of fixed parity. Coordinate components are reconstructed
// on demand through the F_k / alpha construction.
class SymmetricTensor {
  public:
    SymmetricTensor() = default;
    SymmetricTensor(int degree, SmFunction restriction);

    int degree() const { return degree_; }
    const SmFunction& restriction() const { return rep_; }
    SmFunction& restriction() { return rep_; }
    Parity parity() const { return degree_ % 2 == 0 ? Parity::Even : Parity::Odd; }

    // components c_j = f_{1...1 2...2} (j indices equal to 2), j = 0..m,
    // evaluated at every grid node. Uses F_k = 2 Re(f~_k e^{k lambda} dz^k)
    // raised with alpha = sym(. x g).
    std::vector<std::vector<double>> components_on_grid(const IsothermalSurface& surface) const;

    // restriction of a tensor given by canonical components (as fields)
    static SymmetricTensor from_components(const IsothermalSurface& surface,
                                           const std::vector<ScalarField>& comps,
                                           Support support = Support::Ambient);

    // degree-2 entry from a full 2x2 matrix of fields; rejects asymmetric input
    static SymmetricTensor from_matrix2(const IsothermalSurface& surface, const ScalarField& f11,
                                        const ScalarField& f12, const ScalarField& f21,
                                        const ScalarField& f22);

    // rebuild the restriction from node-sampled modes (inverse of the above
    // round trip); modes must satisfy parity and conjugate symmetry
    static SymmetricTensor from_modes(const IsothermalSurface& surface, int degree,
                                      const SmFunction& modes);

  private:
    int degree_ = 0;
    SmFunction rep_;
};

// dh = X h on restrictions; degree goes up by one.
SymmetricTensor inner_derivative(const IsothermalSurface& surface, const SymmetricTensor& h);

// divergence as the negative formal adjoint of the inner derivative: the
// band-(m-1) part of X f. Throws DomainError for m = 0.
SymmetricTensor divergence(const IsothermalSurface& surface, const SymmetricTensor& f);

struct DecompositionResult {
    SymmetricTensor solenoidal;   // f^s = f - dh
    SymmetricTensor potential;    // h, degree m-1, zero near the boundary
    double solenoidal_residual = 0.0;      // ||delta f^s|| / ||f||
    double reconstruction_residual = 0.0;  // ||f^s + dh - f|| / ||f||
    int iterations = 0;
};

// f = f^s + dh with h|dM = 0: least squares for h in ||dh - f||_{L^2(SM)}
// over interior-supported modes, then f^s := f - dh.
DecompositionResult solenoidal_decompose(const IsothermalSurface& surface,
                                         const SymmetricTensor& f,
                                         const CglsOptions& opt = {800, 1e-9, 0.0});

}  // namespace geotomo
