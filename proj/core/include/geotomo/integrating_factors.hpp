#pragma once

#include "geotomo/cgls.hpp"
#include "geotomo/connection.hpp"
#include "geotomo/geodesic_flow.hpp"
#include "geotomo/poisson.hpp"
#include "geotomo/ray_transform.hpp"

namespace geotomo {

// A = da + star db on the disk; both potentials solved on a polar grid with
// the Euclidean Laplacian (the Hodge star on 1-forms is conformally
// invariant, so the split is metric-independent).
struct HodgeDecomposition {
    PolarField a, b;
    SmFunction a_nodes, b_nodes;  // band-0 disk functions on the surface grid
    double residual = 0.0;        // ||A - da - star db|| / ||A||
};

HodgeDecomposition hodge_decompose(const IsothermalSurface& surface, const Connection1Form& A,
                                   int nr = 192, int npsi = 128);

struct I0StarSolveOptions {
    double reg_rel = 1e-6;    // Tikhonov weight relative to ||I0*||^2
    int max_iterations = 600;
    double tolerance = 1e-12;
    // Boundary data is sought in a smooth basis e^{ip beta} P_q(sin alpha)
    // cos(alpha)^glancing_power: raw per-beam unknowns fit the backprojection
    // but produce rough data whose invariant extension is useless as a first
    // integral, and data that survives at tangential directions makes the
    // extension non-smooth on the glancing set.
    int beta_modes = 8;
    int alpha_degree = 16;
    double glancing_power = 0.0;
};

struct I0StarSolveResult {
    std::vector<cplx> boundary_data;
    double fit_residual = 0.0;  // ||I0* h - target|| / ||target|| in L^2(M)
    int iterations = 0;
    // closed form of the solved data; exact synthesis of the basis solution
    std::function<cplx(double, double)> smooth_eval;
};

// Regularized least squares for I_0^* h = target (target is a band-0 disk
// function). Deterministic for a fixed configuration.
I0StarSolveResult i0star_solve(const InfluxMap& map, const SmFunction& target,
                               const I0StarSolveOptions& opt = {});

enum class FactorOrientation : std::uint8_t { Holomorphic, Antiholomorphic };

struct IntegratingFactor {
    SmFunction w;
    double transport_residual = 0.0;  // ||Xw + A|| / ||A||
    double wrong_side_energy = 0.0;   // energy fraction on the forbidden side
    double hodge_residual = 0.0;
    double i0star_fit = 0.0;
    int iterations = 0;
};

struct FactorOptions {
    I0StarSolveOptions solve;
    int poisson_nr = 192;
    int poisson_npsi = 128;
    double failure_threshold = 0.25;  // i0star fit above this aborts the pipeline
};

// Constructive integrating factor: Hodge split, I_0^* solve for the even
// first integral with prescribed zero mode, then w = -a + (Id +/- iH) w_hat.
// Postcondition targets: Xw = -A and one-sided fiber spectrum.
IntegratingFactor holomorphic_integrating_factor(const IsothermalSurface& surface,
                                                 const Connection1Form& A,
                                                 FactorOrientation orientation,
                                                 const InfluxMap& map,
                                                 const FactorOptions& opt = {});

// The connection A = -h^{-1} X h for h = e^{i m theta}: the Levi-Civita
// connection on the m-th tangent tensor power.
inline Connection1Form levi_civita_connection(SurfacePtr surface, int m) {
    return Connection1Form::levi_civita(std::move(surface), m);
}

struct HolomorphicTransportReport {
    double negative_energy_fraction = 0.0;
    double zero_mode_fraction = 0.0;
    SmFunction u;
};

// Transport solution of X u = -f for holomorphic f with I f = 0; reports how
// holomorphic u is and the size of its zero mode.
HolomorphicTransportReport verify_holomorphic_transport(const IsothermalSurface& surface,
                                                         const SmFunction& f, int jobs = 0);

}  // namespace geotomo
