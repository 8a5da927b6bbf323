#pragma once

#include <functional>
#include <vector>

#include "geotomo/util.hpp"

namespace geotomo {

struct CglsOptions {
    int max_iterations = 500;
    double tolerance = 1e-10;   // on the normal-equation residual, relative
    double regularization = 0.0;  // Tikhonov weight on ||x||^2
};

struct CglsResult {
    int iterations = 0;
    double relative_residual = 0.0;  // ||Ax - b|| / ||b||
    double normal_residual = 0.0;    // ||A^T(b - Ax) - reg x|| relative to start
    double backward_error = 0.0;     // ||A^T r|| / (sigma_est ||r||)
    bool converged = false;
};

using CplxVec = std::vector<cplx>;

// Conjugate gradient on the regularized normal equations, matrix-free.
// apply_a: x (size nx) -> y (size ny); apply_at: y -> x. All coefficient
// scalars are real because only norms enter the recurrences.
CglsResult cgls(const std::function<void(const CplxVec&, CplxVec&)>& apply_a,
                const std::function<void(const CplxVec&, CplxVec&)>& apply_at,
                const CplxVec& b, CplxVec& x, const CglsOptions& opt);

// largest singular value of A by power iteration on A^T A
double power_estimate_norm(const std::function<void(const CplxVec&, CplxVec&)>& apply_a,
                           const std::function<void(const CplxVec&, CplxVec&)>& apply_at,
                           std::size_t nx, std::size_t ny, int iterations = 20,
                           std::uint64_t seed = 7);

}  // namespace geotomo
