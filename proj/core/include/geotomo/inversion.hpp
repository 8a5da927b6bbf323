#pragma once

#include "geotomo/ray_transform.hpp"
#include "geotomo/tensor.hpp"

namespace geotomo {

// Cached linear ray transform: per beam, quadrature samples along the RK4
// trajectory (the four stage points of the integral variable). Gives the
// forward map on mode stacks and its exact transpose for CGLS.
class RayBundle {
  public:
    RayBundle(const IsothermalSurface& surface, const FanBeamGrid& grid, int degree,
              double ht = 0.02, int jobs = 0);

    const FanBeamGrid& fan() const { return fan_; }
    int degree() const { return degree_; }
    std::size_t unknowns() const { return modes_.size() * nodes_.size(); }
    const std::vector<int>& modes() const { return modes_; }
    const std::vector<std::size_t>& nodes() const { return nodes_; }

    // x: mode stack over inside nodes -> beam values
    void apply(const CplxVec& x, CplxVec& y) const;
    void apply_adjoint(const CplxVec& y, CplxVec& x) const;

    CplxVec pack(const SmFunction& u) const;
    SmFunction unpack(const CplxVec& x) const;

  private:
    struct Sample {
        std::uint32_t cell;   // base node index of the bilinear cell
        float w[4];           // corner weights (support-renormalized)
        float tc, ts;         // cos/sin of the fiber angle
        float quad_w;
    };
    const IsothermalSurface& s_;
    FanBeamGrid fan_;
    int degree_;
    std::vector<int> modes_;
    std::vector<std::size_t> nodes_;
    std::vector<std::int32_t> slot_;       // node -> unknown slot (-1 outside)
    std::vector<Sample> samples_;
    std::vector<std::size_t> beam_start_;  // CSR offsets into samples_
};

struct ReconstructionResult {
    SymmetricTensor recovered;    // least-squares tensor before projection
    SymmetricTensor solenoidal;   // its solenoidal part
    double data_misfit = 0.0;         // ||I F - data|| / ||data||, influx-weighted
    double solenoidal_residual = 0.0; // ||delta f^s|| / ||f^s||
    double comparison_error = -1.0;   // vs ground truth when supplied
    int iterations = 0;
};

struct ReconstructOptions {
    double alpha_reg_rel = 1e-8;  // relative to the largest singular value^2
    int max_iterations = 400;
    double tolerance = 1e-10;
    double bundle_ht = 0.02;
    int decompose_iterations = 800;
};

ReconstructionResult reconstruct_solenoidal(const IsothermalSurface& surface, const RayData& data,
                                            int degree, const ReconstructOptions& opt = {},
                                            const SymmetricTensor* ground_truth = nullptr,
                                            const RayBundle* bundle = nullptr);

struct ProbeTrial {
    double recon_error = 0.0;      // || f^s_hat - f^s || / || f^s ||
    double kernel_max = 0.0;       // max |I(dh)| over the fan grid
    double potential_norm = 0.0;   // || f^s_hat || / || dh || for potential-only trials
    bool potential_only = false;
};

struct ProbeReport {
    std::vector<ProbeTrial> trials;
    double worst_recon_error = 0.0;
    double worst_potential_norm = 0.0;
    double worst_kernel = 0.0;
};

// Injectivity probe: random tensors are split, transformed, reconstructed
// and compared; potential-only trials must reconstruct to (near) zero.
ProbeReport sinjectivity_probe(const IsothermalSurface& surface, int degree, int n_trials,
                               std::uint64_t seed, const FanBeamGrid& grid,
                               const ReconstructOptions& opt = {});

struct DegreeReductionReport {
    double excess_energy_fraction = 0.0;  // energy of u in modes |k| >= m
    double h_recovery_error = 0.0;        // ||u + h|| / ||h||
};

// f = dh with interior h => the transport solution has degree m-1 and u = -h.
DegreeReductionReport degree_reduction_check(const IsothermalSurface& surface, int degree,
                                             std::uint64_t seed, int jobs = 0);

struct OneSidedReport {
    double forbidden_energy_fraction = 0.0;  // energy of u in modes k <= -m
    double recovery_error = 0.0;             // ||u_ts - u|| / ||u||
};

// manufactured pairs u, f = -Xu with f_k = 0 for k <= -m-1; transport must
// keep u_k = 0 for k <= -m
OneSidedReport one_sided_vanishing_check(const IsothermalSurface& surface, int degree,
                                         std::uint64_t seed, int jobs = 0);

// phantom generators ---------------------------------------------------------

// real tensor with low spatial frequencies times the boundary cutoff
SymmetricTensor random_tensor_phantom(const IsothermalSurface& surface, int degree, Rng& rng,
                                      double support_factor = 1.0, int cutoff_power = 3);

// general band-limited SM function, optionally real / fixed parity
SmFunction random_sm_phantom(const IsothermalSurface& surface, int band, Rng& rng, bool real,
                             Parity parity = Parity::Mixed, double support_factor = 1.0,
                             int cutoff_power = 3);

}  // namespace geotomo
