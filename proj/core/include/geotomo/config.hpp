#pragma once

#include <string>
#include <vector>

#include "geotomo/surface.hpp"

namespace geotomo {

// One experiment configuration; a single JSON document with every physical
// default embedded in the binary (see defaults_json()).
struct ConfigSpec {
    // surface
    std::string expression = "0";
    std::string grid_file;           // when set, overrides the expression
    int interpolation_order = 3;
    double r0 = 1.0;

    // resolution
    int nx = 49;
    int n_theta = 64;
    int n_beta = 192;
    int n_alpha = 64;
    double ht = 0.0;                 // 0: derived from lambda
    double half_width = 1.1;

    // tolerances (acceptance-facing)
    double identity_rel = 1e-3;
    double rate_min = 1.8;
    double kernel_tol = 1e-2;
    double recon_tol = 0.05;
    double potential_tol = 5e-2;
    double factor_tol = 1e-2;
    double levi_civita_tol = 1e-3;
    double transport_tol = 1e-2;

    // solvers
    double alpha_reg_rel = 1e-8;     // inversion Tikhonov, relative to sigma_max^2
    double i0star_reg_rel = 1e-6;
    int max_iterations = 1500;
    int decompose_iterations = 800;
    double bundle_ht = 0.02;

    // misc
    std::uint64_t seed = 1234;
    int jobs = 0;
    int cutoff_power = 3;
    int certify_boundary = 128;
    int certify_directions = 64;
    double tmax_factor = 10.0;

    // phantoms / commands
    int phantom_degree = 1;
    std::string phantom_kind = "random";  // random | potential
    std::string sinogram_in;              // invert from this blob instead of a phantom
    int probe_trials = 3;
    std::vector<int> ladder = {48, 64, 96};
    int identity_band = 3;
    std::vector<double> attenuation_s = {1.0, 2.0};

    // output
    std::string out_dir = "out";
    bool timestamp = false;

    void validate() const;
};

// versioned defaults table as JSON text
std::string defaults_json();

ConfigSpec load_config(const std::string& path);
ConfigSpec config_from_json_text(const std::string& text);

SurfacePtr build_surface(const ConfigSpec& cfg);
SurfacePtr build_surface(const ConfigSpec& cfg, int nx_override);

}  // namespace geotomo
