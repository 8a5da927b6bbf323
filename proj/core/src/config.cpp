#include "geotomo/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geotomo/expression.hpp"

namespace geotomo {

using json = nlohmann::ordered_json;

std::string defaults_json() {
    // version 1 of the embedded defaults table
    return R"({
  "defaults_version": 1,
  "surface": {"expression": "0", "grid_file": "", "interpolation_order": 3, "r0": 1.0},
  "resolution": {"nx": 49, "n_theta": 64, "n_beta": 192, "n_alpha": 64, "ht": 0.0, "half_width": 1.1},
  "tolerances": {"identity_rel": 1e-3, "rate_min": 1.8, "kernel_tol": 1e-2, "recon_tol": 0.05,
                  "potential_tol": 5e-2, "factor_tol": 1e-2, "levi_civita_tol": 1e-3, "transport_tol": 1e-2},
  "solver": {"alpha_reg_rel": 1e-8, "i0star_reg_rel": 1e-6, "max_iterations": 1500,
              "decompose_iterations": 800, "bundle_ht": 0.02},
  "misc": {"seed": 1234, "jobs": 0, "cutoff_power": 3, "certify_boundary": 128,
            "certify_directions": 64, "tmax_factor": 10.0},
  "commands": {"phantom_degree": 1, "phantom_kind": "random", "probe_trials": 3,
                "ladder": [48, 64, 96], "identity_band": 3, "attenuation_s": [1.0, 2.0]},
  "output": {"dir": "out", "timestamp": false}
})";
}

namespace {

template <typename T>
void maybe(const json& j, const char* section, const char* key, T& dst) {
    if (j.contains(section) && j[section].contains(key)) dst = j[section][key].get<T>();
}

}  // namespace

ConfigSpec config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config JSON parse failure: ") + e.what());
    }
    ConfigSpec c;
    maybe(j, "surface", "expression", c.expression);
    maybe(j, "surface", "grid_file", c.grid_file);
    maybe(j, "surface", "interpolation_order", c.interpolation_order);
    maybe(j, "surface", "r0", c.r0);
    maybe(j, "resolution", "nx", c.nx);
    maybe(j, "resolution", "n_theta", c.n_theta);
    maybe(j, "resolution", "n_beta", c.n_beta);
    maybe(j, "resolution", "n_alpha", c.n_alpha);
    maybe(j, "resolution", "ht", c.ht);
    maybe(j, "resolution", "half_width", c.half_width);
    maybe(j, "tolerances", "identity_rel", c.identity_rel);
    maybe(j, "tolerances", "rate_min", c.rate_min);
    maybe(j, "tolerances", "kernel_tol", c.kernel_tol);
    maybe(j, "tolerances", "recon_tol", c.recon_tol);
    maybe(j, "tolerances", "potential_tol", c.potential_tol);
    maybe(j, "tolerances", "factor_tol", c.factor_tol);
    maybe(j, "tolerances", "levi_civita_tol", c.levi_civita_tol);
    maybe(j, "tolerances", "transport_tol", c.transport_tol);
    maybe(j, "solver", "alpha_reg_rel", c.alpha_reg_rel);
    maybe(j, "solver", "i0star_reg_rel", c.i0star_reg_rel);
    maybe(j, "solver", "max_iterations", c.max_iterations);
    maybe(j, "solver", "decompose_iterations", c.decompose_iterations);
    maybe(j, "solver", "bundle_ht", c.bundle_ht);
    maybe(j, "misc", "seed", c.seed);
    maybe(j, "misc", "jobs", c.jobs);
    maybe(j, "misc", "cutoff_power", c.cutoff_power);
    maybe(j, "misc", "certify_boundary", c.certify_boundary);
    maybe(j, "misc", "certify_directions", c.certify_directions);
    maybe(j, "misc", "tmax_factor", c.tmax_factor);
    maybe(j, "commands", "phantom_degree", c.phantom_degree);
    maybe(j, "commands", "phantom_kind", c.phantom_kind);
    maybe(j, "commands", "sinogram_in", c.sinogram_in);
    maybe(j, "commands", "probe_trials", c.probe_trials);
    maybe(j, "commands", "ladder", c.ladder);
    maybe(j, "commands", "identity_band", c.identity_band);
    maybe(j, "commands", "attenuation_s", c.attenuation_s);
    maybe(j, "output", "dir", c.out_dir);
    maybe(j, "output", "timestamp", c.timestamp);

    if (const char* env = std::getenv("GEOTOMO_SEED")) {
        try {
            c.seed = std::stoull(env);
        } catch (...) {
            throw ConfigError("GEOTOMO_SEED is not an integer");
        }
    }
    c.validate();
    return c;
}

ConfigSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

void ConfigSpec::validate() const {
    if (nx < 8) throw ConfigError("nx must be >= 8");
    if (n_theta < 8 || n_theta % 2 != 0) throw ConfigError("n_theta must be even and >= 8");
    if (n_beta < 1 || n_alpha < 1) throw ConfigError("fan grid counts must be positive");
    if (!(r0 > 0.0 && r0 <= 1.0)) throw ConfigError("r0 must lie in (0, 1]");
    if (half_width < r0) throw ConfigError("half_width must cover the disk");
    if (interpolation_order != 1 && interpolation_order != 3)
        throw ConfigError("interpolation_order must be 1 or 3");
    for (int n : ladder)
        if (n < 8) throw ConfigError("ladder resolutions must be >= 8");
}

SurfacePtr build_surface(const ConfigSpec& cfg) { return build_surface(cfg, cfg.nx); }

SurfacePtr build_surface(const ConfigSpec& cfg, int nx_override) {
    IsothermalSurface::Params p;
    p.n = nx_override;
    p.n_theta = cfg.n_theta;
    p.half_width = cfg.half_width;
    p.r0 = cfg.r0;
    p.ht = cfg.ht;
    p.tmax_factor = cfg.tmax_factor;
    ScalarField lambda;
    if (!cfg.grid_file.empty()) {
        lambda = ScalarField::from_grid_file(cfg.grid_file, cfg.interpolation_order);
    } else {
        lambda = ScalarField::from_expression(parse_expression(cfg.expression));
    }
    return std::make_shared<IsothermalSurface>(std::move(lambda), p);
}

}  // namespace geotomo
