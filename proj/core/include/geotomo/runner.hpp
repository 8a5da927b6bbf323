#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "geotomo/config.hpp"

namespace geotomo {

struct CommandResult {
    nlohmann::ordered_json report;
    bool ok = true;  // all contracted tolerances met
};

// identity residual ladder over cfg.ladder resolutions, shared by the verify
// command and the acceptance suite
struct IdentityLadderResult {
    std::vector<int> ns;
    std::vector<double> hs;
    std::map<std::string, std::vector<double>> residuals;
    std::map<std::string, double> rates;

    bool ok(double tol, double rate_min) const;
    nlohmann::ordered_json to_json() const;
};

IdentityLadderResult run_identity_ladder(const ConfigSpec& cfg);

CommandResult run_check(const ConfigSpec& cfg);
CommandResult run_verify(const ConfigSpec& cfg);
CommandResult run_transform(const ConfigSpec& cfg);
CommandResult run_decompose(const ConfigSpec& cfg);
CommandResult run_invert(const ConfigSpec& cfg);
CommandResult run_factors(const ConfigSpec& cfg);

}  // namespace geotomo
