// geotomo: geodesic ray transforms, transport identities and solenoidal
// tensor recovery on disk-type surfaces in isothermal coordinates.
//
// Exit codes: 0 ok, 2 contracted tolerance missed, 3 config error,
// 4 numeric/solver error.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "geotomo/runner.hpp"
#include "geotomo/util.hpp"

namespace {

int dispatch(const std::string& command, const geotomo::ConfigSpec& cfg) {
    geotomo::CommandResult res;
    if (command == "check")
        res = geotomo::run_check(cfg);
    else if (command == "verify")
        res = geotomo::run_verify(cfg);
    else if (command == "transform")
        res = geotomo::run_transform(cfg);
    else if (command == "decompose")
        res = geotomo::run_decompose(cfg);
    else if (command == "invert")
        res = geotomo::run_invert(cfg);
    else if (command == "factors")
        res = geotomo::run_factors(cfg);
    else
        throw geotomo::ConfigError("unknown command: " + command);
    std::cout << res.report.dump(2) << "\n";
    return res.ok ? 0 : 2;
}

nlohmann::ordered_json error_report(const std::string& kind, const std::string& what) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = what;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geodesic tensor tomography toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = -1;

    for (const char* name : {"check", "transform", "decompose", "invert", "verify", "factors"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--jobs", jobs, "worker cap (0 = hardware)");
        sub->add_option("--out", out_dir, "output directory override");
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    try {
        geotomo::ConfigSpec cfg = geotomo::load_config(config_path);
        if (jobs >= 0) cfg.jobs = jobs;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        geotomo::set_default_jobs(cfg.jobs);
        return dispatch(command, cfg);
    } catch (const geotomo::ConfigError& e) {
        std::cout << error_report("config", e.what()).dump(2) << "\n";
        return 3;
    } catch (const geotomo::ParseError& e) {
        std::cout << error_report("config", e.what()).dump(2) << "\n";
        return 3;
    } catch (const geotomo::Error& e) {
        std::cout << error_report("numeric", e.what()).dump(2) << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cout << error_report("internal", e.what()).dump(2) << "\n";
        return 4;
    }
}
