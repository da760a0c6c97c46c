#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"
#include "mflab/errors.hpp"
#include "plot.hpp"

namespace {

using nlohmann::json;

// Machine-readable failure object on stdout, nonzero exit.
int fail(const std::string& type, const std::string& message,
         const std::vector<std::string>& violations = {}) {
    json err{{"schema", "v1"},
             {"error", json{{"type", type}, {"message", message}}}};
    if (!violations.empty()) err["error"]["violations"] = violations;
    std::cout << err.dump(2) << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curie-Weiss model with a dynamically generated external field: "
                 "exact laws, free-energy landscapes, deviation verdicts"};
    app.require_subcommand(1);

    const std::vector<std::string> subs = {
        "walk-dist",          "walk-mdp",      "magnetization-dist",
        "landscape",          "critical-beta", "verify-mdp",
        "scaling-check",      "hs-check",      "clt-density"};
    const std::vector<std::string> descs = {
        "exact law of the dynamic walk endpoint",
        "walk tail probabilities against the moderate-deviation rate",
        "exact law of the total magnetization",
        "classify the minima of the free-energy landscape",
        "solve for the critical inverse temperature",
        "magnetization tail probabilities against the moderate-deviation rate",
        "finite-n free energy against its Taylor scaling limit",
        "auxiliary-coordinate density diagnostics",
        "limiting fluctuation density and its normalization"};

    std::string config_path, out_flag;
    std::vector<std::string> overrides;
    for (size_t i = 0; i < subs.size(); ++i) {
        CLI::App* sub = app.add_subcommand(subs[i], descs[i]);
        sub->add_option("--config", config_path, "flat KEY=VALUE config file");
        sub->add_option("--set", overrides, "override one config key (KEY=VALUE)")
            ->take_all();
        sub->add_option("--out", out_flag, "output directory");
    }

    std::string report_path, script_out;
    CLI::App* plot = app.add_subcommand(
        "plot-script", "write a python plotting script for a report");
    plot->add_option("report", report_path, "path to a *-report.json")->required();
    plot->add_option("--out", script_out, "script path to write");

    CLI11_PARSE(app, argc, argv);
    CLI::App* chosen = app.get_subcommands().front();

    try {
        if (chosen == plot) {
            std::string path = mflab::cli::emit_plot_script(report_path, script_out);
            json ok{{"schema", "v1"}, {"subcommand", "plot-script"}, {"script", path}};
            std::cout << ok.dump(2) << '\n';
            return 0;
        }
        mflab::cli::ExperimentConfig cfg = mflab::cli::resolve_config(
            chosen->get_name(), config_path, overrides, out_flag);
        return mflab::cli::run_command(cfg);
    } catch (const mflab::ConfigError& e) {
        return fail("config", e.what(), e.violations);
    } catch (const mflab::QuadratureError& e) {
        return fail("quadrature", e.what());
    } catch (const mflab::ClassificationError& e) {
        return fail("classification", e.what());
    } catch (const mflab::Error& e) {
        return fail("numeric", e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
}
