#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "mflab/deviations.hpp"
#include "mflab/gibbs.hpp"
#include "mflab/landscape.hpp"
#include "mflab/numerics.hpp"
#include "mflab/walk.hpp"

namespace mflab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json profile_json(const MinimumProfile& p) {
    return json{{"m", p.m},
                {"two_k", p.two_k},
                {"lambda", p.lambda},
                {"value", p.value},
                {"global", p.global_min},
                {"warnings", p.warnings}};
}

json verdict_json(const DeviationVerdict& v) {
    json j{{"target", v.target},
           {"grid", v.grid},
           {"r", v.r},
           {"err", v.errors()},
           {"trend", v.trend}};
    if (v.window)
        j["window"] = *v.window;
    else
        j["window"] = nullptr;
    return j;
}

// The group of minima a command operates on: the global minimum closest to
// the requested center (ties resolved toward the smaller m).
MinimumProfile select_profile(const std::vector<MinimumProfile>& profiles,
                              double want_m) {
    const MinimumProfile* best = nullptr;
    for (const MinimumProfile& p : profiles) {
        if (!p.global_min) continue;
        if (!best || std::fabs(p.m - want_m) < std::fabs(best->m - want_m))
            best = &p;
    }
    if (!best)
        throw DomainError("no global minimum found");
    return *best;
}

struct Writer {
    fs::path dir;
    json files = json::object();

    explicit Writer(const std::string& outdir) : dir(outdir) {
        fs::create_directories(dir);
    }
    void csv(const std::string& label, const std::string& name,
             const std::function<void(std::ostream&)>& body) {
        std::ofstream os(dir / name);
        body(os);
        files[label] = name;
    }
};

void finish(const ExperimentConfig& cfg, Writer& w, json results,
            std::vector<std::string> warnings) {
    json report;
    report["schema"] = "v1";
    report["subcommand"] = cfg.subcommand;
    report["seed"] = cfg.get_seed();
    report["config"] = json(cfg.values);
    report["results"] = std::move(results);
    report["warnings"] = warnings;
    std::string name = cfg.subcommand + "-report.json";
    w.files["report"] = name;
    report["files"] = w.files;
    std::ofstream os(w.dir / name);
    os << report.dump(2) << '\n';
    std::cout << report.dump(2) << '\n';
}

void cmd_walk_dist(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    long n = cfg.get_long("run.n");
    FieldTrajectory traj = orbit(sys, cfg.x0(), n);
    LatticeDistribution dist = walk_distribution(traj);
    if (cfg.wants_csv())
        w.csv("distribution", "walk-dist.csv",
              [&](std::ostream& os) { dist.write_csv(os); });
    finish(cfg, w,
           json{{"n", n}, {"mean", dist.mean()}, {"variance", dist.variance()}},
           sys.warnings);
}

void cmd_magnetization_dist(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    long n = cfg.get_long("run.n");
    FieldTrajectory traj = orbit(sys, cfg.x0(), n);
    ModelParams params(cfg.get_double("model.beta"), cfg.get_double("model.J"), n);
    LatticeDistribution dist = magnetization_distribution(traj, params);
    json results{{"n", n}, {"mean", dist.mean()}, {"variance", dist.variance()}};
    bool open_field = true;
    for (double p : traj.p)
        if (p <= 0.0 || p >= 1.0) open_field = false;
    if (open_field) results["log_partition"] = log_partition(traj, params);
    if (cfg.wants_csv())
        w.csv("distribution", "magnetization-dist.csv",
              [&](std::ostream& os) { dist.write_csv(os); });
    finish(cfg, w, std::move(results), sys.warnings);
}

void cmd_landscape(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    double beta_J = cfg.beta_J();
    std::vector<MinimumProfile> profiles = find_and_classify_minima(sys, beta_J);
    json minima = json::array();
    for (const MinimumProfile& p : profiles) minima.push_back(profile_json(p));
    if (cfg.wants_csv()) {
        std::vector<double> s_grid = cfg.get_s_grid();
        std::optional<FieldTrajectory> traj;
        if (cfg.has("run.n"))
            traj = orbit(sys, cfg.x0(), cfg.get_long("run.n"));
        w.csv("curve", "landscape.csv", [&](std::ostream& os) {
            os << (traj ? "s,G,Gn\n" : "s,G\n");
            for (double s : s_grid) {
                os << format_double(s) << ',' << format_double(eval_G(sys, beta_J, s, 0));
                if (traj) os << ',' << format_double(eval_Gn(*traj, beta_J, s, 0));
                os << '\n';
            }
        });
    }
    finish(cfg, w, json{{"minima", minima}}, sys.warnings);
}

void cmd_critical_beta(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    double J = cfg.get_double("model.J");
    double beta_c = critical_beta(sys, J);
    if (cfg.wants_csv()) {
        w.csv("curvature", "critical-beta.csv", [&](std::ostream& os) {
            os << "beta,curvature\n";
            for (int i = 0; i <= 100; ++i) {
                double beta = beta_c * (0.5 + double(i) / 100.0);
                os << format_double(beta) << ','
                   << format_double(eval_G(sys, beta * J, 0.0, 2)) << '\n';
            }
        });
    }
    finish(cfg, w, json{{"beta_c", beta_c}}, sys.warnings);
}

void cmd_walk_mdp(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    std::vector<long> grid = cfg.get_n_grid();
    double theta = cfg.get_double("run.alpha_scaling");
    double t = cfg.get_double("run.z");
    DeviationVerdict v = verify_walk_mdp(sys, cfg.x0(), theta, t, grid);
    if (cfg.wants_csv())
        w.csv("verdict", "walk-mdp.csv", [&](std::ostream& os) { v.write_csv(os); });
    RateFunctionSpec spec = walk_mdp_rate(sys);
    finish(cfg, w, json{{"a", spec.a}, {"verdict", verdict_json(v)}}, sys.warnings);
}

void cmd_verify_mdp(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    double beta = cfg.get_double("model.beta");
    double J = cfg.get_double("model.J");
    MinimumProfile profile =
        select_profile(find_and_classify_minima(sys, beta * J), cfg.get_double("run.m"));
    std::vector<long> grid = cfg.get_n_grid();
    double alpha = cfg.get_double("run.alpha_scaling");
    double z = cfg.get_double("run.z");
    std::optional<double> window;
    if (cfg.has("run.window")) window = cfg.get_double("run.window");
    DeviationVerdict v = verify_magnetization_mdp(
        orbit_family(sys, cfg.x0()), beta, J, grid, profile, alpha, z, window);
    if (cfg.wants_csv())
        w.csv("verdict", "verify-mdp.csv", [&](std::ostream& os) { v.write_csv(os); });
    finish(cfg, w,
           json{{"profile", profile_json(profile)}, {"verdict", verdict_json(v)}},
           sys.warnings);
}

void cmd_scaling_check(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    double beta_J = cfg.beta_J();
    MinimumProfile profile =
        select_profile(find_and_classify_minima(sys, beta_J), cfg.get_double("run.m"));
    std::vector<long> grid = cfg.get_n_grid();
    std::vector<double> s_grid = cfg.get_s_grid();
    double alpha = cfg.get_double("run.alpha_scaling");
    double radius = cfg.get_double("run.radius");
    ScalingCheckTable table = scaling_limit_check(orbit_family(sys, cfg.x0()), grid,
                                                  beta_J, profile, alpha, s_grid,
                                                  radius);
    json rows = json::array();
    for (const ScalingCheckRow& r : table.rows)
        rows.push_back(json{{"n", r.n},
                            {"sup_error", r.sup_error},
                            {"lower_bound_ok", r.lower_bound_ok}});
    if (cfg.wants_csv())
        w.csv("table", "scaling-check.csv", [&](std::ostream& os) {
            os << "n,sup_error,lower_bound_ok\n";
            for (const ScalingCheckRow& r : table.rows)
                os << r.n << ',' << format_double(r.sup_error) << ','
                   << (r.lower_bound_ok ? 1 : 0) << '\n';
        });
    finish(cfg, w,
           json{{"alpha", table.alpha},
                {"radius", table.radius},
                {"profile", profile_json(profile)},
                {"rows", rows}},
           sys.warnings);
}

void cmd_hs_check(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    long n = cfg.get_long("run.n");
    FieldTrajectory traj = orbit(sys, cfg.x0(), n);
    ModelParams params(cfg.get_double("model.beta"), cfg.get_double("model.J"), n);
    double m = cfg.get_double("run.m");
    double alpha = cfg.get_double("run.alpha_scaling");
    HsDensity density(traj, params, m, alpha);
    if (cfg.wants_csv()) {
        std::vector<double> s_grid = cfg.get_s_grid();
        w.csv("density", "hs-check.csv", [&](std::ostream& os) {
            os << "s,density,log_density\n";
            for (double s : s_grid) {
                double lv = density.log_value(s);
                os << format_double(s) << ',' << format_double(std::exp(lv)) << ','
                   << format_double(lv) << '\n';
            }
        });
    }
    finish(cfg, w,
           json{{"n", n}, {"m", m}, {"alpha", alpha}, {"argmax", density.argmax()}},
           sys.warnings);
}

void cmd_clt_density(const ExperimentConfig& cfg, Writer& w) {
    SystemDescriptor sys = cfg.build_system();
    double beta_J = cfg.beta_J();
    MinimumProfile profile =
        select_profile(find_and_classify_minima(sys, beta_J), cfg.get_double("run.m"));
    double lambda_tilde = profile.two_k == 2
                              ? 1.0 / (1.0 / profile.lambda - 1.0 / beta_J)
                              : profile.lambda;
    if (cfg.wants_csv()) {
        std::vector<double> s_grid = cfg.get_s_grid();
        w.csv("density", "clt-density.csv", [&](std::ostream& os) {
            os << "s,density\n";
            for (double s : s_grid)
                os << format_double(s) << ','
                   << format_double(
                          clt_limit_density(profile.two_k, profile.lambda, beta_J, s))
                   << '\n';
        });
    }
    finish(cfg, w,
           json{{"profile", profile_json(profile)},
                {"lambda_tilde", lambda_tilde},
                {"normalization", clt_normalization(profile.two_k, lambda_tilde)}},
           sys.warnings);
}

}  // namespace

int run_command(const ExperimentConfig& cfg) {
    Writer w(cfg.output_directory());
    if (cfg.subcommand == "walk-dist")
        cmd_walk_dist(cfg, w);
    else if (cfg.subcommand == "magnetization-dist")
        cmd_magnetization_dist(cfg, w);
    else if (cfg.subcommand == "landscape")
        cmd_landscape(cfg, w);
    else if (cfg.subcommand == "critical-beta")
        cmd_critical_beta(cfg, w);
    else if (cfg.subcommand == "walk-mdp")
        cmd_walk_mdp(cfg, w);
    else if (cfg.subcommand == "verify-mdp")
        cmd_verify_mdp(cfg, w);
    else if (cfg.subcommand == "scaling-check")
        cmd_scaling_check(cfg, w);
    else if (cfg.subcommand == "hs-check")
        cmd_hs_check(cfg, w);
    else if (cfg.subcommand == "clt-density")
        cmd_clt_density(cfg, w);
    else
        throw DomainError("unknown subcommand: " + cfg.subcommand);
    return 0;
}

}  // namespace mflab::cli
