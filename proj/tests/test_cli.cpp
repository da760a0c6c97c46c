#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh working directory per test case invocation.
fs::path scratch_dir() {
    static int counter = 0;
    fs::path d = fs::temp_directory_path() /
                 ("mflab-cli-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter++));
    fs::create_directories(d);
    return d;
}

RunResult run_cli(const std::string& args, const std::string& outdir_env = "") {
    fs::path cap = scratch_dir() / "stdout.txt";
    std::string cmd = "MFLAB_OUTDIR=" + outdir_env + " \"" + MFLAB_CLI_PATH + "\" " +
                      args + " > \"" + cap.string() + "\" 2>&1";
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(cap)};
}

json parse_report(const std::string& text) { return json::parse(text); }

}  // namespace

TEST_CASE("fair-walk law: csv atoms and report fields") {
    fs::path dir = scratch_dir();
    RunResult r = run_cli(
        "walk-dist --set run.n=2 --set system.kind=constant-field"
        " --set system.field=constant:0.5 --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);

    json report = parse_report(r.out);
    CHECK(report["schema"] == "v1");
    CHECK(report["subcommand"] == "walk-dist");
    CHECK(report["seed"] == 1);
    CHECK(report["results"]["n"] == 2);
    CHECK(report["results"]["mean"].get<double>() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(report["results"]["variance"].get<double>() ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(report["files"]["report"] == "walk-dist-report.json");
    CHECK(report["files"]["distribution"] == "walk-dist.csv");
    // the resolved config echoes the overrides and drops the unused angle
    CHECK(report["config"]["system.kind"] == "constant-field");
    CHECK(!report["config"].contains("system.alpha"));

    // the on-disk report matches what was printed
    CHECK(slurp(dir / "walk-dist-report.json") == r.out);

    std::string csv = slurp(dir / "walk-dist.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "k,log_prob,prob");
    std::vector<long> ks;
    std::vector<double> probs;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string k, lp, p;
        std::getline(cells, k, ',');
        std::getline(cells, lp, ',');
        std::getline(cells, p, ',');
        ks.push_back(std::strtol(k.c_str(), nullptr, 10));
        probs.push_back(std::strtod(p.c_str(), nullptr));
    }
    REQUIRE(ks.size() == 3);
    CHECK(ks == std::vector<long>{-2, 0, 2});
    CHECK(probs[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(probs[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("landscape at the degenerate coupling reports a quartic minimum") {
    fs::path dir = scratch_dir();
    RunResult r = run_cli("landscape --set model.beta=1.5 --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    json report = parse_report(r.out);
    auto minima = report["results"]["minima"];
    REQUIRE(minima.size() == 1);
    CHECK(std::fabs(minima[0]["m"].get<double>()) < 1e-9);
    CHECK(minima[0]["two_k"] == 4);
    CHECK(minima[0]["lambda"].get<double>() == doctest::Approx(2.7).epsilon(1e-8));
    CHECK(minima[0]["global"] == true);
    CHECK(fs::exists(dir / "landscape.csv"));
}

TEST_CASE("critical-beta solves the transition point for the rotation field") {
    fs::path dir = scratch_dir();
    RunResult r = run_cli("critical-beta --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    json report = parse_report(r.out);
    CHECK(report["results"]["beta_c"].get<double>() ==
          doctest::Approx(1.5).epsilon(1e-6));
    CHECK(fs::exists(dir / "critical-beta.csv"));
}

TEST_CASE("verify-mdp produces a verdict table with the gaussian target") {
    fs::path dir = scratch_dir();
    RunResult r = run_cli(
        "verify-mdp --set run.n_grid=200,400 --set run.alpha_scaling=0.75"
        " --set run.z=1 --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    json report = parse_report(r.out);
    json verdict = report["results"]["verdict"];
    CHECK(verdict["target"].get<double>() == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(verdict["grid"] == json::array({200, 400}));
    CHECK(verdict["r"].size() == 2);
    CHECK(verdict["window"].is_null());

    std::string csv = slurp(dir / "verify-mdp.csv");
    CHECK(csv.rfind("n,speed,log_prob,r_n,err\n", 0) == 0);
}

TEST_CASE("clt-density wires the classified profile into the normalization") {
    fs::path dir = scratch_dir();
    RunResult r = run_cli("clt-density --set model.beta=1.5 --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    json report = parse_report(r.out);
    CHECK(report["results"]["lambda_tilde"].get<double>() ==
          doctest::Approx(2.7).epsilon(1e-8));
    CHECK(report["results"]["normalization"].get<double>() ==
          doctest::Approx(0.31947512683633555).epsilon(1e-8));
}

TEST_CASE("identical inputs give byte-identical outputs, outdir from environment") {
    fs::path d1 = scratch_dir(), d2 = scratch_dir();
    std::string args = "landscape --set model.beta=1.25 --set run.s_grid=-1:1:11";
    RunResult r1 = run_cli(args, d1.string());
    RunResult r2 = run_cli(args, d2.string());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    // files landed in the environment-selected directories, not ./out
    REQUIRE(fs::exists(d1 / "landscape-report.json"));
    REQUIRE(fs::exists(d2 / "landscape-report.json"));
    CHECK(slurp(d1 / "landscape-report.json") == slurp(d2 / "landscape-report.json"));
    CHECK(slurp(d1 / "landscape.csv") == slurp(d2 / "landscape.csv"));
    CHECK(r1.out == r2.out);
}

TEST_CASE("config violations are collected and reported together") {
    RunResult r = run_cli("landscape --set model.beta=-1 --set bogus.key=3");
    REQUIRE(r.exit_code == 1);
    json err = parse_report(r.out);
    CHECK(err["schema"] == "v1");
    CHECK(err["error"]["type"] == "config");
    std::string joined;
    for (const auto& v : err["error"]["violations"])
        joined += v.get<std::string>() + "\n";
    CHECK(joined.find("model.beta") != std::string::npos);
    CHECK(joined.find("bogus.key") != std::string::npos);
}

TEST_CASE("config file feeds keys, overrides win") {
    fs::path dir = scratch_dir();
    fs::path cfgfile = dir / "run.cfg";
    {
        std::ofstream os(cfgfile);
        os << "# comment line\n"
           << "run.n = 4\n"
           << "system.kind = constant-field\n"
           << "system.field = constant:0.25\n";
    }
    RunResult r = run_cli("walk-dist --config \"" + cfgfile.string() +
                          "\" --set run.n=3 --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    json report = parse_report(r.out);
    CHECK(report["results"]["n"] == 3);
    // mean of S_3 with p = 1/4 is 3 (2p - 1) = -1.5
    CHECK(report["results"]["mean"].get<double>() ==
          doctest::Approx(-1.5).epsilon(1e-13));

    RunResult missing = run_cli("walk-dist --config \"" + dir.string() +
                                "/absent.cfg\" --set run.n=2");
    REQUIRE(missing.exit_code == 1);
    json err = parse_report(missing.out);
    CHECK(err["error"]["type"] == "config");
}

TEST_CASE("plot-script renders a runnable python file next to the report") {
    fs::path dir = scratch_dir();
    RunResult r = run_cli("landscape --out \"" + dir.string() + "\"");
    REQUIRE(r.exit_code == 0);

    RunResult p = run_cli("plot-script \"" + (dir / "landscape-report.json").string() + "\"");
    REQUIRE(p.exit_code == 0);
    json ok = parse_report(p.out);
    CHECK(ok["subcommand"] == "plot-script");
    fs::path script = ok["script"].get<std::string>();
    CHECK(script == dir / "landscape-plot.py");
    std::string text = slurp(script);
    CHECK(text.rfind("#!/usr/bin/env python3", 0) == 0);
    CHECK(text.find("load(\"landscape.csv\")") != std::string::npos);
    CHECK(text.find("savefig") != std::string::npos);
}

TEST_CASE("plot-script rejects missing, malformed, and mismatched reports") {
    fs::path dir = scratch_dir();

    RunResult missing = run_cli("plot-script \"" + (dir / "nope.json").string() + "\"");
    REQUIRE(missing.exit_code == 1);
    CHECK(parse_report(missing.out)["error"]["type"] == "numeric");

    fs::path truncated = dir / "truncated.json";
    { std::ofstream os(truncated); os << "{\"schema\": \"v1\", \"subcomm"; }
    RunResult bad = run_cli("plot-script \"" + truncated.string() + "\"");
    REQUIRE(bad.exit_code == 1);
    json e1 = parse_report(bad.out);
    CHECK(e1["error"]["message"].get<std::string>().find("parse") != std::string::npos);

    fs::path wrong = dir / "wrong-schema.json";
    {
        std::ofstream os(wrong);
        os << json{{"schema", "v0"}, {"subcommand", "landscape"}}.dump();
    }
    RunResult v0 = run_cli("plot-script \"" + wrong.string() + "\"");
    REQUIRE(v0.exit_code == 1);
    json e2 = parse_report(v0.out);
    CHECK(e2["error"]["message"].get<std::string>().find("schema") != std::string::npos);
}

TEST_CASE("json-only output format suppresses the csv table") {
    fs::path dir = scratch_dir();
    RunResult r = run_cli("landscape --set output.formats=json --out \"" +
                          dir.string() + "\"");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "landscape-report.json"));
    CHECK(!fs::exists(dir / "landscape.csv"));
    json report = parse_report(r.out);
    CHECK(!report["files"].contains("curve"));
}
