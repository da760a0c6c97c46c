#include "plot.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mflab/errors.hpp"

namespace mflab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string prelude(const std::string& sub) {
    std::ostringstream os;
    os << "#!/usr/bin/env python3\n"
       << "# Renders the " << sub << " tables that sit next to this script.\n"
       << "import csv\n"
       << "import os\n"
       << "\n"
       << "import matplotlib\n"
       << "matplotlib.use(\"Agg\")\n"
       << "import matplotlib.pyplot as plt\n"
       << "\n"
       << "HERE = os.path.dirname(os.path.abspath(__file__))\n"
       << "\n"
       << "def load(name):\n"
       << "    with open(os.path.join(HERE, name)) as fh:\n"
       << "        return list(csv.DictReader(fh))\n"
       << "\n";
    return os.str();
}

std::string csv_name(const json& report, const char* label) {
    const json& files = report.at("files");
    if (!files.contains(label))
        throw DomainError(std::string("report carries no \"") + label +
                          "\" table; rerun with output.formats including csv");
    return files.at(label).get<std::string>();
}

std::string number(const json& v) { return v.dump(); }

std::string script_distribution(const json& report, const std::string& sub) {
    std::ostringstream os;
    os << prelude(sub);
    os << "rows = load(\"" << csv_name(report, "distribution") << "\")\n"
       << "k = [int(r[\"k\"]) for r in rows]\n"
       << "p = [float(r[\"prob\"]) for r in rows]\n"
       << "plt.figure(figsize=(7, 4))\n"
       << "plt.bar(k, p, width=1.6)\n"
       << "plt.xlabel(\"k\")\n"
       << "plt.ylabel(\"P(k)\")\n"
       << "plt.title(\"" << sub << "\")\n"
       << "plt.tight_layout()\n"
       << "plt.savefig(os.path.join(HERE, \"" << sub << ".png\"), dpi=160)\n";
    return os.str();
}

std::string script_landscape(const json& report) {
    std::ostringstream os;
    os << prelude("landscape");
    os << "rows = load(\"" << csv_name(report, "curve") << "\")\n"
       << "s = [float(r[\"s\"]) for r in rows]\n"
       << "plt.figure(figsize=(7, 4))\n"
       << "plt.plot(s, [float(r[\"G\"]) for r in rows], label=\"G\")\n"
       << "if \"Gn\" in rows[0]:\n"
       << "    plt.plot(s, [float(r[\"Gn\"]) for r in rows], \"--\", label=\"Gn\")\n";
    os << "minima = [";
    bool first = true;
    for (const json& p : report.at("results").at("minima")) {
        if (!first) os << ", ";
        os << "(" << number(p.at("m")) << ", " << number(p.at("value")) << ")";
        first = false;
    }
    os << "]\n"
       << "plt.scatter([m for m, v in minima], [v for m, v in minima],\n"
       << "            marker=\"v\", color=\"k\", zorder=3, label=\"minima\")\n"
       << "plt.xlabel(\"s\")\n"
       << "plt.ylabel(\"free energy\")\n"
       << "plt.legend()\n"
       << "plt.tight_layout()\n"
       << "plt.savefig(os.path.join(HERE, \"landscape.png\"), dpi=160)\n";
    return os.str();
}

std::string script_critical_beta(const json& report) {
    std::ostringstream os;
    os << prelude("critical-beta");
    os << "rows = load(\"" << csv_name(report, "curvature") << "\")\n"
       << "b = [float(r[\"beta\"]) for r in rows]\n"
       << "c = [float(r[\"curvature\"]) for r in rows]\n"
       << "plt.figure(figsize=(7, 4))\n"
       << "plt.plot(b, c)\n"
       << "plt.axhline(0.0, color=\"k\", lw=0.8)\n"
       << "plt.axvline(" << number(report.at("results").at("beta_c"))
       << ", color=\"r\", ls=\"--\", label=\"beta_c\")\n"
       << "plt.xlabel(\"beta\")\n"
       << "plt.ylabel(\"curvature at the origin\")\n"
       << "plt.legend()\n"
       << "plt.tight_layout()\n"
       << "plt.savefig(os.path.join(HERE, \"critical-beta.png\"), dpi=160)\n";
    return os.str();
}

std::string script_verdict(const json& report, const std::string& sub) {
    std::ostringstream os;
    os << prelude(sub);
    os << "rows = load(\"" << csv_name(report, "verdict") << "\")\n"
       << "n = [int(r[\"n\"]) for r in rows]\n"
       << "r_n = [float(r[\"r_n\"]) for r in rows]\n"
       << "plt.figure(figsize=(7, 4))\n"
       << "plt.semilogx(n, r_n, \"o-\", label=\"r_n\")\n"
       << "plt.axhline("
       << number(report.at("results").at("verdict").at("target"))
       << ", color=\"r\", ls=\"--\", label=\"rate value\")\n"
       << "plt.xlabel(\"n\")\n"
       << "plt.ylabel(\"scaled log-probability\")\n"
       << "plt.legend()\n"
       << "plt.tight_layout()\n"
       << "plt.savefig(os.path.join(HERE, \"" << sub << ".png\"), dpi=160)\n";
    return os.str();
}

std::string script_scaling(const json& report) {
    std::ostringstream os;
    os << prelude("scaling-check");
    os << "rows = load(\"" << csv_name(report, "table") << "\")\n"
       << "n = [int(r[\"n\"]) for r in rows]\n"
       << "e = [float(r[\"sup_error\"]) for r in rows]\n"
       << "plt.figure(figsize=(7, 4))\n"
       << "plt.loglog(n, e, \"o-\")\n"
       << "plt.xlabel(\"n\")\n"
       << "plt.ylabel(\"sup error over the s grid\")\n"
       << "plt.tight_layout()\n"
       << "plt.savefig(os.path.join(HERE, \"scaling-check.png\"), dpi=160)\n";
    return os.str();
}

std::string script_density(const json& report, const std::string& sub) {
    std::ostringstream os;
    os << prelude(sub);
    os << "rows = load(\"" << csv_name(report, "density") << "\")\n"
       << "s = [float(r[\"s\"]) for r in rows]\n"
       << "d = [float(r[\"density\"]) for r in rows]\n"
       << "plt.figure(figsize=(7, 4))\n"
       << "plt.plot(s, d)\n"
       << "plt.xlabel(\"s\")\n"
       << "plt.ylabel(\"density\")\n"
       << "plt.title(\"" << sub << "\")\n"
       << "plt.tight_layout()\n"
       << "plt.savefig(os.path.join(HERE, \"" << sub << ".png\"), dpi=160)\n";
    return os.str();
}

}  // namespace

std::string emit_plot_script(const std::string& report_path,
                             const std::string& out_path) {
    std::ifstream in(report_path);
    if (!in) throw DomainError("cannot open report " + report_path);
    json report;
    try {
        in >> report;
    } catch (const json::exception& e) {
        throw DomainError("report does not parse as JSON: " + std::string(e.what()));
    }
    if (!report.contains("schema") || report.at("schema") != "v1")
        throw DomainError("unknown report schema version (expected \"v1\")");
    std::string sub = report.at("subcommand").get<std::string>();

    std::string text;
    if (sub == "walk-dist" || sub == "magnetization-dist")
        text = script_distribution(report, sub);
    else if (sub == "landscape")
        text = script_landscape(report);
    else if (sub == "critical-beta")
        text = script_critical_beta(report);
    else if (sub == "walk-mdp" || sub == "verify-mdp")
        text = script_verdict(report, sub);
    else if (sub == "scaling-check")
        text = script_scaling(report);
    else if (sub == "hs-check" || sub == "clt-density")
        text = script_density(report, sub);
    else
        throw DomainError("report subcommand \"" + sub + "\" has no plot template");

    fs::path out = out_path.empty()
                       ? fs::path(report_path).parent_path() / (sub + "-plot.py")
                       : fs::path(out_path);
    std::ofstream os(out);
    if (!os) throw DomainError("cannot write " + out.string());
    os << text;
    return out.string();
}

}  // namespace mflab::cli
