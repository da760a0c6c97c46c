#pragma once

#include <map>
#include <string>
#include <vector>

#include "mflab/dynsys.hpp"

namespace mflab::cli {

// Flat dotted-key configuration resolved from defaults, an optional config
// file, and command-line overrides (in that order). MFLAB_OUTDIR wins over
// everything for the output directory.
struct ExperimentConfig {
    std::string subcommand;
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const std::string& raw(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;
    unsigned long long get_seed() const;
    std::vector<long> get_n_grid() const;
    // "lo:hi:count" linspace or an explicit comma-separated list.
    std::vector<double> get_s_grid() const;

    SystemDescriptor build_system() const;
    double x0() const;
    double beta_J() const;
    std::string output_directory() const;
    bool wants_csv() const;
};

// Parses, applies per-subcommand defaults, validates every key, and throws
// ConfigError listing all violations at once.
ExperimentConfig resolve_config(const std::string& subcommand,
                                const std::string& config_path,
                                const std::vector<std::string>& overrides,
                                const std::string& out_flag);

}  // namespace mflab::cli
