#pragma once

#include "config.hpp"

namespace mflab::cli {

// Executes one subcommand: writes the report and CSV artifacts to the output
// directory and prints the report to stdout. Throws on any failure.
int run_command(const ExperimentConfig& cfg);

}  // namespace mflab::cli
