#pragma once

#include <string>

namespace mflab::cli {

// Reads a "v1" report and writes a standalone python script that renders the
// report's CSV tables. Returns the script path. The script is never executed
// here. out_path empty: `<subcommand>-plot.py` next to the report.
std::string emit_plot_script(const std::string& report_path,
                             const std::string& out_path);

}  // namespace mflab::cli
