#pragma once

// Task orchestration for the command-line front end: each task writes CSV
// tables, SVG figures, summary.json and manifest.json into an output directory.

#include "conefrac/config.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace conefrac {

inline constexpr const char* version_string = "0.1.0";

struct RunOptions {
    std::string out_dir = ".";
    int threads = 1;
    /// Multiplies nt, ntheta and nr by 2^mesh_level (negative values coarsen).
    int mesh_level = 0;
};

struct RunResult {
    nlohmann::json summary;
    std::vector<std::string> artifacts;  ///< file names relative to out_dir
};

/// Runs config.task. Errors keep their type and gain the task name as context.
RunResult run(const RunConfig& config, const RunOptions& options);

/// Writes a CSV with every number printed as %.17g.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace conefrac
