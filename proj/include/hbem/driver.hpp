#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "hbem/adapt.hpp"

namespace hbem {

inline constexpr const char* version = "0.1.0";

struct RunOptions {
    bool serial = false;              // one thread: byte-identical outputs
    std::optional<int> levels;        // overrides adapt.levels
    std::optional<std::filesystem::path> out;  // overrides output.dir
    bool field = true;                // compute the field grid when configured
    bool reference = true;            // run the reference solve when configured
};

struct RunSummary {
    std::vector<LevelReport> reports;
    std::filesystem::path out_dir;
};

/// Full pipeline for a validated config; writes levels.csv, trace_final.csv,
/// reference_trace.csv, field_real.csv, field_imag.csv, mesh_final.csv and
/// run_manifest.json into the output directory. Errors propagate.
RunSummary run_problem(ProblemConfig cfg, const RunOptions& opt, std::ostream& log);

/// Loads, validates and runs; returns the process exit status: 0 success,
/// 2 invalid input, 3 numerical failure, 1 anything else. Diagnostics go to
/// `err` prefixed with the failing stage.
int run_config_file(const std::filesystem::path& path, const RunOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace hbem
