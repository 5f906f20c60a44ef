#pragma once

#include "erem/convergence.hpp"

#include <optional>
#include <string>
#include <vector>

namespace erem {

/// Parsed run configuration (JSON file; see README for the schema).
struct RunConfig {
    std::string problem;
    std::string study = "temporal"; // temporal | spatial | single-run
    int levels = 5;
    std::optional<double> base_h;  // defaulted per study when absent
    std::optional<double> base_dt; // coarsest dt (temporal) / fixed dt (spatial)
    KrylovParams krylov;
    MassMode mass_mode = MassMode::lumped;
    Scheme scheme = Scheme::erem;
    std::string output_path = "out";
    std::vector<double> snapshot_times; // single-run only
    int jobs = 0;
    bool svg = false;
};

/// Parse and validate the JSON text. Throws std::runtime_error with messages
/// naming the failure: parse-error (with position), unknown-key, or
/// constraint-violation (with the violated invariant).
RunConfig parse_config(const std::string& text);

/// Fill study-dependent defaults and check constraints that need the problem
/// (base_dt divides T, levels >= 3 for studies). Called by run(); exposed for
/// reuse after CLI overrides.
void finalize_config(RunConfig& cfg);

struct RunResult {
    ConvergenceTable table;         // empty rows for single-run
    std::string csv_path;           // empty for single-run
    std::string summary_path;
    std::vector<std::string> extra_files;
    double final_l2_norm = 0.0;     // single-run only
};

/// Execute the configured study, write the CSV table, the human-readable
/// summary (fitted order, theoretical regime, band verdict) and the log-log
/// plot data under cfg.output_path. Throws on I/O or computation errors with
/// the failing stage named.
RunResult run(RunConfig cfg);

} // namespace erem
