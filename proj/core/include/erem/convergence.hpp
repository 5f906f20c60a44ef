#pragma once

#include "erem/problems.hpp"

#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace erem {

struct ConvRow {
    double h = 0.0;
    double dt = 0.0;
    double t_sample = 0.0;
    double error = 0.0;
};

/// Result of a refinement study: per-level errors plus the least-squares
/// slope of log(error) against log(refined parameter).
struct ConvergenceTable {
    std::string study_kind; // "temporal" | "spatial"
    std::string problem;
    std::vector<ConvRow> rows;
    double fitted_order = std::numeric_limits<double>::quiet_NaN();
    double theoretical_order = std::numeric_limits<double>::quiet_NaN();
    bool exact_floor = false; // errors at solver-tolerance level; no fit
    // spatial: relative change of the finest-level error under dt halving;
    // temporal: relative change of the largest error under reference doubling
    // (only filled when the corresponding check ran).
    double consistency_check = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0.0;
};

struct StudyOptions {
    MassMode mass_mode = MassMode::lumped;
    Scheme scheme = Scheme::erem;
    KrylovParams krylov;
    int jobs = 0;       // 0 = hardware concurrency
    int ref_factor = 16; // temporal reference dt = min(dt)/ref_factor
    bool consistency_check = true;
};

/// Least-squares slope of log(error) vs log(parameter); needs >= 3 rows with
/// positive errors. Throws "insufficient-data" otherwise.
double estimate_order(const std::vector<std::pair<double, double>>& param_error);
double estimate_order(const std::vector<ConvRow>& rows, bool refine_in_dt);

/// ||numeric - reference||_M on a shared discretization.
double error_vs_vector(const DiscreteOperators& ops, const Vec& numeric, const Vec& reference);

/// ||numeric - P_h exact(., t)||_M.
double error_vs_exact(const DiscreteOperators& ops, const Vec& numeric,
                      const SpaceTimeFn& exact, double t);

/// P1 interpolation of a coarse free-dof vector onto the next uniform
/// refinement (exact embedding for nested meshes).
Vec prolong(const DiscreteOperators& coarse, const DiscreteOperators& fine, const Vec& coarse_free);

/// Errors at t = T against a same-mesh reference run with
/// dt_ref = min(dt_list)/ref_factor; the mesh is fixed so spatial error
/// cancels. dt_list must be strictly decreasing and divide T.
ConvergenceTable run_temporal_study(const ProblemSpec& p, double h_fixed,
                                    const std::vector<double>& dt_list, const StudyOptions& opt);

/// Errors at t = T over `levels` successive uniform refinements starting at
/// base_h, all at the fixed dt; reference is the exact solution when
/// available, else the next-finer level prolonged.
ConvergenceTable run_spatial_study(const ProblemSpec& p, double base_h, int levels,
                                   double dt_fixed, const StudyOptions& opt);

/// CSV with header "study,problem,h,dt,t,error", one row per measurement at
/// full precision, then "# key = value" summary comment lines.
void write_csv(const ConvergenceTable& t, std::ostream& os);

/// Two-column log10(param) log10(error) rows for plotting.
void write_loglog(const ConvergenceTable& t, std::ostream& os);

} // namespace erem
