#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gelkit/config.hpp"
#include "gelkit/gelation.hpp"
#include "gelkit/kinetics.hpp"
#include "gelkit/molweight.hpp"
#include "gelkit/oracle.hpp"

namespace gelkit {

/// Moment trajectory for the configured run: to run.t_end if set, otherwise
/// until stationary or the horizon cap.
MomentTrajectory run_trajectory(const SystemSpec& spec, const RunConfig& run);

/// (name, value) of every parameter the configured preset takes, defaults filled.
std::vector<std::pair<std::string, double>> system_parameters(const SystemConfig& system);

struct TrajectoryOutput {
    std::filesystem::path csv;
    std::vector<std::filesystem::path> degree_csvs;
    double t_end = 0.0;
    std::size_t rows = 0;
};

/// trajectory.csv (t, mu_k, p_k) plus degrees_<n>.csv (i_k, probability) for
/// each run.degree_times entry.
TrajectoryOutput cmd_trajectory(const ScenarioConfig& config);

struct GelpointOutput {
    GelReport report;
    nlohmann::json json;
    std::filesystem::path json_path;
    std::filesystem::path csv;
};

/// gel.json and a one-row gel.csv (parameters, t_gel, p_k at gel, pCrit).
GelpointOutput cmd_gelpoint(const ScenarioConfig& config);

struct SweepRow {
    std::vector<double> parameters;
    GelReport report;
};

struct SweepOutput {
    std::vector<std::string> parameter_names;
    std::vector<SweepRow> rows;
    std::size_t skipped = 0;
    std::filesystem::path csv;
};

/// sweep.csv over the cartesian grid alpha x beta x w in grid order.
/// Infeasible points (alpha + beta >= 1) are skipped with a notice on `log`.
SweepOutput cmd_sweep(const ScenarioConfig& config, std::ostream& log);

struct MwdOutput {
    SizeDistribution sizes;
    std::vector<MwReport> mw_curve;
    std::optional<double> t_gel;
    std::filesystem::path size_csv;
    std::filesystem::path mw_csv;
};

/// size_distribution.csv (s, w_s, cumulative) at run.mwd_time (default half the
/// gel time) and mw_curve.csv (t, mw) from 0 up to the lower gel bracket.
MwdOutput cmd_mwd(const ScenarioConfig& config);

struct SimulateOutput {
    std::vector<McRun> runs;
    double t_end = 0.0;
    std::vector<std::filesystem::path> replica_csvs;
    std::filesystem::path summary_csv;
};

/// mc_replica_<k>.csv (t, mu_hat_k, largest_fraction, susceptibility) for each
/// replica and mc_summary.csv with per-replica onset times.
SimulateOutput cmd_simulate(const ScenarioConfig& config);

} // namespace gelkit
