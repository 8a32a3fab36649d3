#include "gelkit/commands.hpp"

#include <cmath>
#include <ostream>

#include "gelkit/csv.hpp"
#include "gelkit/degrees.hpp"
#include "gelkit/errors.hpp"
#include "gelkit/parallel.hpp"

namespace gelkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path output_dir(const ScenarioConfig& config)
{
    fs::path dir(config.output.directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw SpecError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

std::vector<std::string> indexed(const std::string& prefix, int r)
{
    std::vector<std::string> out;
    for (int k = 1; k <= r; ++k)
        out.push_back(prefix + std::to_string(k));
    return out;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

GelReport gel_report(const SystemSpec& spec, const RunConfig& run)
{
    return find_gel_time(run_trajectory(spec, run), run.criterion);
}

// Columns shared by gel.csv and sweep.csv after the parameter columns.
std::vector<double> gel_fields(const GelReport& g, int r)
{
    const double nan = std::nan("");
    std::vector<double> out{g.t_gel.value_or(nan)};
    for (int k = 0; k < r; ++k)
        out.push_back(g.t_gel ? g.conversions_at_gel.p(k) : nan);
    out.push_back(g.t_gel ? g.p_crit : nan);
    return out;
}

std::vector<std::string> gel_columns(int r)
{
    std::vector<std::string> out{"t_gel"};
    for (const auto& c : indexed("p_", r))
        out.push_back(c);
    out.push_back("pCrit");
    return out;
}

} // namespace

MomentTrajectory run_trajectory(const SystemSpec& spec, const RunConfig& run)
{
    const OdeTolerance tol{run.rtol, run.atol};
    if (run.t_end)
        return integrate_moments(spec, *run.t_end, tol);
    return integrate_until_stationary(spec, tol, HorizonRule{1e-10, run.horizon_cap});
}

std::vector<std::pair<std::string, double>> system_parameters(const SystemConfig& system)
{
    std::vector<std::pair<std::string, double>> out;
    if (system.preset.empty())
        return out;
    const PresetParams p = resolve_params(system.preset, system.params);
    if (p.alpha)
        out.emplace_back("alpha", *p.alpha);
    if (p.beta)
        out.emplace_back("beta", *p.beta);
    if (p.w)
        out.emplace_back("w", *p.w);
    return out;
}

TrajectoryOutput cmd_trajectory(const ScenarioConfig& config)
{
    const SystemSpec spec = resolve_system(config.system);
    const int r = spec.group_types();
    const auto traj = run_trajectory(spec, config.run);
    const fs::path dir = output_dir(config);

    TrajectoryOutput out;
    out.t_end = traj.t_end();
    out.csv = dir / "trajectory.csv";

    std::vector<std::string> header{"t"};
    for (const auto& c : indexed("mu_", r))
        header.push_back(c);
    for (const auto& c : indexed("p_", r))
        header.push_back(c);
    CsvWriter csv(out.csv, header);

    // Accepted steps, each split in four so curves stay smooth where steps are long.
    const auto steps = traj.times();
    std::vector<double> times{steps.front()};
    for (std::size_t i = 1; i < steps.size(); ++i)
        for (int q = 1; q <= 4; ++q)
            times.push_back(q == 4 ? steps[i] : steps[i - 1] + (steps[i] - steps[i - 1]) * q / 4.0);
    for (double t : times) {
        const Eigen::VectorXd mu = traj.mu(t);
        const ConversionState c = conversion_from_mu(traj.moments(), t, mu);
        std::vector<double> row{t};
        for (int k = 0; k < r; ++k)
            row.push_back(mu(k));
        for (int k = 0; k < r; ++k)
            row.push_back(c.p(k));
        csv.row(row);
    }
    out.rows = csv.rows();

    for (std::size_t n = 0; n < config.run.degree_times.size(); ++n) {
        const double t = config.run.degree_times[n];
        if (t > traj.t_end())
            throw SpecError("degree time " + format_number(t) + " lies beyond the trajectory end " +
                            format_number(traj.t_end()));
        const auto dist = degree_dist(spec, conversion(traj, t));
        const fs::path path = dir / ("degrees_" + std::to_string(n) + ".csv");
        std::vector<std::string> h = indexed("i_", r);
        h.push_back("probability");
        CsvWriter dcsv(path, h);
        for (std::size_t f = 0; f < dist.table.size(); ++f) {
            std::vector<double> row;
            for (int d : dist.table.degrees(f))
                row.push_back(d);
            row.push_back(dist.table[f]);
            dcsv.row(row);
        }
        out.degree_csvs.push_back(path);
    }
    return out;
}

GelpointOutput cmd_gelpoint(const ScenarioConfig& config)
{
    const SystemSpec spec = resolve_system(config.system);
    const int r = spec.group_types();
    const fs::path dir = output_dir(config);
    const auto params = system_parameters(config.system);

    GelpointOutput out;
    out.report = gel_report(spec, config.run);
    const GelReport& g = out.report;

    json& j = out.json;
    if (!config.system.preset.empty())
        j["preset"] = config.system.preset;
    for (const auto& [name, value] : params)
        j[name] = value;
    j["criterion"] = std::string(to_string(g.criterion));
    j["horizon"] = g.horizon;
    if (g.t_gel) {
        j["status"] = "gel";
        j["t_gel"] = *g.t_gel;
        j["conversions"] = std::vector<double>(g.conversions_at_gel.p.data(), g.conversions_at_gel.p.data() + r);
        j["pCrit"] = g.p_crit;
        j["bracket"] = {g.bracket_lo, g.bracket_hi};
        j["refinement_width"] = g.refinement_width;
    } else {
        j["status"] = "none within horizon";
        j["t_gel"] = nullptr;
    }

    out.json_path = dir / "gel.json";
    {
        std::ofstream f(out.json_path, std::ios::binary);
        if (!f)
            throw SpecError("cannot write '" + out.json_path.string() + "'");
        f << j.dump(2) << '\n';
    }

    std::vector<std::string> header;
    std::vector<double> row;
    for (const auto& [name, value] : params) {
        header.push_back(name);
        row.push_back(value);
    }
    for (const auto& c : gel_columns(r))
        header.push_back(c);
    for (double v : gel_fields(g, r))
        row.push_back(v);
    out.csv = dir / "gel.csv";
    CsvWriter(out.csv, header).row(row);
    return out;
}

SweepOutput cmd_sweep(const ScenarioConfig& config, std::ostream& log)
{
    if (config.sweep.empty())
        throw SpecError("sweep: the config has no sweep grid");
    if (config.system.preset.empty())
        throw SpecError("sweep: grids apply to preset parameters; the system needs a preset");
    const std::string& preset = config.system.preset;
    const PresetParams defaults = preset_defaults(preset);
    const int r = preset_spec(preset, config.system.params).group_types();

    SweepOutput out;
    std::vector<const std::vector<double>*> axes;
    auto add_axis = [&](const std::vector<double>& g, const std::optional<double>& accepted, const char* name) {
        if (g.empty())
            return;
        if (!accepted)
            throw SpecError("sweep: preset " + preset + " takes no parameter " + name);
        axes.push_back(&g);
        out.parameter_names.emplace_back(name);
    };
    add_axis(config.sweep.alpha, defaults.alpha, "alpha");
    add_axis(config.sweep.beta, defaults.beta, "beta");
    add_axis(config.sweep.w, defaults.w, "w");

    // Grid points in row-major order, last axis fastest.
    std::vector<std::vector<double>> points{{}};
    for (const auto* axis : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& p : points)
            for (double v : *axis) {
                next.push_back(p);
                next.back().push_back(v);
            }
        points = std::move(next);
    }

    auto params_at = [&](const std::vector<double>& point) {
        PresetParams p = config.system.params;
        for (std::size_t a = 0; a < point.size(); ++a) {
            const auto& name = out.parameter_names[a];
            (name == "alpha" ? p.alpha : name == "beta" ? p.beta : p.w) = point[a];
        }
        return resolve_params(preset, p);
    };

    std::vector<bool> feasible(points.size(), true);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PresetParams p = params_at(points[i]);
        if (p.alpha && p.beta && *p.alpha + *p.beta >= 1.0) {
            feasible[i] = false;
            ++out.skipped;
            log << "notice: skipping alpha=" << format_number(*p.alpha) << " beta=" << format_number(*p.beta)
                << " (alpha + beta >= 1)\n";
        }
    }

    auto reports = parallel_map(points.size(), worker_count(), [&](std::size_t i) -> std::optional<GelReport> {
        if (!feasible[i])
            return std::nullopt;
        return gel_report(preset_spec(preset, params_at(points[i])), config.run);
    });

    const fs::path dir = output_dir(config);
    std::vector<std::string> header = out.parameter_names;
    for (const auto& c : gel_columns(r))
        header.push_back(c);
    out.csv = dir / "sweep.csv";
    CsvWriter csv(out.csv, header);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!reports[i])
            continue;
        std::vector<double> row = points[i];
        for (double v : gel_fields(*reports[i], r))
            row.push_back(v);
        csv.row(row);
        out.rows.push_back({points[i], *reports[i]});
    }
    return out;
}

MwdOutput cmd_mwd(const ScenarioConfig& config)
{
    const SystemSpec spec = resolve_system(config.system);
    const auto traj = run_trajectory(spec, config.run);
    const GelReport gel = find_gel_time(traj, config.run.criterion);
    const fs::path dir = output_dir(config);

    MwdOutput out;
    out.t_gel = gel.t_gel;
    const double t_hi = gel.t_gel ? gel.bracket_lo : traj.t_end();

    const double t_snap = config.run.mwd_time.value_or(0.5 * t_hi);
    if (t_snap > t_hi || (gel.t_gel && t_snap >= *gel.t_gel))
        throw SpecError("mwd: snapshot time " + format_number(t_snap) + " is not before the gel point " +
                        format_number(t_hi));
    out.sizes = size_series(spec, conversion(traj, t_snap), config.run.series_order);

    out.size_csv = dir / "size_distribution.csv";
    {
        CsvWriter csv(out.size_csv, {"s", "w_s", "cumulative"});
        double cumulative = 0.0;
        for (std::size_t s = 0; s < out.sizes.w.size(); ++s) {
            cumulative += out.sizes.w[s];
            csv.row({static_cast<double>(s + 1), out.sizes.w[s], cumulative});
        }
    }

    out.mw_csv = dir / "mw_curve.csv";
    CsvWriter csv(out.mw_csv, {"t", "mw"});
    for (double t : linspace(0.0, t_hi, config.run.mw_points)) {
        MwReport m = weight_avg_mw(spec, conversion(traj, t));
        csv.row({t, m.mw});
        out.mw_curve.push_back(m);
    }
    return out;
}

SimulateOutput cmd_simulate(const ScenarioConfig& config)
{
    const SystemSpec spec = resolve_system(config.system);
    const int r = spec.group_types();

    SimulateOutput out;
    if (config.mc.t_end) {
        out.t_end = *config.mc.t_end;
    } else {
        const GelReport gel = gel_report(spec, config.run);
        out.t_end = gel.t_gel ? 2.0 * *gel.t_gel : gel.horizon;
    }

    McOptions opt;
    opt.monomers = config.mc.monomers;
    opt.t_end = out.t_end;
    opt.seed = config.mc.seed;
    opt.sample_times = linspace(0.0, out.t_end, config.mc.samples);
    opt.record_events = false;
    out.runs = simulate_replicas(spec, opt, config.mc.replicas);

    const fs::path dir = output_dir(config);
    std::vector<std::string> header{"t"};
    for (const auto& c : indexed("mu_hat_", r))
        header.push_back(c);
    header.push_back("largest_fraction");
    header.push_back("susceptibility");
    for (std::size_t i = 0; i < out.runs.size(); ++i) {
        const fs::path path = dir / ("mc_replica_" + std::to_string(i) + ".csv");
        CsvWriter csv(path, header);
        for (const auto& s : out.runs[i].samples) {
            std::vector<double> row{s.t};
            row.insert(row.end(), s.mu_hat.begin(), s.mu_hat.end());
            row.push_back(s.largest_fraction);
            row.push_back(s.susceptibility);
            csv.row(row);
        }
        out.replica_csvs.push_back(path);
    }

    out.summary_csv = dir / "mc_summary.csv";
    CsvWriter csv(out.summary_csv,
                  {"replica", "seed", "t_final", "threshold_time", "susceptibility_peak_time", "largest_fraction"});
    for (std::size_t i = 0; i < out.runs.size(); ++i) {
        const McRun& run = out.runs[i];
        const GiantOnset onset = giant_onset(run);
        csv.row({static_cast<double>(i), static_cast<double>(run.seed), run.t_final,
                 onset.threshold_time.value_or(std::nan("")),
                 onset.susceptibility_peak_time.value_or(std::nan("")),
                 static_cast<double>(run.largest) / static_cast<double>(run.monomers)});
    }
    return out;
}

} // namespace gelkit
