// Acceptance criteria. Usage: gelkit_acceptance [id ...]; no ids runs all.
// Prints one PASS/FAIL line per criterion and exits nonzero if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gelkit/commands.hpp"
#include "gelkit/config.hpp"
#include "gelkit/degrees.hpp"
#include "gelkit/gelation.hpp"
#include "gelkit/kinetics.hpp"
#include "gelkit/molweight.hpp"
#include "gelkit/oracle.hpp"

using namespace gelkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    std::function<Outcome()> run;
};

std::string fmt(double x, int digits = 6)
{
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

const OdeTolerance kTight{1e-11, 1e-14};

GelReport gel_of(const SystemSpec& spec, CriterionKind kind = CriterionKind::general_determinant)
{
    return find_gel_time(integrate_until_stationary(spec, kTight), kind);
}

// Shared by 7a and 7b.
std::vector<double> alpha_grid()
{
    std::vector<double> out;
    for (int i = 1; i <= 99; ++i)
        out.push_back(i / 100.0);
    return out;
}

std::vector<GelReport> alpha_sweep(const std::string& preset, std::optional<double> w)
{
    auto c = preset_config(preset);
    c.system.params.w = w;
    c.sweep.alpha = alpha_grid();
    c.output.directory = (fs::temp_directory_path() / "gelkit-acceptance" / (preset + "-sweep")).string();
    std::ostringstream log;
    std::vector<GelReport> out;
    for (const auto& row : cmd_sweep(c, log).rows)
        out.push_back(row.report);
    return out;
}

Outcome closed_form_vs_master()
{
    std::vector<SystemSpec> specs;
    for (double w : {1.0, 0.5, 0.1})
        specs.push_back(preset_spec("single-2-5", {{}, {}, w}));
    for (double a : {0.3, 0.5, 0.7})
        specs.push_back(preset_spec("a2b5-directed", {a, {}, {}}));
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const auto& spec : specs) {
        const auto master = integrate_master(spec, 0.2);
        const auto traj = integrate_moments(spec, 0.2, kTight);
        for (double t : {0.01, 0.05, 0.2}) {
            const auto state = master.state(t);
            const auto closed = species_dist(spec, conversion(traj, t));
            for (std::size_t s = 0; s < state.tables.size(); ++s)
                for (std::size_t f = 0; f < state.tables[s].size(); ++f)
                    worst = std::max(worst, std::abs(state.tables[s][f] - closed.tables[s][f]));
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst <= 1e-8 && secs < 10.0, "max |M_master - M_closed| = " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s"};
}

Outcome moment_path_consistency()
{
    double worst = 0.0;
    for (const auto& name : preset_names()) {
        const auto spec = preset_spec(name);
        const auto traj = integrate_until_stationary(spec);
        const double t_hi = std::min(traj.t_end(), 5.0);
        for (int i = 1; i <= 20; ++i) {
            // log-spaced over three decades up to t_hi
            const double t = t_hi * std::pow(10.0, -3.0 * (20 - i) / 19.0);
            const auto a = conversion(traj, t).p;
            const auto b = conversion_via_A(traj, t).state.p;
            worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
        }
    }
    return {worst <= 1e-8, "max |p - p_A-path| = " + fmt(worst, 3) + " over 4 presets x 20 times"};
}

Outcome flory_anchors()
{
    const auto homo = make_spec({{{{3}, 1.0}}}, Eigen::MatrixXd::Ones(1, 1));
    const auto g1 = gel_of(homo);
    const double pc = g1.t_gel ? g1.conversions_at_gel.p(0) : std::nan("");
    const auto g2 = gel_of(preset_spec("a2b5-directed", {5.0 / 7.0, {}, {}}));
    const double prod = g2.t_gel ? g2.conversions_at_gel.p(0) * g2.conversions_at_gel.p(1) : std::nan("");
    const bool pass = std::abs(pc - 0.5) <= 1e-10 && std::abs(prod - 0.25) <= 1e-6;
    return {pass, "f=3: p_c = " + fmt(pc, 15) + "; balanced A2+B5: p_A p_B = " + fmt(prod, 12)};
}

Outcome criterion_agreement()
{
    double worst_structural = 0.0, worst_polynomial = 0.0;
    bool all_found = true;
    for (const auto& name : preset_names()) {
        const auto traj = integrate_until_stationary(preset_spec(name), kTight);
        const auto g = find_gel_time(traj, CriterionKind::general_determinant);
        const auto s = find_gel_time(traj, CriterionKind::two_type_structural);
        const auto p = find_gel_time(traj, CriterionKind::two_type_polynomial);
        if (!g.t_gel || !s.t_gel || !p.t_gel) {
            all_found = false;
            continue;
        }
        worst_structural = std::max(worst_structural, std::abs(*g.t_gel - *s.t_gel));
        worst_polynomial = std::max(worst_polynomial, std::abs(*g.t_gel - *p.t_gel));
    }
    return {all_found && worst_structural <= 1e-8 && worst_polynomial <= 1e-8,
            "max |dt| general/structural = " + fmt(worst_structural, 3) +
                ", general/polynomial = " + fmt(worst_polynomial, 3)};
}

Outcome monte_carlo()
{
    const auto start = std::chrono::steady_clock::now();
    const auto spec = preset_spec("single-2-5");
    const std::int64_t n = 100000;
    const auto traj = integrate_until_stationary(spec, kTight);
    const auto gel = find_gel_time(traj, CriterionKind::general_determinant);
    if (!gel.t_gel)
        return {false, "no gel point from the moment equations"};

    McOptions opt;
    opt.monomers = n;
    opt.t_end = 0.1;
    opt.seed = 2024;
    opt.sample_times = {0.02, 0.05, 0.1};
    opt.record_events = false;
    const int replicas = 16;
    const auto runs = simulate_replicas(spec, opt, replicas);

    bool band_ok = true;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < opt.sample_times.size(); ++i) {
        const double t = opt.sample_times[i];
        for (int k = 0; k < 2; ++k) {
            double mean = 0.0;
            for (const auto& r : runs)
                mean += r.samples[i].mu_hat[static_cast<std::size_t>(k)] / replicas;
            const double band = 3.0 * std::sqrt(traj.moments().nu1(k) / static_cast<double>(n));
            const double dev = std::abs(mean - traj.mu(t)(k));
            worst_ratio = std::max(worst_ratio, dev / band);
            band_ok = band_ok && dev <= band;
        }
    }

    double onset = 0.0;
    int observed = 0;
    for (const auto& r : runs)
        if (const auto o = giant_onset(r); o.observed()) {
            onset += *o.threshold_time;
            ++observed;
        }
    onset = observed ? onset / observed : std::nan("");
    const double delta = *gel.t_gel * std::pow(static_cast<double>(n), -1.0 / 3.0);
    const bool onset_ok = observed == replicas && std::abs(onset - *gel.t_gel) <= 5 * delta;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {band_ok && onset_ok && secs < 60.0,
            "worst replica-mean deviation = " + fmt(worst_ratio, 3) + " x band; onset " + fmt(onset) + " vs t_gel " +
                fmt(*gel.t_gel) + " +- " + fmt(5 * delta, 3) + " (" + std::to_string(observed) + "/16 observed); " +
                fmt(secs, 3) + " s"};
}

Outcome molecular_weight()
{
    double worst_mass = 0.0, worst_mw = 0.0, smallest_blowup = INFINITY;
    for (const auto& name : preset_names()) {
        const auto spec = preset_spec(name);
        const auto traj = integrate_until_stationary(spec, kTight);
        const auto gel = find_gel_time(traj, CriterionKind::general_determinant);
        if (!gel.t_gel)
            return {false, name + ": no gel point"};
        const auto conv = conversion(traj, 0.5 * *gel.t_gel);
        const auto sizes = size_series(spec, conv, 1024);
        double mass = 0.0;
        for (double w : sizes.w)
            mass += w;
        worst_mass = std::max(worst_mass, 1.0 - mass);
        const double mw = weight_avg_mw(spec, conv).mw;
        worst_mw = std::max(worst_mw, std::abs(sizes.weight_average() - mw) / mw);
        smallest_blowup = std::min(smallest_blowup, weight_avg_mw(spec, conversion(traj, gel.bracket_lo)).mw);
    }
    return {worst_mass <= 1e-6 && worst_mw <= 1e-4 && smallest_blowup > 1e6,
            "1 - sum w(s<=1024) <= " + fmt(worst_mass, 3) + "; Mw rel. diff <= " + fmt(worst_mw, 3) +
                "; min Mw at bracket_lo = " + fmt(smallest_blowup, 3)};
}

Outcome sweep_shape()
{
    const auto grid = alpha_grid();
    const auto rows = alpha_sweep("a2b5-directed", std::nullopt);
    std::size_t best = 0;
    bool any = false;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].t_gel && (!any || *rows[i].t_gel < *rows[best].t_gel)) {
            best = i;
            any = true;
        }
    if (!any)
        return {false, "no gel anywhere on the grid"};
    // Gel region is one interval; t_gel decreases into the minimum and increases after it.
    std::size_t first = rows.size(), last = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].t_gel) {
            first = std::min(first, i);
            last = i;
        }
    bool unimodal = true;
    for (std::size_t i = first; i < last; ++i) {
        if (!rows[i].t_gel || !rows[i + 1].t_gel) {
            unimodal = false;
            continue;
        }
        const bool down = *rows[i + 1].t_gel < *rows[i].t_gel;
        if ((i < best && !down) || (i >= best && down))
            unimodal = false;
    }
    const bool ends_empty = !rows.front().t_gel && !rows.back().t_gel;
    const bool interior = best > first && best < last;
    const bool steep = *rows[first].t_gel > 1.5 * *rows[best].t_gel && *rows[last].t_gel > 1.5 * *rows[best].t_gel;
    return {ends_empty && interior && unimodal && steep,
            "gel for alpha in [" + fmt(grid[first]) + ", " + fmt(grid[last]) + "], min t_gel = " +
                fmt(*rows[best].t_gel) + " at alpha = " + fmt(grid[best]) + "; edge t_gel = " +
                fmt(*rows[first].t_gel) + ", " + fmt(*rows[last].t_gel)};
}

Outcome self_consistency()
{
    const auto grid = alpha_grid();
    const auto directed = alpha_sweep("a2b5-directed", std::nullopt);
    const auto self = alpha_sweep("a2-selfb5", 0.1);
    double worst = 0.0, worst_alpha = 0.0;
    int common = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!directed[i].t_gel || !self[i].t_gel)
            continue;
        ++common;
        const double rel = std::abs(self[i].p_crit - directed[i].p_crit) / directed[i].p_crit;
        if (rel > worst) {
            worst = rel;
            worst_alpha = grid[i];
        }
    }
    return {common > 0 && worst <= 0.02, "max relative pCrit difference = " + fmt(100 * worst, 4) + "% at alpha = " +
                                             fmt(worst_alpha) + " over " + std::to_string(common) + " common points"};
}

Outcome profile_difference()
{
    auto gap = [](double w) {
        const auto traj = integrate_until_stationary(preset_spec("single-2-5", {{}, {}, w}));
        double worst = 0.0;
        const auto steps = traj.times();
        for (std::size_t i = 1; i < steps.size(); ++i)
            for (int q = 1; q <= 8; ++q) {
                const double t = steps[i - 1] + (steps[i] - steps[i - 1]) * q / 8.0;
                const auto p = conversion(traj, t).p;
                worst = std::max(worst, std::abs(p(0) - p(1)));
            }
        return worst;
    };
    const double g1 = gap(1.0), g01 = gap(0.1);
    return {g01 > g1, "max |p_A - p_B|: w = 0.1 -> " + fmt(g01) + ", w = 1 -> " + fmt(g1)};
}

Outcome horizon_limit()
{
    const auto traj = integrate_until_stationary(preset_spec("single-2-5"));
    const double mu01 = traj.mu(traj.t_end())(1);
    return {std::abs(mu01 - 5.0) <= 1e-6, "mu_01(t_end) = " + fmt(mu01, 12) + " at t_end = " + fmt(traj.t_end())};
}

Outcome determinism()
{
    auto c = preset_config("single-2-5");
    c.mc.monomers = 20000;
    c.mc.replicas = 2;
    c.mc.seed = 77;
    const fs::path base = fs::temp_directory_path() / "gelkit-acceptance";
    c.output.directory = (base / "det-a").string();
    fs::remove_all(c.output.directory);
    const auto a = cmd_simulate(c);
    c.output.directory = (base / "det-b").string();
    fs::remove_all(c.output.directory);
    const auto b = cmd_simulate(c);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    bool same = a.replica_csvs.size() == b.replica_csvs.size() && slurp(a.summary_csv) == slurp(b.summary_csv);
    std::size_t bytes = 0;
    for (std::size_t i = 0; same && i < a.replica_csvs.size(); ++i) {
        const auto x = slurp(a.replica_csvs[i]);
        same = same && !x.empty() && x == slurp(b.replica_csvs[i]);
        bytes += x.size();
    }
    return {same, std::to_string(a.replica_csvs.size()) + " replica files, " + std::to_string(bytes) +
                      " bytes, identical = " + (same ? "yes" : "no")};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {"1", "closed form vs master equation", closed_form_vs_master},
        {"2", "conversion vs A-path", moment_path_consistency},
        {"3", "Flory anchors", flory_anchors},
        {"4", "gel criteria agree", criterion_agreement},
        {"5", "Monte Carlo convergence and onset", monte_carlo},
        {"6", "size distribution and Mw", molecular_weight},
        {"7a", "directed sweep shape", sweep_shape},
        {"7b", "self-bond sweep within 2% of directed", self_consistency},
        {"7c", "w = 0.1 profiles differ more than w = 1", profile_difference},
        {"8", "default horizon reaches mu_01 = 5", horizon_limit},
        {"9", "simulate output is byte-identical", determinism},
    };

    std::vector<std::string> wanted(argv + 1, argv + argc);
    int failures = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
            continue;
        ++ran;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << "  " << c.title << "  [" << o.detail << "]\n";
    }
    if (ran == 0) {
        std::cerr << "no such criterion\n";
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
