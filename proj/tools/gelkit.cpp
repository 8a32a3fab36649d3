#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gelkit/commands.hpp"
#include "gelkit/config.hpp"
#include "gelkit/errors.hpp"

using namespace gelkit;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Overrides {
    std::string config_file;
    std::string preset;
    std::string out;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> w;
    std::optional<std::uint64_t> seed;
};

ScenarioConfig build_config(const Overrides& o)
{
    if (o.config_file.empty() && o.preset.empty())
        throw SpecError("give --config FILE or --preset NAME");
    ScenarioConfig c = o.config_file.empty() ? ScenarioConfig{} : load_config(o.config_file);
    if (!o.preset.empty()) {
        if (c.system.preset != o.preset)
            c.system = SystemConfig{};
        c.system.preset = o.preset;
    }
    if (o.alpha)
        c.system.params.alpha = o.alpha;
    if (o.beta)
        c.system.params.beta = o.beta;
    if (o.w)
        c.system.params.w = o.w;
    if (o.seed)
        c.mc.seed = *o.seed;
    if (!o.out.empty())
        c.output.directory = o.out;
    resolve_system(c.system);
    return c;
}

int run(const std::string& command, const ScenarioConfig& c)
{
    if (command == "trajectory") {
        const auto out = cmd_trajectory(c);
        std::cout << "wrote " << out.csv.string() << " (" << out.rows << " rows, t_end " << out.t_end << ")\n";
        for (const auto& p : out.degree_csvs)
            std::cout << "wrote " << p.string() << '\n';
    } else if (command == "gelpoint") {
        const auto out = cmd_gelpoint(c);
        std::cout << out.json.dump(2) << '\n';
    } else if (command == "sweep") {
        const auto out = cmd_sweep(c, std::cerr);
        std::cout << "wrote " << out.csv.string() << " (" << out.rows.size() << " points, " << out.skipped
                  << " skipped)\n";
    } else if (command == "mwd") {
        const auto out = cmd_mwd(c);
        std::cout << "wrote " << out.size_csv.string() << " and " << out.mw_csv.string() << '\n';
    } else {
        const auto out = cmd_simulate(c);
        std::cout << "wrote " << out.replica_csvs.size() << " replica files and " << out.summary_csv.string()
                  << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gelation kinetics of multi-type step-growth polymerization"};
    app.require_subcommand(1, 1);

    Overrides o;
    std::string command;
    for (const char* name : {"trajectory", "gelpoint", "sweep", "mwd", "simulate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", o.config_file, "JSON scenario file");
        sub->add_option("--preset", o.preset, "embedded scenario: single-2-5, a2b5-directed, a2-selfb5, three-type-2-2-5");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--alpha", o.alpha, "preset parameter alpha");
        sub->add_option("--beta", o.beta, "preset parameter beta");
        sub->add_option("--w", o.w, "preset parameter w");
        sub->add_option("--seed", o.seed, "Monte Carlo base seed");
        sub->callback([&command, name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        return run(command, build_config(o));
    } catch (const SpecError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << " (at t = " << e.last_t() << ")\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalError;
    }
}
