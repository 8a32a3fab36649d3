#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gelkit/commands.hpp"
#include "gelkit/config.hpp"
#include "gelkit/csv.hpp"
#include "gelkit/errors.hpp"

using namespace gelkit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "gelkit-tests" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t data_rows(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
        ++n;
    return n == 0 ? 0 : n - 1;
}

int run_cli(const std::string& args)
{
    const int status = std::system((std::string(GELKIT_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kFullConfig = R"({
  "system": {"species": [{"groups": [2, 0], "fraction": 0.25}, {"groups": [0, 3], "fraction": 0.75}],
             "weights": [[0, 1], [1, 0.5]]},
  "run": {"t_end": 3.5, "rtol": 1e-10, "atol": 1e-13, "series_order": 256, "criterion": "two_type_structural",
          "mwd_time": 0.1, "mw_points": 17, "degree_times": [0.1, 0.2]},
  "mc": {"N": 5000, "replicas": 3, "seed": 12345678901, "t_end": 0.4, "samples": 21},
  "output": {"directory": "somewhere/else"}
})";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("numbers are written with '.' and round-trip")
{
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
        const auto s = format_number(x);
        CHECK(s.find(',') == std::string::npos);
        CHECK(std::stod(s) == x);
    }
    CHECK(format_number(3.0) == "3");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("config round-trip is the identity")
{
    const auto full = parse_config(json::parse(kFullConfig));
    CHECK(parse_config(to_json(full)) == full);
    CHECK(full.run.criterion == CriterionKind::two_type_structural);
    CHECK(full.mc.seed == 12345678901ull);
    CHECK(full.system.weights[1][1] == 0.5);

    for (const auto& name : preset_names()) {
        const auto c = preset_config(name);
        CHECK(parse_config(to_json(c)) == c);
        CHECK(to_json(parse_config(to_json(c))) == to_json(c));
    }

    auto sweep = json::parse(R"({"system": {"preset": "three-type-2-2-5", "w": 0.2},
                                 "sweep": {"alpha": {"from": 0.1, "to": 0.9, "count": 9}, "beta": [0.2, 0.4]}})");
    const auto c = parse_config(sweep);
    CHECK(c.sweep.alpha.size() == 9);
    CHECK(c.sweep.alpha[4] == doctest::Approx(0.5));
    CHECK(parse_config(to_json(c)) == c);
}

TEST_CASE("invalid configs are rejected")
{
    auto reject = [](const char* text) { CHECK_THROWS_AS(parse_config(json::parse(text)), SpecError); };
    reject(R"({})");
    reject(R"({"system": {"preset": "nope"}})");
    reject(R"({"system": {"preset": "single-2-5", "alpha": 0.5}})");
    reject(R"({"system": {"preset": "single-2-5"}, "sweep": {"alpha": []}})");
    reject(R"({"system": {"preset": "single-2-5"}, "sweep": {}})");
    reject(R"({"system": {"preset": "a2b5-directed"}, "sweep": {"alpha": [0.5, 1.0]}})");
    reject(R"({"system": {"preset": "single-2-5"}, "run": {"t_end": -1}})");
    reject(R"({"system": {"preset": "single-2-5"}, "run": {"tend": 1}})");
    reject(R"({"system": {"preset": "single-2-5"}, "run": {"criterion": "flory"}})");
    reject(R"({"system": {"preset": "single-2-5"}, "mc": {"N": 3}})");
    reject(R"({"system": {"preset": "single-2-5", "species": [{"groups": [1], "fraction": 1}]}})");
    reject(R"({"system": {"species": [{"groups": [2, 5], "fraction": 0.9}], "weights": [[0, 1], [1, 1]]}})");
    reject(R"({"system": {"species": [{"groups": [2, 5], "fraction": 1}], "weights": [[0, 1], [1]]}})");
    reject(R"({"system": {"preset": "three-type-2-2-5", "alpha": 0.6, "beta": 0.5}})");
    CHECK_THROWS_AS(load_config("/nonexistent/gelkit.json"), SpecError);
}

TEST_CASE("presets build the documented systems")
{
    const auto three = preset_spec("three-type-2-2-5");
    REQUIRE(three.distribution.species.size() == 3);
    CHECK(three.weights(1, 1) == doctest::Approx(0.1));
    CHECK(preset_spec("a2b5-directed").weights(1, 1) == 0.0);
    CHECK(preset_spec("a2-selfb5", {0.3, {}, 0.5}).distribution.species[1].fraction == doctest::Approx(0.7));
    CHECK_THROWS_AS(preset_spec("a2b5-directed", {0.5, {}, 0.1}), SpecError);
}

TEST_CASE("every preset runs end to end")
{
    for (const auto& name : preset_names()) {
        auto c = preset_config(name);
        c.output.directory = scratch("presets/" + name).string();
        c.run.degree_times = {0.01};
        c.mc.monomers = 2000;
        c.mc.samples = 11;

        const auto traj = cmd_trajectory(c);
        CHECK(data_rows(traj.csv) > 10);
        REQUIRE(traj.degree_csvs.size() == 1);
        CHECK(data_rows(traj.degree_csvs[0]) > 1);

        const auto gel = cmd_gelpoint(c);
        CHECK(gel.report.t_gel);
        CHECK(data_rows(gel.csv) == 1);
        CHECK(json::parse(slurp(gel.json_path))["status"] == "gel");

        const auto mwd = cmd_mwd(c);
        CHECK(data_rows(mwd.size_csv) == 1024);
        CHECK(data_rows(mwd.mw_csv) == 200);
        CHECK(mwd.mw_curve.front().mw == 1.0);
        CHECK(mwd.mw_curve.back().mw > 1e6);

        const auto sim = cmd_simulate(c);
        CHECK(data_rows(sim.replica_csvs.at(0)) == 11);
        CHECK(data_rows(sim.summary_csv) == 1);
    }
}

TEST_CASE("trajectory CSV layout")
{
    auto c = preset_config("single-2-5");
    c.output.directory = scratch("layout").string();
    c.run.t_end = 0.5;
    const auto out = cmd_trajectory(c);
    std::ifstream in(out.csv);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "t,mu_1,mu_2,p_1,p_2");
    CHECK(first == "0,0,0,0,0");
    CHECK(out.t_end == 0.5);
}

TEST_CASE("gel point reports none when the system cannot gel")
{
    auto c = preset_config("a2b5-directed");
    c.system.params.alpha = 0.999;
    c.output.directory = scratch("nogel").string();
    const auto out = cmd_gelpoint(c);
    CHECK_FALSE(out.report.t_gel);
    CHECK(out.json["status"] == "none within horizon");
    CHECK(out.json["t_gel"].is_null());
}

TEST_CASE("sweeps run in grid order and skip infeasible points")
{
    auto c = preset_config("three-type-2-2-5");
    c.output.directory = scratch("sweep").string();
    c.sweep.alpha = {0.2, 0.5, 0.7};
    c.sweep.beta = {0.2, 0.4};
    std::ostringstream log;
    const auto out = cmd_sweep(c, log);
    CHECK(out.skipped == 1);
    CHECK(log.str().find("skipping") != std::string::npos);
    REQUIRE(out.rows.size() == 5);
    CHECK(out.rows[0].parameters == std::vector<double>{0.2, 0.2});
    CHECK(out.rows[1].parameters == std::vector<double>{0.2, 0.4});
    CHECK(out.rows[2].parameters == std::vector<double>{0.5, 0.2});
    CHECK(out.rows[3].parameters == std::vector<double>{0.5, 0.4});
    CHECK(out.rows[4].parameters == std::vector<double>{0.7, 0.2});
    CHECK(data_rows(out.csv) == 5);
    std::ifstream in(out.csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "alpha,beta,t_gel,p_1,p_2,pCrit");

    auto bad = preset_config("single-2-5");
    bad.sweep.alpha = {0.5};
    CHECK_THROWS_AS(cmd_sweep(bad, log), SpecError);
    CHECK_THROWS_AS(cmd_sweep(preset_config("single-2-5"), log), SpecError);
}

TEST_CASE("simulate output is reproducible")
{
    auto c = preset_config("single-2-5");
    c.mc.monomers = 3000;
    c.mc.replicas = 2;
    c.output.directory = scratch("sim-a").string();
    const auto a = cmd_simulate(c);
    c.output.directory = scratch("sim-b").string();
    const auto b = cmd_simulate(c);
    for (std::size_t i = 0; i < a.replica_csvs.size(); ++i)
        CHECK(slurp(a.replica_csvs[i]) == slurp(b.replica_csvs[i]));
    CHECK(slurp(a.summary_csv) == slurp(b.summary_csv));
    CHECK(slurp(a.replica_csvs[0]) != slurp(a.replica_csvs[1]));
}

TEST_CASE("command line exit codes")
{
    const auto dir = scratch("exit");
    fs::create_directories(dir);
    CHECK(run_cli("gelpoint --preset single-2-5 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "gel.json"));
    CHECK(run_cli("gelpoint --preset a2b5-directed --alpha 0.999 --out " + dir.string()) == 0);
    CHECK(run_cli("gelpoint --preset nope --out " + dir.string()) == 2);
    CHECK(run_cli("gelpoint --preset single-2-5 --alpha 0.5 --out " + dir.string()) == 2);
    CHECK(run_cli("gelpoint --out " + dir.string()) == 2);
    CHECK(run_cli("frobnicate --preset single-2-5") == 2);

    const auto config = dir / "empty-sweep.json";
    std::ofstream(config) << R"({"system": {"preset": "a2b5-directed"}, "sweep": {"alpha": []}})";
    CHECK(run_cli("sweep --config " + config.string() + " --out " + dir.string()) == 2);

    const auto sweep = dir / "sweep.json";
    std::ofstream(sweep) << R"({"system": {"preset": "a2b5-directed"}, "sweep": {"alpha": [0.4, 0.6]}})";
    CHECK(run_cli("sweep --config " + sweep.string() + " --out " + dir.string()) == 0);
    CHECK(data_rows(dir / "sweep.csv") == 2);
}

}
