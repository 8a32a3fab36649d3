#include "gelkit/config.hpp"

#include <cmath>
#include <fstream>

#include "gelkit/errors.hpp"

namespace gelkit {

using nlohmann::json;

namespace {

double fraction_param(const std::optional<double>& v, double fallback, const char* name)
{
    const double x = v.value_or(fallback);
    if (!(x > 0.0 && x < 1.0))
        throw SpecError(std::string("preset parameter ") + name + " must lie in (0,1), got " + std::to_string(x));
    return x;
}

double weight_param(const std::optional<double>& v, double fallback)
{
    const double x = v.value_or(fallback);
    if (!(std::isfinite(x) && x >= 0.0))
        throw SpecError("preset parameter w must be finite and non-negative, got " + std::to_string(x));
    return x;
}

Eigen::MatrixXd ab_weights(double w)
{
    Eigen::MatrixXd m(2, 2);
    m << 0.0, 1.0, 1.0, w;
    return m;
}

void reject_unknown(const json& j, const char* section, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        throw SpecError(std::string("config: section '") + section + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw SpecError(std::string("config: unknown key '") + key + "' in '" + section + "'");
    }
}

double number(const json& j, const char* key)
{
    if (!j.is_number())
        throw SpecError(std::string("config: '") + key + "' must be a number");
    return j.get<double>();
}

std::int64_t integer(const json& j, const char* key)
{
    if (!j.is_number_integer())
        throw SpecError(std::string("config: '") + key + "' must be an integer");
    return j.get<std::int64_t>();
}

std::vector<double> number_list(const json& j, const char* key)
{
    if (!j.is_array())
        throw SpecError(std::string("config: '") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : j)
        out.push_back(number(x, key));
    return out;
}

// A grid is either an explicit list or {"from", "to", "count"} (inclusive).
std::vector<double> grid(const json& j, const char* key)
{
    if (j.is_array())
        return number_list(j, key);
    reject_unknown(j, key, {"from", "to", "count"});
    if (!j.contains("from") || !j.contains("to") || !j.contains("count"))
        throw SpecError(std::string("config: grid '") + key + "' needs from, to and count");
    const double a = number(j["from"], "from");
    const double b = number(j["to"], "to");
    const auto n = integer(j["count"], "count");
    if (n < 1)
        throw SpecError(std::string("config: grid '") + key + "' count must be at least 1");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

void check_fraction_grid(const std::vector<double>& g, const char* key)
{
    if (g.empty())
        throw SpecError(std::string("config: sweep grid '") + key + "' is empty");
    for (double x : g)
        if (!(x > 0.0 && x < 1.0))
            throw SpecError(std::string("config: sweep grid '") + key + "' value outside (0,1)");
}

SystemConfig parse_system(const json& j)
{
    reject_unknown(j, "system", {"preset", "alpha", "beta", "w", "species", "weights"});
    SystemConfig s;
    if (j.contains("preset")) {
        if (!j["preset"].is_string())
            throw SpecError("config: 'preset' must be a string");
        s.preset = j["preset"].get<std::string>();
    }
    if (j.contains("alpha"))
        s.params.alpha = number(j["alpha"], "alpha");
    if (j.contains("beta"))
        s.params.beta = number(j["beta"], "beta");
    if (j.contains("w"))
        s.params.w = number(j["w"], "w");
    if (j.contains("species")) {
        if (!j["species"].is_array())
            throw SpecError("config: 'species' must be an array");
        for (const auto& e : j["species"]) {
            reject_unknown(e, "species", {"groups", "fraction"});
            if (!e.contains("groups") || !e.contains("fraction"))
                throw SpecError("config: each species needs groups and fraction");
            Species sp;
            if (!e["groups"].is_array())
                throw SpecError("config: 'groups' must be an array");
            for (const auto& g : e["groups"])
                sp.groups.push_back(static_cast<int>(integer(g, "groups")));
            sp.fraction = number(e["fraction"], "fraction");
            s.species.push_back(std::move(sp));
        }
    }
    if (j.contains("weights")) {
        if (!j["weights"].is_array())
            throw SpecError("config: 'weights' must be an array of rows");
        for (const auto& row : j["weights"])
            s.weights.push_back(number_list(row, "weights"));
    }
    return s;
}

RunConfig parse_run(const json& j)
{
    reject_unknown(j, "run", {"t_end", "horizon_cap", "rtol", "atol", "series_order", "criterion", "mwd_time",
                              "mw_points", "degree_times"});
    RunConfig r;
    if (j.contains("t_end"))
        r.t_end = number(j["t_end"], "t_end");
    if (j.contains("horizon_cap"))
        r.horizon_cap = number(j["horizon_cap"], "horizon_cap");
    if (j.contains("rtol"))
        r.rtol = number(j["rtol"], "rtol");
    if (j.contains("atol"))
        r.atol = number(j["atol"], "atol");
    if (j.contains("series_order"))
        r.series_order = static_cast<int>(integer(j["series_order"], "series_order"));
    if (j.contains("criterion")) {
        if (!j["criterion"].is_string())
            throw SpecError("config: 'criterion' must be a string");
        try {
            r.criterion = criterion_from_string(j["criterion"].get<std::string>());
        } catch (const std::exception& e) {
            throw SpecError(std::string("config: ") + e.what());
        }
    }
    if (j.contains("mwd_time"))
        r.mwd_time = number(j["mwd_time"], "mwd_time");
    if (j.contains("mw_points"))
        r.mw_points = static_cast<int>(integer(j["mw_points"], "mw_points"));
    if (j.contains("degree_times"))
        r.degree_times = number_list(j["degree_times"], "degree_times");

    if (r.t_end && !(*r.t_end > 0.0 && std::isfinite(*r.t_end)))
        throw SpecError("config: run.t_end must be positive");
    if (!(r.horizon_cap >= 0.0 && std::isfinite(r.horizon_cap)))
        throw SpecError("config: run.horizon_cap must be non-negative");
    if (!(r.rtol > 0.0 && r.atol > 0.0))
        throw SpecError("config: ODE tolerances must be positive");
    if (r.series_order < 2)
        throw SpecError("config: run.series_order must be at least 2");
    if (r.mwd_time && !(*r.mwd_time >= 0.0))
        throw SpecError("config: run.mwd_time must be non-negative");
    if (r.mw_points < 2)
        throw SpecError("config: run.mw_points must be at least 2");
    for (double t : r.degree_times)
        if (!(t >= 0.0 && std::isfinite(t)))
            throw SpecError("config: run.degree_times must be non-negative");
    return r;
}

SweepConfig parse_sweep(const json& j)
{
    reject_unknown(j, "sweep", {"alpha", "beta", "w"});
    SweepConfig s;
    if (j.contains("alpha")) {
        s.alpha = grid(j["alpha"], "alpha");
        check_fraction_grid(s.alpha, "alpha");
    }
    if (j.contains("beta")) {
        s.beta = grid(j["beta"], "beta");
        check_fraction_grid(s.beta, "beta");
    }
    if (j.contains("w")) {
        s.w = grid(j["w"], "w");
        if (s.w.empty())
            throw SpecError("config: sweep grid 'w' is empty");
        for (double w : s.w)
            if (!(w >= 0.0 && std::isfinite(w)))
                throw SpecError("config: sweep grid 'w' must be non-negative");
    }
    if (s.empty())
        throw SpecError("config: sweep section has no grid");
    return s;
}

McConfig parse_mc(const json& j)
{
    reject_unknown(j, "mc", {"N", "replicas", "seed", "t_end", "samples"});
    McConfig m;
    if (j.contains("N"))
        m.monomers = integer(j["N"], "N");
    if (j.contains("replicas"))
        m.replicas = static_cast<int>(integer(j["replicas"], "replicas"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            throw SpecError("config: 'seed' must be a non-negative integer");
        m.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("t_end"))
        m.t_end = number(j["t_end"], "t_end");
    if (j.contains("samples"))
        m.samples = static_cast<int>(integer(j["samples"], "samples"));
    if (m.monomers < 10)
        throw SpecError("config: mc.N must be at least 10");
    if (m.replicas < 1)
        throw SpecError("config: mc.replicas must be at least 1");
    if (m.t_end && !(*m.t_end > 0.0 && std::isfinite(*m.t_end)))
        throw SpecError("config: mc.t_end must be positive");
    if (m.samples < 2)
        throw SpecError("config: mc.samples must be at least 2");
    return m;
}

} // namespace

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"single-2-5", "a2b5-directed", "a2-selfb5", "three-type-2-2-5"};
    return names;
}

PresetParams preset_defaults(std::string_view name)
{
    if (name == "single-2-5")
        return {std::nullopt, std::nullopt, 1.0};
    if (name == "a2b5-directed")
        return {0.5, std::nullopt, std::nullopt};
    if (name == "a2-selfb5")
        return {0.5, std::nullopt, 1.0};
    if (name == "three-type-2-2-5")
        return {0.25, 0.25, 0.1};
    throw SpecError("unknown preset '" + std::string(name) + "'");
}

PresetParams resolve_params(std::string_view name, const PresetParams& params)
{
    PresetParams out = preset_defaults(name);
    auto merge = [&](std::optional<double>& slot, const std::optional<double>& given, const char* key) {
        if (!given)
            return;
        if (!slot)
            throw SpecError("preset " + std::string(name) + " takes no parameter " + key);
        slot = given;
    };
    merge(out.alpha, params.alpha, "alpha");
    merge(out.beta, params.beta, "beta");
    merge(out.w, params.w, "w");
    return out;
}

SystemSpec preset_spec(std::string_view name, const PresetParams& params)
{
    const PresetParams p = resolve_params(name, params);
    MonomerDistribution dist;
    if (name == "single-2-5") {
        dist.species = {{{2, 5}, 1.0}};
        return make_spec(dist, ab_weights(weight_param(p.w, 1.0)));
    }
    if (name == "a2b5-directed" || name == "a2-selfb5") {
        const double alpha = fraction_param(p.alpha, 0.5, "alpha");
        dist.species = {{{2, 0}, alpha}, {{0, 5}, 1.0 - alpha}};
        return make_spec(dist, ab_weights(p.w ? weight_param(p.w, 1.0) : 0.0));
    }
    const double alpha = fraction_param(p.alpha, 0.25, "alpha");
    const double beta = fraction_param(p.beta, 0.25, "beta");
    if (alpha + beta >= 1.0)
        throw SpecError("preset three-type-2-2-5 needs alpha + beta < 1");
    dist.species = {{{2, 0}, alpha}, {{0, 2}, beta}, {{0, 5}, 1.0 - alpha - beta}};
    return make_spec(dist, ab_weights(weight_param(p.w, 0.1)));
}

SystemSpec resolve_system(const SystemConfig& system)
{
    if (!system.preset.empty()) {
        if (!system.species.empty() || !system.weights.empty())
            throw SpecError("config: system gives both a preset and explicit species/weights");
        return preset_spec(system.preset, system.params);
    }
    if (system.params.alpha || system.params.beta || system.params.w)
        throw SpecError("config: alpha/beta/w apply to presets only");
    if (system.species.empty())
        throw SpecError("config: system needs a preset or a species list");
    const auto r = system.weights.size();
    Eigen::MatrixXd w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i) {
        if (system.weights[i].size() != r)
            throw SpecError("config: weights must be a square matrix");
        for (std::size_t k = 0; k < r; ++k)
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = system.weights[i][k];
    }
    return make_spec(MonomerDistribution{system.species}, w);
}

ScenarioConfig parse_config(const json& j)
{
    reject_unknown(j, "root", {"system", "run", "sweep", "mc", "output"});
    ScenarioConfig c;
    if (!j.contains("system"))
        throw SpecError("config: missing 'system'");
    c.system = parse_system(j["system"]);
    if (j.contains("run"))
        c.run = parse_run(j["run"]);
    if (j.contains("sweep"))
        c.sweep = parse_sweep(j["sweep"]);
    if (j.contains("mc"))
        c.mc = parse_mc(j["mc"]);
    if (j.contains("output")) {
        reject_unknown(j["output"], "output", {"directory"});
        if (j["output"].contains("directory")) {
            if (!j["output"]["directory"].is_string())
                throw SpecError("config: output.directory must be a string");
            c.output.directory = j["output"]["directory"].get<std::string>();
        }
    }
    resolve_system(c.system);
    return c;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SpecError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SpecError("config '" + path + "': " + e.what());
    }
    return parse_config(j);
}

json to_json(const ScenarioConfig& c)
{
    json j;
    json& sys = j["system"];
    sys = json::object();
    if (!c.system.preset.empty())
        sys["preset"] = c.system.preset;
    if (c.system.params.alpha)
        sys["alpha"] = *c.system.params.alpha;
    if (c.system.params.beta)
        sys["beta"] = *c.system.params.beta;
    if (c.system.params.w)
        sys["w"] = *c.system.params.w;
    if (!c.system.species.empty()) {
        sys["species"] = json::array();
        for (const auto& s : c.system.species)
            sys["species"].push_back({{"groups", s.groups}, {"fraction", s.fraction}});
    }
    if (!c.system.weights.empty())
        sys["weights"] = c.system.weights;

    json& run = j["run"];
    if (c.run.t_end)
        run["t_end"] = *c.run.t_end;
    run["horizon_cap"] = c.run.horizon_cap;
    run["rtol"] = c.run.rtol;
    run["atol"] = c.run.atol;
    run["series_order"] = c.run.series_order;
    run["criterion"] = std::string(to_string(c.run.criterion));
    if (c.run.mwd_time)
        run["mwd_time"] = *c.run.mwd_time;
    run["mw_points"] = c.run.mw_points;
    run["degree_times"] = c.run.degree_times;

    if (!c.sweep.empty()) {
        json& sw = j["sweep"];
        if (!c.sweep.alpha.empty())
            sw["alpha"] = c.sweep.alpha;
        if (!c.sweep.beta.empty())
            sw["beta"] = c.sweep.beta;
        if (!c.sweep.w.empty())
            sw["w"] = c.sweep.w;
    }

    json& mc = j["mc"];
    mc["N"] = c.mc.monomers;
    mc["replicas"] = c.mc.replicas;
    mc["seed"] = c.mc.seed;
    if (c.mc.t_end)
        mc["t_end"] = *c.mc.t_end;
    mc["samples"] = c.mc.samples;

    j["output"]["directory"] = c.output.directory;
    return j;
}

ScenarioConfig preset_config(std::string_view name)
{
    ScenarioConfig c;
    c.system.preset = std::string(name);
    resolve_system(c.system);
    return c;
}

} // namespace gelkit
