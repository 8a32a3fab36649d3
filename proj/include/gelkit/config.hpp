#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gelkit/chemistry.hpp"
#include "gelkit/gelation.hpp"

namespace gelkit {

/// Parameters a named preset is built from; unset values take preset defaults.
struct PresetParams {
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> w;

    bool operator==(const PresetParams&) const = default;
};

struct SystemConfig {
    /// Named preset; empty when the system is given explicitly.
    std::string preset;
    PresetParams params;
    std::vector<Species> species;
    std::vector<std::vector<double>> weights;

    bool operator==(const SystemConfig&) const = default;
};

struct RunConfig {
    /// End time; unset selects the stationarity/cap horizon rule.
    std::optional<double> t_end;
    double horizon_cap = 0.0;
    double rtol = 1e-9;
    double atol = 1e-12;
    int series_order = 1024;
    CriterionKind criterion = CriterionKind::general_determinant;
    /// Time of the size-distribution snapshot; unset means half the gel time.
    std::optional<double> mwd_time;
    int mw_points = 200;
    /// Times at which trajectory also writes degree-distribution tables.
    std::vector<double> degree_times;

    bool operator==(const RunConfig&) const = default;
};

struct SweepConfig {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> w;

    bool empty() const { return alpha.empty() && beta.empty() && w.empty(); }
    bool operator==(const SweepConfig&) const = default;
};

struct McConfig {
    std::int64_t monomers = 100000;
    int replicas = 1;
    std::uint64_t seed = 1;
    std::optional<double> t_end;
    int samples = 200;

    bool operator==(const McConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";

    bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
    SystemConfig system;
    RunConfig run;
    SweepConfig sweep;
    McConfig mc;
    OutputConfig output;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Names of the embedded presets.
const std::vector<std::string>& preset_names();

/// The parameters a preset accepts, set to their defaults.
PresetParams preset_defaults(std::string_view name);

/// Preset parameters with unset values filled from the defaults; throws
/// SpecError for parameters the preset does not take.
PresetParams resolve_params(std::string_view name, const PresetParams& params);

/// Preset system with the given parameters; throws SpecError for unknown names
/// or infeasible fractions.
SystemSpec preset_spec(std::string_view name, const PresetParams& params = {});

/// Resolves the configured system (preset or explicit) and validates it.
SystemSpec resolve_system(const SystemConfig& system);

/// Parses and validates a configuration; throws SpecError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& config);

/// A config that selects a preset and keeps every other setting at its default.
ScenarioConfig preset_config(std::string_view name);

} // namespace gelkit
