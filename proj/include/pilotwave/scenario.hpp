#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pilotwave/grid.hpp"
#include "pilotwave/trajectory.hpp"

namespace pilotwave {

// One numeric parameter of a scenario schema. Everything user-facing is SI
// (or dimensionless where the experiment is specified that way); scenarios
// convert to their internal scaled units on entry and back on output.
struct ParamSpec {
    std::string key;
    double def = 0.0;
    double min = -1e300;
    double max = 1e300;
    std::string doc;
};

struct EnumSpec {
    std::string key;
    std::string def;
    std::vector<std::string> allowed;
    std::string doc;
};

struct ScenarioSchema {
    std::string id;
    std::string summary;
    std::vector<ParamSpec> params;
    std::vector<EnumSpec> enums;

    const ParamSpec* find(const std::string& key) const;
    const EnumSpec* find_enum(const std::string& key) const;
};

// Fully resolved configuration: every schema key present.
struct ScenarioConfig {
    std::string scenario;
    std::uint64_t seed = 0;
    std::map<std::string, double> values;
    std::map<std::string, std::string> options;

    double get(const std::string& key) const;
    std::size_t count(const std::string& key) const; // nonnegative integer param
    const std::string& option(const std::string& key) const;

    CounterRng rng() const { return CounterRng(seed, 0); }
};

// Density snapshot for export: 1D profiles or 2D maps, SI coordinates.
struct DensityFrame {
    std::string name;
    double time = 0.0;          // s
    double beam_coordinate = 0.0; // y = v t where the scenario defines it
    Grid grid = Grid::line(8, 0.0, 1.0);
    std::vector<double> rho;
};

struct RunRecord {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string version;
    std::map<std::string, double> config_echo;
    std::map<std::string, std::string> option_echo;
    std::vector<DensityFrame> frames;
    std::vector<Trajectory> trajectories; // SI units
    std::map<std::string, double> statistics;
    std::vector<std::string> notes;
};

// ---- scenario registry ------------------------------------------------------

using ScenarioFn = RunRecord (*)(const ScenarioConfig&);

struct ScenarioEntry {
    ScenarioSchema schema;
    ScenarioFn run;
};

const std::vector<ScenarioEntry>& scenario_registry();
const ScenarioEntry* find_scenario(const std::string& id);
std::vector<std::string> scenario_ids();

// Resolve a raw key/value listing against a schema: defaults filled, unknown
// keys rejected, range violations named.
ScenarioConfig resolve_config(const std::string& scenario_id,
                              const std::map<std::string, std::string>& raw,
                              std::uint64_t seed);

// The five drivers.
RunRecord run_two_body(const ScenarioConfig& cfg);
RunRecord run_c60(const ScenarioConfig& cfg);
RunRecord run_stern_gerlach(const ScenarioConfig& cfg);
RunRecord run_epr_b(const ScenarioConfig& cfg);
RunRecord run_asym_interference(const ScenarioConfig& cfg);

} // namespace pilotwave
