#include "pilotwave/scenario.hpp"

#include <cmath>

namespace pilotwave {

const ParamSpec* ScenarioSchema::find(const std::string& key) const {
    for (const auto& p : params)
        if (p.key == key) return &p;
    return nullptr;
}

const EnumSpec* ScenarioSchema::find_enum(const std::string& key) const {
    for (const auto& e : enums)
        if (e.key == key) return &e;
    return nullptr;
}

double ScenarioConfig::get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end())
        throw SchemaError("missing config key '" + key + "'");
    return it->second;
}

std::size_t ScenarioConfig::count(const std::string& key) const {
    const double v = get(key);
    if (v < 0.0 || v != std::floor(v))
        throw ValidationError("config key '" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

const std::string& ScenarioConfig::option(const std::string& key) const {
    auto it = options.find(key);
    if (it == options.end())
        throw SchemaError("missing config option '" + key + "'");
    return it->second;
}

namespace detail {
ScenarioSchema two_body_schema();
ScenarioSchema c60_schema();
ScenarioSchema stern_gerlach_schema();
ScenarioSchema epr_b_schema();
ScenarioSchema asym_schema();
} // namespace detail

const std::vector<ScenarioEntry>& scenario_registry() {
    static const std::vector<ScenarioEntry> entries = {
        {detail::two_body_schema(), &run_two_body},
        {detail::c60_schema(), &run_c60},
        {detail::stern_gerlach_schema(), &run_stern_gerlach},
        {detail::epr_b_schema(), &run_epr_b},
        {detail::asym_schema(), &run_asym_interference},
    };
    return entries;
}

const ScenarioEntry* find_scenario(const std::string& id) {
    for (const auto& e : scenario_registry())
        if (e.schema.id == id) return &e;
    return nullptr;
}

std::vector<std::string> scenario_ids() {
    std::vector<std::string> ids;
    for (const auto& e : scenario_registry()) ids.push_back(e.schema.id);
    return ids;
}

ScenarioConfig resolve_config(const std::string& scenario_id,
                              const std::map<std::string, std::string>& raw,
                              std::uint64_t seed) {
    const ScenarioEntry* entry = find_scenario(scenario_id);
    if (!entry) throw SchemaError("unknown scenario '" + scenario_id + "'");

    ScenarioConfig cfg;
    cfg.scenario = scenario_id;
    cfg.seed = seed;
    for (const auto& p : entry->schema.params) cfg.values[p.key] = p.def;
    for (const auto& e : entry->schema.enums) cfg.options[e.key] = e.def;

    for (const auto& [key, text] : raw) {
        if (const EnumSpec* es = entry->schema.find_enum(key)) {
            bool ok = false;
            for (const auto& a : es->allowed) ok = ok || a == text;
            if (!ok)
                throw ValidationError("config key '" + key + "': value '" + text +
                                      "' not in its allowed set");
            cfg.options[key] = text;
            continue;
        }
        const ParamSpec* ps = entry->schema.find(key);
        if (!ps) throw SchemaError("unknown config key '" + key + "'");

        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
            throw ParseError("config key '" + key + "': cannot parse number '" +
                             text + "'");
        if (v < ps->min || v > ps->max)
            throw ValidationError("config key '" + key + "' = " + text +
                                  " outside [" + std::to_string(ps->min) + ", " +
                                  std::to_string(ps->max) + "]");
        cfg.values[key] = v;
    }
    return cfg;
}

} // namespace pilotwave
