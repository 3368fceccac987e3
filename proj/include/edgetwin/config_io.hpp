#pragma once

#include <array>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "edgetwin/errors.hpp"
#include "edgetwin/scenario.hpp"
#include "edgetwin/types.hpp"

namespace edgetwin {

namespace detail {

using nlohmann::json;

inline const json& require_key(const json& j, const std::string& key,
                               const std::string& scope) {
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError("config: missing required key \"" + scope + key + "\"");
    return *it;
}

inline double as_number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError("config: \"" + name + "\" must be a number");
    return v.get<double>();
}

inline int as_int(const json& v, const std::string& name) {
    if (!v.is_number_integer()) throw ConfigError("config: \"" + name + "\" must be an integer");
    return v.get<int>();
}

inline std::uint64_t as_u64(const json& v, const std::string& name) {
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ConfigError("config: \"" + name + "\" must be an integer");
    return v.get<std::uint64_t>();
}

inline bool as_bool(const json& v, const std::string& name) {
    if (!v.is_boolean()) throw ConfigError("config: \"" + name + "\" must be a boolean");
    return v.get<bool>();
}

inline Range as_range(const json& v, const std::string& name) {
    if (!v.is_array() || v.size() != 2)
        throw ConfigError("config: \"" + name + "\" must be a [lo, hi] pair");
    return {as_number(v[0], name), as_number(v[1], name)};
}

template <std::size_t N>
std::array<double, N> as_array(const json& v, const std::string& name) {
    if (!v.is_array() || v.size() != N)
        throw ConfigError("config: \"" + name + "\" must be an array of " +
                          std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = as_number(v[i], name);
    return out;
}

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& scope) {
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw ConfigError("config: unknown key \"" + scope + item.key() + "\"");
}

}  // namespace detail

// Every key is required; unknown keys are an error. The schema is flat except
// for the "channel" and "latency" objects.
inline ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
    using detail::as_array;
    using detail::as_bool;
    using detail::as_int;
    using detail::as_number;
    using detail::as_range;
    using detail::as_u64;
    using detail::require_key;

    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

    static const std::set<std::string> top_keys = {
        "area_side_km", "server_radius_km", "server_density", "user_count",
        "user_speed_kmh", "time_slot_s", "server_cpu_freq_hz", "user_cpu_freq_hz",
        "bandwidth_hz", "noise_power_w", "tx_power_range_w", "data_size_range_bits",
        "cycles_per_bit_range", "min_task_bits", "queue_latency_s", "latency_min_s",
        "latency_max_s", "migration_fixed_cost", "dt_migration_discrepancy",
        "cost_per_cycle", "budget_range", "energy_per_cycle_j",
        "dt_energy_per_prediction_j", "comm_energy_per_bit_j", "download_power_w",
        "result_bits_ratio", "dt_error_mean", "dt_drift", "user_dt_drift", "weights", "qoe_weights",
        "baseline_satisfaction", "energy_ref_j", "candidate_count", "seed",
        "channel", "latency"};
    detail::reject_unknown(j, top_keys, "");

    ScenarioConfig c;
    c.area_side_km = as_number(require_key(j, "area_side_km", ""), "area_side_km");
    c.server_radius_km = as_number(require_key(j, "server_radius_km", ""), "server_radius_km");
    c.server_density = as_number(require_key(j, "server_density", ""), "server_density");
    c.user_count = as_int(require_key(j, "user_count", ""), "user_count");
    c.user_speed_kmh = as_number(require_key(j, "user_speed_kmh", ""), "user_speed_kmh");
    c.time_slot_s = as_number(require_key(j, "time_slot_s", ""), "time_slot_s");
    c.server_cpu_freq_hz =
        as_number(require_key(j, "server_cpu_freq_hz", ""), "server_cpu_freq_hz");
    c.user_cpu_freq_hz = as_number(require_key(j, "user_cpu_freq_hz", ""), "user_cpu_freq_hz");
    c.bandwidth_hz = as_number(require_key(j, "bandwidth_hz", ""), "bandwidth_hz");
    c.noise_power_w = as_number(require_key(j, "noise_power_w", ""), "noise_power_w");
    c.tx_power_range_w = as_range(require_key(j, "tx_power_range_w", ""), "tx_power_range_w");
    c.data_size_range_bits =
        as_range(require_key(j, "data_size_range_bits", ""), "data_size_range_bits");
    c.cycles_per_bit_range =
        as_range(require_key(j, "cycles_per_bit_range", ""), "cycles_per_bit_range");
    c.min_task_bits = as_number(require_key(j, "min_task_bits", ""), "min_task_bits");
    c.queue_latency_s = as_number(require_key(j, "queue_latency_s", ""), "queue_latency_s");
    c.latency_min_s = as_number(require_key(j, "latency_min_s", ""), "latency_min_s");
    c.latency_max_s = as_number(require_key(j, "latency_max_s", ""), "latency_max_s");
    c.migration_fixed_cost =
        as_number(require_key(j, "migration_fixed_cost", ""), "migration_fixed_cost");
    c.dt_migration_discrepancy =
        as_number(require_key(j, "dt_migration_discrepancy", ""), "dt_migration_discrepancy");
    c.cost_per_cycle = as_number(require_key(j, "cost_per_cycle", ""), "cost_per_cycle");
    c.budget_range = as_range(require_key(j, "budget_range", ""), "budget_range");
    c.energy_per_cycle_j =
        as_number(require_key(j, "energy_per_cycle_j", ""), "energy_per_cycle_j");
    c.dt_energy_per_prediction_j =
        as_number(require_key(j, "dt_energy_per_prediction_j", ""), "dt_energy_per_prediction_j");
    c.comm_energy_per_bit_j =
        as_number(require_key(j, "comm_energy_per_bit_j", ""), "comm_energy_per_bit_j");
    c.download_power_w = as_number(require_key(j, "download_power_w", ""), "download_power_w");
    c.result_bits_ratio = as_number(require_key(j, "result_bits_ratio", ""), "result_bits_ratio");
    c.dt_error_mean = as_number(require_key(j, "dt_error_mean", ""), "dt_error_mean");
    c.dt_drift = as_number(require_key(j, "dt_drift", ""), "dt_drift");
    c.user_dt_drift = as_number(require_key(j, "user_dt_drift", ""), "user_dt_drift");
    c.weights = as_array<3>(require_key(j, "weights", ""), "weights");
    c.qoe_weights = as_array<2>(require_key(j, "qoe_weights", ""), "qoe_weights");
    c.baseline_satisfaction =
        as_number(require_key(j, "baseline_satisfaction", ""), "baseline_satisfaction");
    c.energy_ref_j = as_number(require_key(j, "energy_ref_j", ""), "energy_ref_j");
    c.candidate_count = as_int(require_key(j, "candidate_count", ""), "candidate_count");
    c.seed = as_u64(require_key(j, "seed", ""), "seed");

    const auto& ch = require_key(j, "channel", "");
    if (!ch.is_object()) throw ConfigError("config: \"channel\" must be an object");
    static const std::set<std::string> channel_keys = {"path_loss_exponent",
                                                       "reference_distance_m", "distance_scaled_snr"};
    detail::reject_unknown(ch, channel_keys, "channel.");
    c.channel.path_loss_exponent =
        as_number(require_key(ch, "path_loss_exponent", "channel."), "channel.path_loss_exponent");
    c.channel.reference_distance_m = as_number(
        require_key(ch, "reference_distance_m", "channel."), "channel.reference_distance_m");
    c.channel.distance_scaled_snr =
        as_bool(require_key(ch, "distance_scaled_snr", "channel."), "channel.distance_scaled_snr");

    const auto& la = require_key(j, "latency", "");
    if (!la.is_object()) throw ConfigError("config: \"latency\" must be an object");
    static const std::set<std::string> latency_keys = {"decomposed"};
    detail::reject_unknown(la, latency_keys, "latency.");
    c.latency.decomposed =
        as_bool(require_key(la, "decomposed", "latency."), "latency.decomposed");

    validate_config(c);
    return c;
}

inline nlohmann::json scenario_config_to_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["area_side_km"] = c.area_side_km;
    j["server_radius_km"] = c.server_radius_km;
    j["server_density"] = c.server_density;
    j["user_count"] = c.user_count;
    j["user_speed_kmh"] = c.user_speed_kmh;
    j["time_slot_s"] = c.time_slot_s;
    j["server_cpu_freq_hz"] = c.server_cpu_freq_hz;
    j["user_cpu_freq_hz"] = c.user_cpu_freq_hz;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["noise_power_w"] = c.noise_power_w;
    j["tx_power_range_w"] = {c.tx_power_range_w.lo, c.tx_power_range_w.hi};
    j["data_size_range_bits"] = {c.data_size_range_bits.lo, c.data_size_range_bits.hi};
    j["cycles_per_bit_range"] = {c.cycles_per_bit_range.lo, c.cycles_per_bit_range.hi};
    j["min_task_bits"] = c.min_task_bits;
    j["queue_latency_s"] = c.queue_latency_s;
    j["latency_min_s"] = c.latency_min_s;
    j["latency_max_s"] = c.latency_max_s;
    j["migration_fixed_cost"] = c.migration_fixed_cost;
    j["dt_migration_discrepancy"] = c.dt_migration_discrepancy;
    j["cost_per_cycle"] = c.cost_per_cycle;
    j["budget_range"] = {c.budget_range.lo, c.budget_range.hi};
    j["energy_per_cycle_j"] = c.energy_per_cycle_j;
    j["dt_energy_per_prediction_j"] = c.dt_energy_per_prediction_j;
    j["comm_energy_per_bit_j"] = c.comm_energy_per_bit_j;
    j["download_power_w"] = c.download_power_w;
    j["result_bits_ratio"] = c.result_bits_ratio;
    j["dt_error_mean"] = c.dt_error_mean;
    j["dt_drift"] = c.dt_drift;
    j["user_dt_drift"] = c.user_dt_drift;
    j["weights"] = c.weights;
    j["qoe_weights"] = c.qoe_weights;
    j["baseline_satisfaction"] = c.baseline_satisfaction;
    j["energy_ref_j"] = c.energy_ref_j;
    j["candidate_count"] = c.candidate_count;
    j["seed"] = c.seed;
    j["channel"] = {{"path_loss_exponent", c.channel.path_loss_exponent},
                    {"reference_distance_m", c.channel.reference_distance_m},
                    {"distance_scaled_snr", c.channel.distance_scaled_snr}};
    j["latency"] = {{"decomposed", c.latency.decomposed}};
    return j;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON in ") + path + ": " + e.what());
    }
    return scenario_config_from_json(j);
}

inline void save_scenario_config(const ScenarioConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("config: cannot open for write: " + path);
    out << scenario_config_to_json(c).dump(2) << "\n";
}

// Full scenario (placed fleet + population) for cmd_generate output.
inline nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["config"] = scenario_config_to_json(s.config);
    j["servers"] = nlohmann::json::array();
    for (const auto& sv : s.servers)
        j["servers"].push_back({{"id", sv.id},
                                {"x_km", sv.position.x_km},
                                {"y_km", sv.position.y_km},
                                {"cpu_freq_hz", sv.cpu_freq_hz},
                                {"dt_freq_dev_hz", sv.dt_freq_dev_hz},
                                {"coverage_radius_km", sv.coverage_radius_km}});
    j["users"] = nlohmann::json::array();
    for (const auto& u : s.users)
        j["users"].push_back({{"id", u.id},
                              {"x_km", u.position.x_km},
                              {"y_km", u.position.y_km},
                              {"speed_kmh", u.speed_kmh},
                              {"cpu_freq_hz", u.cpu_freq_hz},
                              {"dt_freq_dev_hz", u.dt_freq_dev_hz},
                              {"tx_power_w", u.tx_power_w},
                              {"budget", u.budget}});
    j["dt"] = {{"est_server_freq_hz", s.dt.est_server_freq_hz},
               {"est_user_freq_hz", s.dt.est_user_freq_hz},
               {"dt_migration_cost", s.dt.dt_migration_cost}};
    return j;
}

}  // namespace edgetwin
