#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "edgetwin/errors.hpp"
#include "edgetwin/rng.hpp"
#include "edgetwin/types.hpp"

namespace edgetwin {

inline double distance_km(const Position& a, const Position& b) {
    const double dx = a.x_km - b.x_km;
    const double dy = a.y_km - b.y_km;
    return std::sqrt(dx * dx + dy * dy);
}

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError("config field '" + field + "': " + why);
}

inline void require_finite(double v, const std::string& field) {
    require(std::isfinite(v), field, "must be finite");
}

inline void require_range(const Range& r, const std::string& field, double min_lo) {
    require_finite(r.lo, field);
    require_finite(r.hi, field);
    require(r.lo <= r.hi, field, "lower bound exceeds upper bound");
    require(r.lo >= min_lo, field, "lower bound below minimum " + std::to_string(min_lo));
}

}  // namespace detail

inline void validate_config(const ScenarioConfig& c) {
    using detail::require;
    using detail::require_finite;
    using detail::require_range;

    require_finite(c.area_side_km, "area_side_km");
    require(c.area_side_km > 0.0, "area_side_km", "must be > 0");
    require_finite(c.server_radius_km, "server_radius_km");
    require(c.server_radius_km >= 0.0, "server_radius_km", "must be >= 0");
    require_finite(c.server_density, "server_density");
    require(c.server_density >= 0.0, "server_density", "must be >= 0");
    require(c.user_count >= 1, "user_count", "must be >= 1");
    require_finite(c.user_speed_kmh, "user_speed_kmh");
    require(c.user_speed_kmh >= 0.0, "user_speed_kmh", "must be >= 0");
    require_finite(c.time_slot_s, "time_slot_s");
    require(c.time_slot_s > 0.0, "time_slot_s", "must be > 0");

    require_finite(c.server_cpu_freq_hz, "server_cpu_freq_hz");
    require(c.server_cpu_freq_hz > 0.0, "server_cpu_freq_hz", "must be > 0");
    require_finite(c.user_cpu_freq_hz, "user_cpu_freq_hz");
    require(c.user_cpu_freq_hz > 0.0, "user_cpu_freq_hz", "must be > 0");

    require_finite(c.bandwidth_hz, "bandwidth_hz");
    require(c.bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
    require_finite(c.noise_power_w, "noise_power_w");
    require(c.noise_power_w > 0.0, "noise_power_w", "must be > 0");
    require_range(c.tx_power_range_w, "tx_power_range_w", 0.0);
    require(c.tx_power_range_w.lo > 0.0, "tx_power_range_w", "transmit power must be > 0");

    require_range(c.data_size_range_bits, "data_size_range_bits", 0.0);
    require(c.data_size_range_bits.lo > 0.0, "data_size_range_bits", "task data must be > 0");
    require_range(c.cycles_per_bit_range, "cycles_per_bit_range", 0.0);
    require(c.cycles_per_bit_range.lo > 0.0, "cycles_per_bit_range", "cycle density must be > 0");
    require_finite(c.min_task_bits, "min_task_bits");
    require(c.min_task_bits > 0.0, "min_task_bits", "must be > 0");
    require(c.min_task_bits <= c.data_size_range_bits.hi, "min_task_bits",
            "exceeds data_size_range_bits upper bound; no task could satisfy the floor");

    require_finite(c.queue_latency_s, "queue_latency_s");
    require(c.queue_latency_s >= 0.0, "queue_latency_s", "must be >= 0");
    require_finite(c.latency_min_s, "latency_min_s");
    require(c.latency_min_s > 0.0, "latency_min_s", "must be > 0");
    require_finite(c.latency_max_s, "latency_max_s");
    require(c.latency_max_s > c.latency_min_s, "latency_max_s", "must exceed latency_min_s");

    require_finite(c.migration_fixed_cost, "migration_fixed_cost");
    require(c.migration_fixed_cost >= 0.0, "migration_fixed_cost", "must be >= 0");
    require_finite(c.dt_migration_discrepancy, "dt_migration_discrepancy");
    require(c.dt_migration_discrepancy >= 0.0, "dt_migration_discrepancy", "must be >= 0");
    require_finite(c.cost_per_cycle, "cost_per_cycle");
    require(c.cost_per_cycle >= 0.0, "cost_per_cycle", "must be >= 0");
    require_range(c.budget_range, "budget_range", 0.0);
    require(c.budget_range.lo > 0.0, "budget_range", "budgets must be > 0");

    require_finite(c.energy_per_cycle_j, "energy_per_cycle_j");
    require(c.energy_per_cycle_j >= 0.0, "energy_per_cycle_j", "must be >= 0");
    require_finite(c.dt_energy_per_prediction_j, "dt_energy_per_prediction_j");
    require(c.dt_energy_per_prediction_j >= 0.0, "dt_energy_per_prediction_j", "must be >= 0");
    require_finite(c.comm_energy_per_bit_j, "comm_energy_per_bit_j");
    require(c.comm_energy_per_bit_j >= 0.0, "comm_energy_per_bit_j", "must be >= 0");
    require_finite(c.download_power_w, "download_power_w");
    require(c.download_power_w >= 0.0, "download_power_w", "must be >= 0");
    require_finite(c.result_bits_ratio, "result_bits_ratio");
    require(c.result_bits_ratio >= 0.0, "result_bits_ratio", "must be >= 0");

    require_finite(c.dt_error_mean, "dt_error_mean");
    require(c.dt_error_mean >= 0.0 && c.dt_error_mean <= 0.9, "dt_error_mean",
            "must lie in [0, 0.9] so estimated frequencies stay positive");
    require_finite(c.dt_drift, "dt_drift");
    require(c.dt_drift >= 0.0, "dt_drift", "must be >= 0");
    require_finite(c.user_dt_drift, "user_dt_drift");
    require(c.user_dt_drift >= 0.0, "user_dt_drift", "must be >= 0");

    for (double w : c.weights) {
        require_finite(w, "weights");
        require(w >= 0.0, "weights", "objective weights must be >= 0");
    }
    for (double w : c.qoe_weights) {
        require_finite(w, "qoe_weights");
        require(w >= 0.0, "qoe_weights", "QoE weights must be >= 0");
    }
    require(std::abs(c.qoe_weights[0] + c.qoe_weights[1] - 1.0) <= 1e-9, "qoe_weights",
            "lambda_w + lambda_s must equal 1");
    require_finite(c.baseline_satisfaction, "baseline_satisfaction");
    require(c.baseline_satisfaction >= 0.0 && c.baseline_satisfaction <= 1.0,
            "baseline_satisfaction", "must lie in [0, 1]");

    require_finite(c.energy_ref_j, "energy_ref_j");
    require(c.energy_ref_j >= 0.0, "energy_ref_j", "must be >= 0");
    require(c.candidate_count >= 1, "candidate_count", "must be >= 1");

    require_finite(c.channel.path_loss_exponent, "channel.path_loss_exponent");
    require(c.channel.path_loss_exponent > 0.0, "channel.path_loss_exponent", "must be > 0");
    require_finite(c.channel.reference_distance_m, "channel.reference_distance_m");
    require(c.channel.reference_distance_m > 0.0, "channel.reference_distance_m", "must be > 0");
}

inline int server_count(const ScenarioConfig& c) {
    return static_cast<int>(std::llround(c.server_density * c.area_side_km * c.area_side_km));
}

// Reference for the objective's energy normalization: explicit value if set,
// otherwise the energy of running the largest possible task fully locally at
// the mean DT deviation.
inline double energy_reference(const ScenarioConfig& c) {
    if (c.energy_ref_j > 0.0) return c.energy_ref_j;
    const double max_cycles = c.data_size_range_bits.hi * c.cycles_per_bit_range.hi;
    const double denom = c.user_cpu_freq_hz * (1.0 + c.dt_error_mean);
    const double ref = c.energy_per_cycle_j * max_cycles / denom;
    return ref > 0.0 ? ref : 1.0;
}

namespace detail {

// Deviation factor ftilde/f ~ U(mean-0.1, mean+0.1), clamped into [0, 0.9].
inline double sample_deviation_factor(Rng& rng, double mean) {
    const double lo = std::max(0.0, mean - 0.1);
    const double hi = std::min(0.9, mean + 0.1);
    return rng.uniform(lo, hi);
}

}  // namespace detail

// Servers on a centered grid: spacing side/sqrt(n), ceil(sqrt(n)) columns,
// row-major fill, the occupied bounding box centered in the square. Users
// uniform at random. All twin deviations sampled around dt_error_mean.
inline Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    validate_config(config);
    Scenario s;
    s.config = config;
    Rng rng(seed);

    const int n = server_count(config);
    if (n > 0) {
        const double spacing = config.area_side_km / std::sqrt(static_cast<double>(n));
        const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
        const int rows = (n + cols - 1) / cols;
        const double offset_x = (config.area_side_km - (cols - 1) * spacing) / 2.0;
        const double offset_y = (config.area_side_km - (rows - 1) * spacing) / 2.0;
        s.servers.reserve(n);
        for (int i = 0; i < n; ++i) {
            EdgeServer server;
            server.id = i;
            server.position = {offset_x + (i % cols) * spacing,
                               offset_y + (i / cols) * spacing};
            server.cpu_freq_hz = config.server_cpu_freq_hz;
            server.dt_freq_dev_hz =
                server.cpu_freq_hz * detail::sample_deviation_factor(rng, config.dt_error_mean);
            server.coverage_radius_km = config.server_radius_km;
            s.servers.push_back(server);
        }
    }

    s.users.reserve(config.user_count);
    for (int j = 0; j < config.user_count; ++j) {
        MobileUser u;
        u.id = j;
        u.position = {rng.uniform(0.0, config.area_side_km),
                      rng.uniform(0.0, config.area_side_km)};
        u.speed_kmh = config.user_speed_kmh;
        u.cpu_freq_hz = config.user_cpu_freq_hz;
        u.dt_freq_dev_hz =
            u.cpu_freq_hz * detail::sample_deviation_factor(rng, config.dt_error_mean);
        u.tx_power_w = rng.uniform(config.tx_power_range_w.lo, config.tx_power_range_w.hi);
        u.budget = rng.uniform(config.budget_range.lo, config.budget_range.hi);
        s.users.push_back(u);
    }

    s.dt.est_server_freq_hz.reserve(s.servers.size());
    for (const auto& server : s.servers)
        s.dt.est_server_freq_hz.push_back(server.cpu_freq_hz - server.dt_freq_dev_hz);
    s.dt.est_user_freq_hz.reserve(s.users.size());
    for (const auto& u : s.users)
        s.dt.est_user_freq_hz.push_back(u.cpu_freq_hz - u.dt_freq_dev_hz);
    s.dt.dt_migration_cost = config.migration_fixed_cost + config.dt_migration_discrepancy;
    return s;
}

// alpha + sum(beta) == 1 within 1e-9, every component in [0, 1].
inline bool validate_split(const Task& task) {
    if (!(task.alpha >= 0.0 && task.alpha <= 1.0)) return false;
    double total = task.alpha;
    for (double b : task.beta) {
        if (!(b >= 0.0 && b <= 1.0)) return false;
        total += b;
    }
    return std::abs(total - 1.0) <= 1e-9;
}

// Indices of the k nearest servers, distance then id as tie-break.
inline std::vector<int> nearest_servers(const Scenario& s, const Position& from, int k) {
    std::vector<int> idx(s.servers.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double da = distance_km(from, s.servers[a].position);
        const double db = distance_km(from, s.servers[b].position);
        if (da != db) return da < db;
        return a < b;
    });
    if (k < static_cast<int>(idx.size())) idx.resize(k);
    return idx;
}

}  // namespace edgetwin
