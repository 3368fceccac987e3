#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace edgetwin {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct Position {
    double x_km = 0.0;
    double y_km = 0.0;
};

struct ChannelParams {
    double path_loss_exponent = 2.7;
    double reference_distance_m = 1.0;
    // Divide the SNR by the distance in meters before the log. Off = plain
    // B*log2(1 + p*|rho|^2 / sigma^2).
    bool distance_scaled_snr = true;
};

struct LatencyParams {
    // false: edge latency is the compound beta*C/(R*f_i).
    // true:  transmission + compute, T/R + beta*C/f_i.
    bool decomposed = false;
};

struct ScenarioConfig {
    double area_side_km = 1.0;           // square side
    double server_radius_km = 0.15;      // nominal coverage radius
    double server_density = 5.0;         // servers per km^2
    int user_count = 10;
    double user_speed_kmh = 20.0;
    double time_slot_s = 1.0;

    double server_cpu_freq_hz = 1.0e10;  // f_i
    double user_cpu_freq_hz = 1.0e9;     // f_j

    double bandwidth_hz = 2.0e7;         // B
    double noise_power_w = 2.0e-12;      // sigma^2
    Range tx_power_range_w{0.2, 0.6};    // p_j sampled per user

    Range data_size_range_bits{4.8e6, 6.4e6};  // D_j
    Range cycles_per_bit_range{25.0, 50.0};    // C = D * draw
    double min_task_bits = 4.8e6;              // offloading floor on D_j

    double queue_latency_s = 0.002;      // router queuing, once per offloaded task
    double latency_min_s = 0.15;         // full-satisfaction bound
    double latency_max_s = 0.25;         // tolerance bound

    double migration_fixed_cost = 2.0e-8;      // C_f, cost per migrated bit
    double dt_migration_discrepancy = 1.0e-8;  // DT-side extra per bit
    double cost_per_cycle = 2.0e-9;            // service cost of offloaded cycles
    Range budget_range{0.8, 1.2};              // B_j sampled per user

    double energy_per_cycle_j = 0.5;            // e_unit in compute-energy terms
    double dt_energy_per_prediction_j = 0.005;  // paid when dt_adjust fires
    double comm_energy_per_bit_j = 2.0e-8;      // link energy per offloaded bit
    double download_power_w = 0.5;              // result download power
    double result_bits_ratio = 0.1;             // result size = ratio * D

    double dt_error_mean = 0.5;    // mean of ftilde/f across entities
    double dt_drift = 0.06;        // server-twin per-slot random-walk stdev, fraction of f
    double user_dt_drift = 0.02;   // device-twin drift (self-reporting, slower)

    std::array<double, 3> weights{0.4, 0.4, 0.2};      // w1 latency, w2 energy, w3 QoE
    std::array<double, 2> qoe_weights{0.5, 0.5};       // lambda_w, lambda_s
    double baseline_satisfaction = 0.1;                // W_b past latency_max

    // 0 = derive: energy of a fully-local largest task at the mean deviation.
    double energy_ref_j = 0.0;

    int candidate_count = 5;      // K nearest servers in the state
    std::uint64_t seed = 1;

    ChannelParams channel;
    LatencyParams latency;
};

struct EdgeServer {
    int id = 0;
    Position position;
    double cpu_freq_hz = 0.0;      // f_i
    double dt_freq_dev_hz = 0.0;   // calibrated ftilde_i, f_i - ftilde_i > 0
    double coverage_radius_km = 0.0;
};

struct MobileUser {
    int id = 0;
    Position position;
    double speed_kmh = 0.0;
    double cpu_freq_hz = 0.0;      // f_j
    double dt_freq_dev_hz = 0.0;   // calibrated ftilde_j
    double tx_power_w = 0.0;       // p_j
    double budget = 0.0;           // B_j for the savings term
};

struct Task {
    int owner = -1;                 // user id
    double data_bits = 0.0;         // D_j
    double cpu_cycles = 0.0;        // C = D * cycles_per_bit draw
    double alpha = 1.0;             // local fraction
    std::vector<double> beta;       // per-server offload fraction, one slot per server
    bool migration_flag = false;    // h for the step that executed it
    std::optional<int> cached_at;   // server holding this user's cached service
};

// Twin-side estimates. est_* = f - ftilde (strictly positive by construction).
struct DigitalTwinView {
    std::vector<double> est_server_freq_hz;
    std::vector<double> est_user_freq_hz;
    double dt_migration_cost = 0.0;  // migration_fixed_cost + dt_migration_discrepancy
};

struct Scenario {
    ScenarioConfig config;
    std::vector<EdgeServer> servers;
    std::vector<MobileUser> users;
    DigitalTwinView dt;
};

}  // namespace edgetwin
