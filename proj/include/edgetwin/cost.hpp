#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "edgetwin/errors.hpp"
#include "edgetwin/types.hpp"

namespace edgetwin {

// ---------------------------------------------------------------------------
// offloading volume and migration
// ---------------------------------------------------------------------------

// T = sum_i pi_i * beta_i * D. pi is the 0/1 association row; beta > 0 at an
// unassociated server is a consistency error.
inline double offloaded_volume(const Task& task, const std::vector<int>& pi) {
    if (pi.size() != task.beta.size())
        throw LifecycleError("offloaded_volume: association row size mismatch");
    double volume = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] != 0 && pi[i] != 1)
            throw LifecycleError("offloaded_volume: association entries must be 0 or 1");
        if (task.beta[i] > 0.0 && pi[i] == 0)
            throw LifecycleError("offloaded_volume: beta > 0 at unassociated server");
        volume += pi[i] * task.beta[i] * task.data_bits;
    }
    return volume;
}

// M = h * T * cost_per_bit, h in {0,1}.
inline double migration_cost(double volume_bits, int h, double cost_per_bit) {
    if (h != 0 && h != 1) throw LifecycleError("migration_cost: h must be 0 or 1");
    if (!(volume_bits >= 0.0)) throw NumericError("migration_cost: negative volume");
    if (!(cost_per_bit >= 0.0)) throw NumericError("migration_cost: negative cost per bit");
    return h * volume_bits * cost_per_bit;
}

// Caching feasibility: normalized data demand must fit the normalized
// migration budget. Both sides are scaled by data_ref_bits (cost side also by
// cost_per_bit, so both land in task-size units). Zero per-bit cost means
// migration is free and caching is trivially affordable.
inline bool caching_feasible(double data_bits, double migration_budget,
                             double cost_per_bit, double data_ref_bits) {
    if (!(data_bits >= 0.0) || !(migration_budget >= 0.0) || !(cost_per_bit >= 0.0))
        throw NumericError("caching_feasible: negative input");
    if (!(data_ref_bits > 0.0))
        throw NumericError("caching_feasible: data_ref_bits must be > 0");
    if (data_bits == 0.0) return true;
    if (cost_per_bit == 0.0) return true;
    const double demand = data_bits / data_ref_bits;
    const double budget = migration_budget / (cost_per_bit * data_ref_bits);
    return demand <= budget + 1e-12;
}

// ---------------------------------------------------------------------------
// latency
// ---------------------------------------------------------------------------

struct LatencyInputs {
    double alpha = 1.0;
    double beta = 0.0;            // fraction at the serving edge, 0 when local-only
    double cycles = 0.0;          // C for the whole task
    double user_freq_hz = 1.0;    // f_j
    double user_dev_hz = 0.0;     // effective ftilde_j
    double server_freq_hz = 1.0;  // f_i
    double server_dev_hz = 0.0;   // effective ftilde_i
    double rate_bps = 0.0;        // R over the chosen link
    double volume_bits = 0.0;     // T, used by the decomposed edge form
    double queue_s = 0.0;         // charged once iff offloaded
    bool decomposed = false;
};

struct LatencyBreakdown {
    double local_s = 0.0;
    double local_gap_s = 0.0;   // extra wall time from the DT estimate error
    double edge_s = 0.0;
    double edge_gap_s = 0.0;
    double queue_s = 0.0;
    double total_s = 0.0;
};

// The gap identity both forms satisfy: latency computed from the estimated
// frequency f - ftilde equals the true-frequency latency plus the gap term.
inline LatencyBreakdown latency_breakdown(const LatencyInputs& in) {
    if (!(in.user_freq_hz > 0.0)) throw NumericError("latency: user frequency must be > 0");
    if (!(in.user_freq_hz > in.user_dev_hz) || in.user_dev_hz < 0.0)
        throw NumericError("latency: user deviation must lie in [0, f_j)");

    LatencyBreakdown out;
    if (in.alpha > 0.0) {
        const double local_cycles = in.alpha * in.cycles;
        out.local_s = local_cycles / in.user_freq_hz;
        out.local_gap_s = local_cycles * in.user_dev_hz /
                          (in.user_freq_hz * (in.user_freq_hz - in.user_dev_hz));
    }
    if (in.beta > 0.0) {
        if (!(in.server_freq_hz > 0.0))
            throw NumericError("latency: server frequency must be > 0");
        if (!(in.server_freq_hz > in.server_dev_hz) || in.server_dev_hz < 0.0)
            throw NumericError("latency: server deviation must lie in [0, f_i)");
        if (!(in.rate_bps > 0.0))
            throw NumericError("latency: offloading over a zero-rate link");
        const double edge_cycles = in.beta * in.cycles;
        if (in.decomposed) {
            out.edge_s = in.volume_bits / in.rate_bps + edge_cycles / in.server_freq_hz;
        } else {
            out.edge_s = edge_cycles / (in.rate_bps * in.server_freq_hz);
        }
        const double compute_gap = edge_cycles * in.server_dev_hz /
                                   (in.server_freq_hz * (in.server_freq_hz - in.server_dev_hz));
        // compound form: the same 1/(R f) vs 1/(R (f - dev)) algebra keeps R in
        // the gap; decomposed: transmission has no estimate to be wrong about.
        out.edge_gap_s = in.decomposed ? compute_gap : compute_gap / in.rate_bps;
        out.queue_s = in.queue_s;
    }
    out.total_s = out.local_s + out.local_gap_s + out.edge_s + out.edge_gap_s + out.queue_s;
    if (!std::isfinite(out.total_s)) throw NumericError("latency: nonfinite total");
    return out;
}

// ---------------------------------------------------------------------------
// energy
// ---------------------------------------------------------------------------

struct EnergyInputs {
    double alpha = 1.0;
    double beta = 0.0;
    double cycles = 0.0;
    double energy_per_cycle_j = 0.0;   // e_unit
    double user_freq_hz = 1.0;
    double user_dev_hz = 0.0;          // calibrated base deviation
    double server_freq_hz = 1.0;
    double server_dev_hz = 0.0;
    double tx_power_w = 0.0;
    double rate_bps = 0.0;
    double volume_bits = 0.0;          // T
    double result_bits = 0.0;          // downloaded after edge execution
    double download_power_w = 0.0;
    double comm_energy_per_bit_j = 0.0;
    double dt_overhead_j = 0.0;        // prediction energy actually consumed
};

struct EnergyBreakdown {
    double local_compute_j = 0.0;
    double edge_compute_j = 0.0;
    double updown_j = 0.0;        // uplink + result download
    double comm_j = 0.0;          // per-bit link energy
    double dt_overhead_j = 0.0;
    double total_j = 0.0;
};

// Compute terms divide by f + ftilde (the twin's conservative effective
// frequency), so a larger calibrated deviation means less energy billed.
inline EnergyBreakdown energy_breakdown(const EnergyInputs& in) {
    if (!(in.user_freq_hz > 0.0)) throw NumericError("energy: user frequency must be > 0");
    if (in.user_dev_hz < 0.0 || in.server_dev_hz < 0.0)
        throw NumericError("energy: negative deviation");

    EnergyBreakdown out;
    if (in.alpha > 0.0) {
        out.local_compute_j = in.energy_per_cycle_j * in.alpha * in.cycles /
                              (in.user_freq_hz + in.user_dev_hz);
    }
    if (in.beta > 0.0) {
        if (!(in.server_freq_hz > 0.0))
            throw NumericError("energy: server frequency must be > 0");
        if (!(in.rate_bps > 0.0))
            throw NumericError("energy: offloading over a zero-rate link");
        out.edge_compute_j = in.energy_per_cycle_j * in.beta * in.cycles /
                             (in.server_freq_hz + in.server_dev_hz);
        out.updown_j = in.tx_power_w * in.volume_bits / in.rate_bps +
                       in.download_power_w * in.result_bits / in.rate_bps;
        out.comm_j = in.comm_energy_per_bit_j * in.volume_bits;
    }
    out.dt_overhead_j = in.dt_overhead_j;
    out.total_j = out.local_compute_j + out.edge_compute_j + out.updown_j + out.comm_j +
                  out.dt_overhead_j;
    if (!std::isfinite(out.total_j)) throw NumericError("energy: nonfinite total");
    return out;
}

// ---------------------------------------------------------------------------
// discrepancy factor, satisfaction, QoE, objective
// ---------------------------------------------------------------------------

// G = -lambda * (f_hat - f) / (f * (f + f_hat)). Positive exactly when the
// twin underestimates (f_hat < f); monotone decreasing in f_hat.
inline double discrepancy_factor(double lambda, double freq_hz, double est_freq_hz) {
    if (!(freq_hz > 0.0)) throw NumericError("discrepancy_factor: f must be > 0");
    if (!(freq_hz + est_freq_hz > 0.0))
        throw NumericError("discrepancy_factor: f + f_hat must be > 0");
    if (!std::isfinite(lambda)) throw NumericError("discrepancy_factor: nonfinite lambda");
    return -lambda * (est_freq_hz - freq_hz) / (freq_hz * (freq_hz + est_freq_hz));
}

// Piecewise MOS-style satisfaction. 1 up to latency_min, linear down to 0 at
// latency_max, then the configured floor.
inline double satisfaction(double latency_s, double latency_min_s, double latency_max_s,
                           double floor_value) {
    if (!(latency_min_s < latency_max_s))
        throw NumericError("satisfaction: latency_min must be < latency_max");
    if (!(latency_s >= 0.0) || !std::isfinite(latency_s))
        throw NumericError("satisfaction: latency must be finite and >= 0");
    if (latency_s <= latency_min_s) return 1.0;
    if (latency_s <= latency_max_s)
        return (latency_max_s - latency_s) / (latency_max_s - latency_min_s);
    return floor_value;
}

struct QoeScore {
    double satisfaction = 0.0;  // W
    double savings = 0.0;       // S = (B - C_st) / B
    double value = 0.0;         // lambda_w * W + lambda_s * S
};

inline QoeScore qoe_score(double satisfaction_w, double service_cost, double budget,
                          double lambda_w, double lambda_s) {
    if (!(budget > 0.0)) throw NumericError("qoe_score: budget must be > 0");
    if (!std::isfinite(service_cost)) throw NumericError("qoe_score: nonfinite cost");
    QoeScore q;
    q.satisfaction = satisfaction_w;
    q.savings = (budget - service_cost) / budget;
    q.value = lambda_w * satisfaction_w + lambda_s * q.savings;
    return q;
}

// J = w1 * Lbar + w2 * Ebar - w3 * sum of QoE utilities. Inputs arrive
// already normalized by their reference scales; the utility U is identity.
inline double objective_value(double norm_latency, double norm_energy, double qoe_sum,
                              const std::array<double, 3>& weights) {
    const double j = weights[0] * norm_latency + weights[1] * norm_energy -
                     weights[2] * qoe_sum;
    if (!std::isfinite(j)) throw NumericError("objective_value: nonfinite objective");
    return j;
}

}  // namespace edgetwin
