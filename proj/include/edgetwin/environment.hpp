#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "edgetwin/channel.hpp"
#include "edgetwin/cost.hpp"
#include "edgetwin/errors.hpp"
#include "edgetwin/mobility.hpp"
#include "edgetwin/rng.hpp"
#include "edgetwin/scenario.hpp"
#include "edgetwin/types.hpp"

namespace edgetwin {

// ---------------------------------------------------------------------------
// MDP surface types
// ---------------------------------------------------------------------------

struct MdpState {
    std::vector<double> feature_vector;  // length 12 + 5K, all in [-1, 1]
};

// target 0 = run locally, 1..K = offload to that candidate slot.
struct MdpAction {
    int target = 0;
    double beta_level = 0.0;  // one of {0, 0.25, 0.5, 0.75, 1}
    bool cache = false;
    bool dt_adjust = false;
};

inline constexpr int kBetaLevels = 5;

inline int action_count(int k_candidates) { return (k_candidates + 1) * kBetaLevels * 2 * 2; }

inline int encode_action(const MdpAction& a, int k_candidates) {
    const int beta_idx = static_cast<int>(std::lround(a.beta_level * 4.0));
    if (a.target < 0 || a.target > k_candidates)
        throw LifecycleError("encode_action: target out of range");
    if (beta_idx < 0 || beta_idx >= kBetaLevels)
        throw LifecycleError("encode_action: beta_level not on the grid");
    return ((a.target * kBetaLevels + beta_idx) * 2 + (a.cache ? 1 : 0)) * 2 +
           (a.dt_adjust ? 1 : 0);
}

// Local targets normalize to beta 0 / no cache; the dt_adjust bit survives.
inline MdpAction decode_action(int index, int k_candidates) {
    if (index < 0 || index >= action_count(k_candidates))
        throw LifecycleError("decode_action: index out of range");
    MdpAction a;
    a.dt_adjust = (index & 1) != 0;
    index >>= 1;
    a.cache = (index & 1) != 0;
    index >>= 1;
    a.beta_level = (index % kBetaLevels) * 0.25;
    a.target = index / kBetaLevels;
    if (a.target == 0) {
        a.beta_level = 0.0;
        a.cache = false;
    }
    return a;
}

struct CostBreakdown {
    LatencyBreakdown latency;
    EnergyBreakdown energy;
    QoeScore qoe;
    double migration_cost = 0.0;
    double service_cost = 0.0;   // C_st entering the savings term
    double g_server = 0.0;       // discrepancy factor at the serving edge
    double g_user = 0.0;         // discrepancy factor of the local share
    bool migrated = false;
    bool cache_hit = false;
    bool cache_violation = false;
    double norm_latency = 0.0;
    double norm_energy = 0.0;
    double objective = 0.0;
};

struct StepOutcome {
    MdpState next_state;
    double reward = 0.0;
    CostBreakdown cost;
    bool done = false;
};

// ---------------------------------------------------------------------------
// environment
// ---------------------------------------------------------------------------

class Environment {
public:
    Environment(Scenario scenario, MobilitySource mobility, int horizon_steps = 50)
        : scenario_(std::move(scenario)),
          mobility_(std::move(mobility)),
          horizon_(horizon_steps),
          rng_(1) {
        if (horizon_ <= 0) throw ConfigError("Environment: horizon must be > 0");
        validate_config(scenario_.config);
        const auto& c = scenario_.config;
        data_ref_ = c.data_size_range_bits.hi;
        cycles_ref_ = data_ref_ * c.cycles_per_bit_range.hi;
        lat_ref_ = 4.0 * c.latency_max_s;
        mig_ref_ = data_ref_ * (c.migration_fixed_cost + c.dt_migration_discrepancy);
        if (mig_ref_ <= 0.0) mig_ref_ = 1.0;
        dist_ref_ = c.area_side_km * std::sqrt(2.0);
        energy_ref_ = energy_reference(c);
    }

    int user_count() const { return static_cast<int>(scenario_.users.size()); }
    int candidate_count() const { return scenario_.config.candidate_count; }
    int state_size() const { return 12 + 5 * candidate_count(); }
    int action_count() const { return edgetwin::action_count(candidate_count()); }
    int acting_user() const { return acting_; }
    int horizon() const { return horizon_; }
    const Scenario& scenario() const { return scenario_; }

    // runtime introspection for tests and reports
    const std::vector<Position>& positions() const { return positions_; }
    const std::vector<std::optional<int>>& associations() const { return assoc_; }
    double effective_user_dev(int j) const { return eff_dev_user_.at(j); }
    double effective_server_dev(int i) const { return eff_dev_server_.at(i); }
    bool cached(int user, int server) const {
        return cache_.at(user).at(static_cast<std::size_t>(server));
    }

    MdpState reset(std::uint64_t seed) {
        rng_.reseed(seed);
        const auto& c = scenario_.config;
        const int n_users = user_count();
        const int n_servers = static_cast<int>(scenario_.servers.size());

        positions_.resize(n_users);
        for (int j = 0; j < n_users; ++j)
            positions_[j] = mobility_.is_replay()
                                ? mobility_.initial_position(scenario_.users[j])
                                : scenario_.users[j].position;
        mobility_.reset(scenario_.users, c.area_side_km, rng_);

        eff_dev_user_.resize(n_users);
        for (int j = 0; j < n_users; ++j)
            eff_dev_user_[j] = scenario_.users[j].dt_freq_dev_hz;
        eff_dev_server_.resize(n_servers);
        for (int i = 0; i < n_servers; ++i)
            eff_dev_server_[i] = scenario_.servers[i].dt_freq_dev_hz;

        assoc_.assign(n_users, std::nullopt);
        cache_.assign(n_users, std::vector<bool>(n_servers, false));
        last_offload_bits_.assign(n_users, 0.0);
        tasks_.resize(n_users);
        for (int j = 0; j < n_users; ++j) tasks_[j] = sample_task(j);

        acting_ = 0;
        step_count_ = 0;
        was_reset_ = true;
        return encode_state(acting_);
    }

    StepOutcome step(int action_index) {
        return step(decode_action(action_index, candidate_count()));
    }

    StepOutcome step(const MdpAction& action) {
        if (!was_reset_) throw LifecycleError("Environment::step before reset");
        const auto& c = scenario_.config;
        const int j = acting_;
        const MobileUser& user = scenario_.users[j];
        Task& task = tasks_[j];

        // resolve the action against the candidates the agent observed
        std::optional<int> server;
        double beta = 0.0;
        if (action.target > 0 &&
            action.target <= static_cast<int>(candidates_.size())) {
            beta = action.beta_level;
            if (beta > 0.0) server = candidates_[action.target - 1];
        }
        const double alpha = 1.0 - beta;

        // a consumed prediction realigns the twin before anything executes
        double dt_energy = 0.0;
        if (action.dt_adjust) {
            dt_energy = c.dt_energy_per_prediction_j;
            eff_dev_user_[j] = user.dt_freq_dev_hz;
            for (int s : candidates_)
                eff_dev_server_[s] = scenario_.servers[s].dt_freq_dev_hz;
        }

        task.alpha = alpha;
        std::fill(task.beta.begin(), task.beta.end(), 0.0);
        std::vector<int> pi(scenario_.servers.size(), 0);
        if (server) {
            task.beta[*server] = beta;
            pi[*server] = 1;
        }
        const double volume = offloaded_volume(task, pi);

        // migration resolves against the cache as it stood before this step
        const std::optional<int> prev = assoc_[j];
        const bool migrated = prev.has_value() && server.has_value() && *prev != *server;
        const bool cache_hit = migrated && cache_[j][static_cast<std::size_t>(*server)];
        const double mig_cost =
            cache_hit ? 0.0 : migration_cost(volume, migrated ? 1 : 0, c.migration_fixed_cost);

        bool cache_violation = false;
        if (action.cache) {
            const bool ok = server.has_value() &&
                            caching_feasible(task.data_bits, volume * c.migration_fixed_cost,
                                             c.migration_fixed_cost, data_ref_) &&
                            caching_feasible(task.data_bits,
                                             volume * scenario_.dt.dt_migration_cost,
                                             scenario_.dt.dt_migration_cost, data_ref_);
            if (ok) {
                cache_[j][static_cast<std::size_t>(*server)] = true;
                task.cached_at = *server;
            } else {
                cache_violation = true;
            }
        }
        task.migration_flag = migrated;
        assoc_[j] = server;
        last_offload_bits_[j] = volume;

        // the world moves before costs are billed: what was chosen from the
        // observed positions executes from the moved ones
        for (int u = 0; u < user_count(); ++u)
            positions_[u] = mobility_.advance(scenario_.users[u], positions_[u],
                                              scenario_.users[u].speed_kmh, c.time_slot_s,
                                              rng_);
        mobility_.end_of_slot();

        double rate = 0.0;
        if (server) {
            const double d_m = std::max(
                1.0, distance_km(positions_[j], scenario_.servers[*server].position) * 1000.0);
            const auto ch = sample_channel(rng_, d_m, c.channel);
            rate = transmission_rate(c.bandwidth_hz, user.tx_power_w, ch, c.noise_power_w,
                                     c.channel.distance_scaled_snr);
        }

        LatencyInputs li;
        li.alpha = alpha;
        li.beta = beta;
        li.cycles = task.cpu_cycles;
        li.user_freq_hz = user.cpu_freq_hz;
        li.user_dev_hz = eff_dev_user_[j];
        li.rate_bps = rate;
        li.volume_bits = volume;
        li.queue_s = c.queue_latency_s;
        li.decomposed = c.latency.decomposed;
        if (server) {
            li.server_freq_hz = scenario_.servers[*server].cpu_freq_hz;
            li.server_dev_hz = eff_dev_server_[*server];
        }
        const LatencyBreakdown lat = latency_breakdown(li);

        EnergyInputs ei;
        ei.alpha = alpha;
        ei.beta = beta;
        ei.cycles = task.cpu_cycles;
        ei.energy_per_cycle_j = c.energy_per_cycle_j;
        ei.user_freq_hz = user.cpu_freq_hz;
        ei.user_dev_hz = user.dt_freq_dev_hz;  // calibrated, not drifted
        ei.tx_power_w = user.tx_power_w;
        ei.rate_bps = rate;
        ei.volume_bits = volume;
        ei.result_bits = server ? c.result_bits_ratio * task.data_bits : 0.0;
        ei.download_power_w = c.download_power_w;
        ei.comm_energy_per_bit_j = c.comm_energy_per_bit_j;
        ei.dt_overhead_j = dt_energy;
        if (server) {
            ei.server_freq_hz = scenario_.servers[*server].cpu_freq_hz;
            ei.server_dev_hz = scenario_.servers[*server].dt_freq_dev_hz;
        }
        const EnergyBreakdown energy = energy_breakdown(ei);

        CostBreakdown cost;
        cost.latency = lat;
        cost.energy = energy;
        cost.migration_cost = mig_cost;
        cost.service_cost = mig_cost + c.cost_per_cycle * beta * task.cpu_cycles;
        cost.migrated = migrated;
        cost.cache_hit = cache_hit;
        cost.cache_violation = cache_violation;
        const double w = satisfaction(lat.total_s, c.latency_min_s, c.latency_max_s,
                                      c.baseline_satisfaction);
        cost.qoe = qoe_score(w, cost.service_cost, user.budget, c.qoe_weights[0],
                             c.qoe_weights[1]);
        cost.norm_latency = lat.total_s / c.latency_max_s;
        cost.norm_energy = energy.total_j / energy_ref_;
        cost.objective = objective_value(cost.norm_latency, cost.norm_energy,
                                         cost.qoe.value, c.weights);
        cost.g_user = discrepancy_factor(alpha * task.cpu_cycles, user.cpu_freq_hz,
                                         user.cpu_freq_hz - eff_dev_user_[j]);
        if (server)
            cost.g_server = discrepancy_factor(
                beta * task.cpu_cycles, scenario_.servers[*server].cpu_freq_hz,
                scenario_.servers[*server].cpu_freq_hz - eff_dev_server_[*server]);

        // fresh work for this user next round, then the twin drifts one slot
        tasks_[j] = sample_task(j);
        drift_deviations();
        ++step_count_;
        acting_ = (acting_ + 1) % user_count();

        StepOutcome out;
        out.cost = cost;
        out.reward = -cost.objective;
        out.done = step_count_ >= horizon_;
        out.next_state = encode_state(acting_);
        return out;
    }

private:
    Task sample_task(int j) {
        const auto& c = scenario_.config;
        Task t;
        t.owner = j;
        const double lo = std::max(c.min_task_bits, c.data_size_range_bits.lo);
        t.data_bits = rng_.uniform(lo, std::max(lo, c.data_size_range_bits.hi));
        t.cpu_cycles =
            t.data_bits * rng_.uniform(c.cycles_per_bit_range.lo, c.cycles_per_bit_range.hi);
        t.alpha = 1.0;
        t.beta.assign(scenario_.servers.size(), 0.0);
        return t;
    }

    void drift_deviations() {
        // Server twins go stale over the network (dt_drift); device twins
        // self-report and decay slower (user_dt_drift). Draws are consumed for
        // every entity regardless of rate so the stream layout is stable.
        const double server_drift = scenario_.config.dt_drift;
        const double user_drift = scenario_.config.user_dt_drift;
        if (server_drift <= 0.0 && user_drift <= 0.0) return;
        for (int u = 0; u < user_count(); ++u) {
            const double f = scenario_.users[u].cpu_freq_hz;
            eff_dev_user_[u] = std::clamp(eff_dev_user_[u] + rng_.normal(0.0, user_drift * f),
                                          0.0, 0.9 * f);
        }
        for (std::size_t i = 0; i < scenario_.servers.size(); ++i) {
            const double f = scenario_.servers[i].cpu_freq_hz;
            eff_dev_server_[i] =
                std::clamp(eff_dev_server_[i] + rng_.normal(0.0, server_drift * f), 0.0,
                           0.9 * f);
        }
    }

    static double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

    // Latency forecast pair for the state: physical (no deviation) and
    // twin-estimated (runs on f - effective deviation), both for a nominal
    // full offload to the current association, or fully local without one.
    std::pair<double, double> latency_forecast(int j) const {
        const auto& c = scenario_.config;
        const MobileUser& user = scenario_.users[j];
        const Task& task = tasks_[j];
        const auto assoc = assoc_[j];
        if (assoc) {
            const EdgeServer& server = scenario_.servers[*assoc];
            const double d_m =
                std::max(1.0, distance_km(positions_[j], server.position) * 1000.0);
            ChannelState expected;
            expected.distance_m = d_m;
            expected.path_gain = path_gain(d_m, c.channel);
            expected.fading_power = 1.0;  // the Exp(1) mean
            expected.rho_squared = expected.path_gain;
            const double rate = transmission_rate(c.bandwidth_hz, user.tx_power_w, expected,
                                                  c.noise_power_w, c.channel.distance_scaled_snr);
            if (rate > 0.0) {
                LatencyInputs li;
                li.alpha = 0.0;
                li.beta = 1.0;
                li.cycles = task.cpu_cycles;
                li.user_freq_hz = user.cpu_freq_hz;
                li.server_freq_hz = server.cpu_freq_hz;
                li.rate_bps = rate;
                li.volume_bits = task.data_bits;
                li.queue_s = c.queue_latency_s;
                li.decomposed = c.latency.decomposed;
                const double physical = latency_breakdown(li).total_s;
                li.server_freq_hz = server.cpu_freq_hz - eff_dev_server_[*assoc];
                const double estimated = latency_breakdown(li).total_s;
                return {physical, estimated};
            }
        }
        const double physical = task.cpu_cycles / user.cpu_freq_hz;
        const double estimated =
            task.cpu_cycles / (user.cpu_freq_hz - eff_dev_user_[j]);
        return {physical, estimated};
    }

    MdpState encode_state(int j) {
        const auto& c = scenario_.config;
        const MobileUser& user = scenario_.users[j];
        const Task& task = tasks_[j];
        candidates_ = nearest_servers(scenario_, positions_[j], c.candidate_count);

        MdpState st;
        auto& f = st.feature_vector;
        f.assign(state_size(), 0.0);

        const auto [forecast, dt_forecast] = latency_forecast(j);
        const double mig_potential = task.data_bits * c.migration_fixed_cost;
        const double dt_mig_potential = task.data_bits * scenario_.dt.dt_migration_cost;

        f[0] = clamp01(task.data_bits / data_ref_);
        f[1] = f[0];  // the twin mirrors task attributes exactly
        f[2] = clamp01(task.cpu_cycles / cycles_ref_);
        f[3] = f[2];
        f[4] = clamp01(forecast / lat_ref_);
        f[5] = clamp01(dt_forecast / lat_ref_);
        f[6] = clamp01(mig_potential / mig_ref_);
        f[7] = clamp01(dt_mig_potential / mig_ref_);
        f[8] = clamp01(user.cpu_freq_hz / (2.0 * c.user_cpu_freq_hz));
        f[9] = clamp01(eff_dev_user_[j] / (2.0 * c.user_cpu_freq_hz));
        f[10] = clamp01(last_offload_bits_[j] / data_ref_);
        f[11] = clamp01(user.speed_kmh / 120.0);

        for (std::size_t k = 0; k < candidates_.size(); ++k) {
            const int s = candidates_[k];
            const EdgeServer& server = scenario_.servers[s];
            const std::size_t base = 12 + 5 * k;
            f[base + 0] = clamp01(distance_km(positions_[j], server.position) / dist_ref_);
            f[base + 1] = clamp01(server.cpu_freq_hz / (2.0 * c.server_cpu_freq_hz));
            f[base + 2] = clamp01(eff_dev_server_[s] / (2.0 * c.server_cpu_freq_hz));
            f[base + 3] = cache_[j][static_cast<std::size_t>(s)] ? 1.0 : 0.0;
            f[base + 4] = (assoc_[j] && *assoc_[j] == s) ? 1.0 : 0.0;
        }
        return st;
    }

    Scenario scenario_;
    MobilitySource mobility_;
    int horizon_ = 0;
    Rng rng_;

    double data_ref_ = 1.0, cycles_ref_ = 1.0, lat_ref_ = 1.0, mig_ref_ = 1.0,
           dist_ref_ = 1.0, energy_ref_ = 1.0;

    std::vector<Position> positions_;
    std::vector<double> eff_dev_user_, eff_dev_server_;
    std::vector<std::optional<int>> assoc_;
    std::vector<std::vector<bool>> cache_;
    std::vector<double> last_offload_bits_;
    std::vector<Task> tasks_;
    std::vector<int> candidates_;  // of the acting user's latest observation

    int acting_ = 0;
    int step_count_ = 0;
    bool was_reset_ = false;
};

}  // namespace edgetwin
