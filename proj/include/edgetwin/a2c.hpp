#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "edgetwin/environment.hpp"
#include "edgetwin/errors.hpp"
#include "edgetwin/nn.hpp"
#include "edgetwin/rng.hpp"

namespace edgetwin {

struct TrainConfig {
    int episodes = 100;
    int max_steps = 50;       // T_max per episode
    double actor_rate = 1e-3;
    double critic_rate = 5e-3;
    double discount = 0.99;   // bootstrap coefficient; the w3-bootstrap mode
                              // swaps in the objective's QoE weight here
    double entropy_bonus = 0.01;
    double momentum = 0.0;    // 0 = plain SGD steps
    // > 0: rescale each per-step gradient to this L2 norm cap. Deep fades on
    // far offloads make isolated rewards ~100x the typical magnitude and a
    // single uncapped TD step can blow the critic to NaN; the cap only
    // engages on those outliers. 0 keeps the textbook update.
    double grad_clip = 0.0;
    int eval_interval = 0;    // > 0: greedy probe episode every N episodes
    std::uint64_t seed = 1;
};

inline void validate_train_config(const TrainConfig& c) {
    if (!(c.actor_rate > 0.0) || !(c.critic_rate > 0.0))
        throw ConfigError("train config: learning rates must be > 0");
    if (c.episodes < 0) throw ConfigError("train config: episodes must be >= 0");
    if (c.max_steps < 1) throw ConfigError("train config: max_steps must be >= 1");
    if (!(c.discount > 0.0) || c.discount > 1.0)
        throw ConfigError("train config: discount must lie in (0, 1]");
    if (c.entropy_bonus < 0.0) throw ConfigError("train config: entropy_bonus must be >= 0");
    if (c.momentum < 0.0 || c.momentum >= 1.0)
        throw ConfigError("train config: momentum must lie in [0, 1)");
    if (c.grad_clip < 0.0) throw ConfigError("train config: grad_clip must be >= 0");
}

struct EpisodeRecord {
    int episode = 0;
    double total_reward = 0.0;
    double scaled_reward = 0.0;   // affine map of totals onto [-1, 1] per run
    double mean_latency_s = 0.0;
    double total_energy_j = 0.0;
    double mean_qoe = 0.0;
    int migrations = 0;
    int cache_hits = 0;
    // offloaded steps only (edge latency > 0); not part of the CSV schema
    double mean_offload_latency_s = 0.0;
    int offload_steps = 0;
};

struct EvalPoint {
    int episode = 0;
    double greedy_total_reward = 0.0;
};

struct TrainReport {
    std::vector<EpisodeRecord> episodes;
    std::vector<EvalPoint> eval_points;
    Network actor;
    Network critic;
    long steps_run = 0;
    bool converged_early = false;
    int stopped_after_episode = 0;  // count actually run
};

// Anything the trainer can drive: the MEC environment, its benchmark wrapper,
// or the tiny bandit fixtures used by the unit tests.
template <class E>
concept TrainableEnv = requires(E env, int action, std::uint64_t seed) {
    { env.reset(seed) } -> std::convertible_to<MdpState>;
    { env.step(action) } -> std::convertible_to<StepOutcome>;
    { env.state_size() } -> std::convertible_to<int>;
    { env.action_count() } -> std::convertible_to<int>;
};

// ---------------------------------------------------------------------------
// pieces
// ---------------------------------------------------------------------------

// One-step advantage; the same expression serves as the TD error.
inline double advantage_estimate(double r_next, double v_next, double v_now,
                                 double discount, bool terminal) {
    return r_next + discount * v_next * (terminal ? 0.0 : 1.0) - v_now;
}

inline constexpr double (*td_error)(double, double, double, double, bool) =
    advantage_estimate;

inline int sample_index(const std::vector<double>& probs, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;  // rounding leftovers
}

inline int greedy_index(const std::vector<double>& logits) {
    int best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i)
        if (logits[i] > logits[best]) best = static_cast<int>(i);
    return best;
}

inline MdpAction select_action(const Network& actor, const MdpState& state, Rng& rng,
                               bool greedy) {
    if (static_cast<int>(state.feature_vector.size()) != actor.input_size())
        throw LifecycleError("select_action: state width does not match the actor");
    const int n_actions = actor.output_size();
    if (n_actions % (kBetaLevels * 4) != 0)
        throw LifecycleError("select_action: actor output is not a composite action space");
    const int k = n_actions / (kBetaLevels * 4) - 1;
    const auto logits = output_of(actor, state.feature_vector);
    const int idx = greedy ? greedy_index(logits) : sample_index(softmax_policy(logits), rng);
    return decode_action(idx, k);
}

// ---------------------------------------------------------------------------
// the loop
// ---------------------------------------------------------------------------

namespace detail {

inline void clip_to_norm(GradientSet& grads, double cap) {
    if (cap <= 0.0) return;
    double sq = 0.0;
    for (const auto& layer : grads.w)
        for (double g : layer) sq += g * g;
    for (const auto& layer : grads.b)
        for (double g : layer) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm <= cap) return;
    const double scale = cap / norm;
    for (auto& layer : grads.w)
        for (double& g : layer) g *= scale;
    for (auto& layer : grads.b)
        for (double& g : layer) g *= scale;
}

inline void fold_momentum(GradientSet& velocity, const GradientSet& grads, double momentum) {
    for (std::size_t l = 0; l < grads.w.size(); ++l) {
        for (std::size_t i = 0; i < grads.w[l].size(); ++i)
            velocity.w[l][i] = momentum * velocity.w[l][i] + grads.w[l][i];
        for (std::size_t i = 0; i < grads.b[l].size(); ++i)
            velocity.b[l][i] = momentum * velocity.b[l][i] + grads.b[l][i];
    }
}

struct ConvergenceWatch {
    // non-overlapping 20-episode windows; three consecutive window-to-window
    // relative changes under 1% end the run
    static constexpr int kWindow = 20;
    static constexpr int kStableNeeded = 3;
    double window_sum = 0.0;
    int in_window = 0;
    double prev_mean = 0.0;
    bool have_prev = false;
    int stable_runs = 0;

    bool feed(double episode_reward) {
        window_sum += episode_reward;
        if (++in_window < kWindow) return false;
        const double mean = window_sum / kWindow;
        window_sum = 0.0;
        in_window = 0;
        bool stop = false;
        if (have_prev) {
            const double tol = std::max(0.01 * std::abs(prev_mean), 1e-12);
            stable_runs = std::abs(mean - prev_mean) <= tol ? stable_runs + 1 : 0;
            stop = stable_runs >= kStableNeeded;
        }
        prev_mean = mean;
        have_prev = true;
        return stop;
    }
};

inline void fill_scaled_rewards(std::vector<EpisodeRecord>& episodes) {
    if (episodes.empty()) return;
    double lo = episodes.front().total_reward, hi = lo;
    for (const auto& e : episodes) {
        lo = std::min(lo, e.total_reward);
        hi = std::max(hi, e.total_reward);
    }
    for (auto& e : episodes)
        e.scaled_reward = hi > lo ? -1.0 + 2.0 * (e.total_reward - lo) / (hi - lo) : 0.0;
}

template <TrainableEnv Env>
double greedy_probe(Env& env, const Network& actor, std::uint64_t seed, int max_steps) {
    MdpState state = env.reset(seed);
    double total = 0.0;
    for (int t = 0; t < max_steps; ++t) {
        const auto logits = output_of(actor, state.feature_vector);
        auto out = env.step(greedy_index(logits));
        total += out.reward;
        state = std::move(out.next_state);
        if (out.done) break;
    }
    return total;
}

template <TrainableEnv Env>
TrainReport run_episodes(Env& env, Network actor, Network critic, const TrainConfig& cfg,
                         bool update, bool greedy, bool convergence_exit) {
    validate_train_config(cfg);
    if (actor.input_size() != env.state_size() || critic.input_size() != env.state_size())
        throw LifecycleError("train: network input width does not match the state size");
    if (actor.output_size() != env.action_count())
        throw LifecycleError("train: actor output width does not match the action space");
    if (critic.output_size() != 1)
        throw LifecycleError("train: critic must have a single output");

    TrainReport report;
    Rng rng(cfg.seed ^ 0xa2c0ffee12345678ULL);  // action sampling stream, separate from the env
    GradientSet vel_actor = zero_gradients(actor);
    GradientSet vel_critic = zero_gradients(critic);
    ConvergenceWatch watch;

    for (int episode = 0; episode < cfg.episodes; ++episode) {
        MdpState state = env.reset(cfg.seed + static_cast<std::uint64_t>(episode));
        EpisodeRecord rec;
        rec.episode = episode;
        double latency_sum = 0.0, qoe_sum = 0.0, offload_latency_sum = 0.0;
        int steps = 0;

        for (int t = 0; t < cfg.max_steps; ++t) {
            const Activations actor_acts = forward(actor, state.feature_vector);
            const auto& logits = actor_acts.post.back();
            const auto probs = softmax_policy(logits);
            const int action =
                greedy ? greedy_index(logits) : sample_index(probs, rng);

            StepOutcome out = env.step(action);
            if (!std::isfinite(out.reward))
                throw NumericError("train: nonfinite reward at episode " +
                                   std::to_string(episode) + " step " + std::to_string(t));

            if (update) {
                const Activations critic_acts = forward(critic, state.feature_vector);
                const double v_now = critic_acts.post.back()[0];
                const double v_next = output_of(critic, out.next_state.feature_vector)[0];
                const double adv =
                    advantage_estimate(out.reward, v_next, v_now, cfg.discount, out.done);
                if (!std::isfinite(adv))
                    throw NumericError("train: nonfinite advantage at episode " +
                                       std::to_string(episode) + " step " +
                                       std::to_string(t) + " (v_now=" +
                                       std::to_string(v_now) + ", v_next=" +
                                       std::to_string(v_next) + ")");

                // critic descends d(adv^2)/dV(s) = -2 adv (semi-gradient)
                GradientSet critic_grads =
                    backward(critic, critic_acts, {-2.0 * adv});
                // actor ascends adv * grad log pi(a|s) + entropy bonus
                std::vector<double> upstream(probs.size());
                double entropy = 0.0;
                for (double p : probs)
                    if (p > 0.0) entropy -= p * std::log(p);
                for (std::size_t i = 0; i < probs.size(); ++i) {
                    const double indicator = static_cast<int>(i) == action ? 1.0 : 0.0;
                    const double dentropy =
                        probs[i] > 0.0 ? -probs[i] * (std::log(probs[i]) + entropy) : 0.0;
                    upstream[i] = adv * (indicator - probs[i]) + cfg.entropy_bonus * dentropy;
                }
                GradientSet actor_grads = backward(actor, actor_acts, upstream);
                clip_to_norm(critic_grads, cfg.grad_clip);
                clip_to_norm(actor_grads, cfg.grad_clip);

                if (cfg.momentum > 0.0) {
                    fold_momentum(vel_critic, critic_grads, cfg.momentum);
                    fold_momentum(vel_actor, actor_grads, cfg.momentum);
                    critic = apply_update(critic, vel_critic, cfg.critic_rate,
                                          Direction::Descend);
                    actor = apply_update(actor, vel_actor, cfg.actor_rate,
                                         Direction::Ascend);
                } else {
                    critic = apply_update(critic, critic_grads, cfg.critic_rate,
                                          Direction::Descend);
                    actor = apply_update(actor, actor_grads, cfg.actor_rate,
                                         Direction::Ascend);
                }
            }

            rec.total_reward += out.reward;
            latency_sum += out.cost.latency.total_s;
            rec.total_energy_j += out.cost.energy.total_j;
            qoe_sum += out.cost.qoe.value;
            rec.migrations += out.cost.migrated ? 1 : 0;
            rec.cache_hits += out.cost.cache_hit ? 1 : 0;
            if (out.cost.latency.edge_s > 0.0) {
                offload_latency_sum += out.cost.latency.total_s;
                ++rec.offload_steps;
            }
            ++steps;
            ++report.steps_run;
            state = std::move(out.next_state);
            if (out.done) break;
        }

        rec.mean_latency_s = steps > 0 ? latency_sum / steps : 0.0;
        rec.mean_qoe = steps > 0 ? qoe_sum / steps : 0.0;
        rec.mean_offload_latency_s =
            rec.offload_steps > 0 ? offload_latency_sum / rec.offload_steps : 0.0;
        report.episodes.push_back(rec);

        if (cfg.eval_interval > 0 && (episode + 1) % cfg.eval_interval == 0) {
            const std::uint64_t probe_seed = cfg.seed + 0x5eedu + episode;
            report.eval_points.push_back(
                {episode, greedy_probe(env, actor, probe_seed, cfg.max_steps)});
        }

        if (convergence_exit && watch.feed(rec.total_reward)) {
            report.converged_early = true;
            report.stopped_after_episode = episode + 1;
            break;
        }
        report.stopped_after_episode = episode + 1;
    }

    fill_scaled_rewards(report.episodes);
    report.actor = std::move(actor);
    report.critic = std::move(critic);
    return report;
}

}  // namespace detail

// Algorithm-style training: sampled actions, one gradient step per env step,
// fixed episode budget.
template <TrainableEnv Env>
TrainReport train(Env& env, const Network& actor, const Network& critic,
                  const TrainConfig& cfg) {
    return detail::run_episodes(env, actor, critic, cfg, /*update=*/true,
                                /*greedy=*/false, /*convergence_exit=*/false);
}

// Offloading loop over trained parameters: frozen greedy rollouts by default,
// or online TD-error fine-tuning with frozen = false. Either way the windowed
// convergence rule may end the run early.
template <TrainableEnv Env>
TrainReport infer_offloading(Env& env, const Network& actor, const Network& critic,
                             const TrainConfig& cfg, bool frozen = true,
                             bool greedy = true) {
    return detail::run_episodes(env, actor, critic, cfg, /*update=*/!frozen, greedy,
                                /*convergence_exit=*/true);
}

// ---------------------------------------------------------------------------
// report CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kTrainReportHeader =
    "episode,total_reward,scaled_reward,energy_j,latency_s,qoe,migrations,cache_hits";

inline void write_train_report_csv(const TrainReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("train report: cannot open for write: " + path);
    out << kTrainReportHeader << "\n";
    char line[256];
    for (const auto& e : report.episodes) {
        std::snprintf(line, sizeof(line), "%d,%.9f,%.9f,%.9f,%.9f,%.9f,%d,%d\n", e.episode,
                      e.total_reward, e.scaled_reward, e.total_energy_j, e.mean_latency_s,
                      e.mean_qoe, e.migrations, e.cache_hits);
        out << line;
    }
}

}  // namespace edgetwin
