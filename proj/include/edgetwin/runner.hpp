#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgetwin/a2c.hpp"
#include "edgetwin/baseline.hpp"
#include "edgetwin/config_io.hpp"
#include "edgetwin/environment.hpp"
#include "edgetwin/mobility.hpp"
#include "edgetwin/trajectory.hpp"

namespace edgetwin {

// ---------------------------------------------------------------------------
// run manifest
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("manifest: cannot hash missing file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return out;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char out[32];
    std::strftime(out, sizeof(out), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return out;
}

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string started_at_utc;
    std::string finished_at_utc;
};

inline void write_run_manifest(const RunManifest& m) {
    nlohmann::json j{{"command", m.command},          {"config_path", m.config_path},
                     {"config_hash", m.config_hash},  {"seed", m.seed},
                     {"out_dir", m.out_dir},          {"started_at_utc", m.started_at_utc},
                     {"finished_at_utc", m.finished_at_utc}};
    const auto path = std::filesystem::path(m.out_dir) / "manifest.json";
    std::ofstream out(path);
    if (!out) throw DataError("manifest: cannot write " + path.string());
    out << j.dump(2) << "\n";
}

namespace detail {

inline RunManifest open_manifest(const std::string& command, const std::string& config_path,
                                 std::uint64_t seed, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    RunManifest m;
    m.command = command;
    m.config_path = config_path;
    m.config_hash = file_hash_hex(config_path);
    m.seed = seed;
    m.out_dir = out_dir;
    m.started_at_utc = utc_timestamp();
    return m;
}

inline MobilitySource make_mobility(const std::string& trajectories, const ScenarioConfig& cfg) {
    if (trajectories == "synthetic") return MobilitySource();
    return MobilitySource(load_tdrive(trajectories, cfg.area_side_km, cfg.time_slot_s));
}

inline std::string csv_path(const std::string& out_dir, const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
}

struct ArmAccumulator {
    double reward_sum = 0.0, reward_sq = 0.0;
    double energy_sum = 0.0, energy_sq = 0.0;
    double qoe_sum = 0.0, qoe_sq = 0.0;
    double latency_sum = 0.0, latency_sq = 0.0;
    long n = 0;

    void add(const EpisodeRecord& e) {
        reward_sum += e.total_reward;
        reward_sq += e.total_reward * e.total_reward;
        energy_sum += e.total_energy_j;
        energy_sq += e.total_energy_j * e.total_energy_j;
        qoe_sum += e.mean_qoe;
        qoe_sq += e.mean_qoe * e.mean_qoe;
        latency_sum += e.mean_latency_s;
        latency_sq += e.mean_latency_s * e.mean_latency_s;
        ++n;
    }
    static double mean_of(double sum, long n) { return n > 0 ? sum / n : 0.0; }
    static double std_of(double sum, double sq, long n) {
        if (n < 2) return 0.0;
        const double m = sum / n;
        const double var = (sq - n * m * m) / (n - 1);
        return var > 0.0 ? std::sqrt(var) : 0.0;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

struct GenerateResult {
    std::string scenario_path;
    int server_count = 0;
    int user_count = 0;
};

inline GenerateResult cmd_generate(const GenerateOptions& opt) {
    ScenarioConfig cfg = load_scenario_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    auto manifest = detail::open_manifest("generate", opt.config_path, cfg.seed, opt.out_dir);

    const Scenario scenario = build_scenario(cfg, cfg.seed);
    const auto path = detail::csv_path(opt.out_dir, "scenario.json");
    std::ofstream out(path);
    if (!out) throw DataError("generate: cannot write " + path);
    out << scenario_to_json(scenario).dump(2) << "\n";

    manifest.finished_at_utc = utc_timestamp();
    write_run_manifest(manifest);
    return {path, static_cast<int>(scenario.servers.size()),
            static_cast<int>(scenario.users.size())};
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOptions {
    std::string config_path;
    std::string out_dir;
    int episodes = 100;
    int max_steps = 50;
    std::optional<std::uint64_t> seed;
    bool benchmark = false;                // DT-blind arm
    std::string trajectories = "synthetic";  // or a trajectory CSV path
    double actor_rate = 5e-4;
    double critic_rate = 1e-3;
    double discount = 0.95;
    double entropy_bonus = 0.01;
    double momentum = 0.0;
    double grad_clip = 500.0;
    int hidden_width = 128;
    bool w3_bootstrap = false;  // bootstrap with objective weight w3 instead of the discount
};

struct TrainResult {
    TrainReport report;
    std::string csv_path;
    std::string actor_path;
    std::string critic_path;
    double mean_reward_last20 = 0.0;
    double total_energy_j = 0.0;
    double mean_qoe = 0.0;
};

namespace detail {

inline TrainConfig train_config_from(const TrainOptions& opt, std::uint64_t seed, double w3) {
    TrainConfig tc;
    tc.episodes = opt.episodes;
    tc.max_steps = opt.max_steps;
    tc.actor_rate = opt.actor_rate;
    tc.critic_rate = opt.critic_rate;
    tc.discount = opt.w3_bootstrap ? w3 : opt.discount;
    tc.entropy_bonus = opt.entropy_bonus;
    tc.momentum = opt.momentum;
    tc.grad_clip = opt.grad_clip;
    tc.seed = seed;
    return tc;
}

inline std::vector<int> net_dims(int in, int hidden, int out) {
    return {in, hidden, hidden, hidden, out};
}

struct TrainedArm {
    TrainReport report;
};

inline TrainedArm train_one_arm(const ScenarioConfig& cfg, const TrainOptions& opt,
                                std::uint64_t seed, bool benchmark) {
    Scenario scenario = build_scenario(cfg, seed);
    Environment env(std::move(scenario), make_mobility(opt.trajectories, cfg), opt.max_steps);
    const Network actor =
        make_network(net_dims(env.state_size(), opt.hidden_width, env.action_count()),
                     seed ^ 0xac7a11ceULL);
    const Network critic =
        make_network(net_dims(env.state_size(), opt.hidden_width, 1), seed ^ 0xc4171cULL);
    const TrainConfig tc = train_config_from(opt, seed, cfg.weights[2]);
    TrainedArm arm;
    if (benchmark) {
        BenchmarkEnv blind(env);
        arm.report = train(blind, actor, critic, tc);
    } else {
        arm.report = train(env, actor, critic, tc);
    }
    return arm;
}

}  // namespace detail

inline TrainResult cmd_train(const TrainOptions& opt) {
    ScenarioConfig cfg = load_scenario_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    auto manifest = detail::open_manifest(opt.benchmark ? "train-benchmark" : "train",
                                          opt.config_path, cfg.seed, opt.out_dir);

    auto arm = detail::train_one_arm(cfg, opt, cfg.seed, opt.benchmark);

    TrainResult res;
    res.csv_path = detail::csv_path(opt.out_dir, "train_report.csv");
    write_train_report_csv(arm.report, res.csv_path);
    res.actor_path = detail::csv_path(opt.out_dir, "actor.json");
    res.critic_path = detail::csv_path(opt.out_dir, "critic.json");
    save_network(arm.report.actor, res.actor_path);
    save_network(arm.report.critic, res.critic_path);

    const auto& eps = arm.report.episodes;
    const std::size_t tail = eps.size() < 20 ? eps.size() : 20;
    for (std::size_t i = eps.size() - tail; i < eps.size(); ++i)
        res.mean_reward_last20 += eps[i].total_reward;
    if (tail > 0) res.mean_reward_last20 /= static_cast<double>(tail);
    for (const auto& e : eps) {
        res.total_energy_j += e.total_energy_j;
        res.mean_qoe += e.mean_qoe;
    }
    if (!eps.empty()) res.mean_qoe /= static_cast<double>(eps.size());
    res.report = std::move(arm.report);

    manifest.finished_at_utc = utc_timestamp();
    write_run_manifest(manifest);
    return res;
}

// ---------------------------------------------------------------------------
// compare (dt arm vs dt-blind benchmark arm, paired by seed)
// ---------------------------------------------------------------------------

struct CompareOptions {
    std::string config_path;
    std::string out_dir;
    int episodes = 100;
    int max_steps = 50;
    int seeds = 1;  // seeds cfg.seed, cfg.seed+1, ...
    std::optional<std::uint64_t> seed;
    std::string trajectories = "synthetic";
    double actor_rate = 5e-4;
    double critic_rate = 1e-3;
    double discount = 0.95;
    double entropy_bonus = 0.01;
    double momentum = 0.0;
    double grad_clip = 500.0;
    int hidden_width = 128;
    bool w3_bootstrap = false;
};

struct CompareArmStats {
    double reward_mean = 0.0, reward_std = 0.0;
    double energy_mean = 0.0, energy_std = 0.0;
    double qoe_mean = 0.0, qoe_std = 0.0;
    double latency_mean = 0.0, latency_std = 0.0;
};

struct CompareResult {
    std::string episodes_csv;
    std::string summary_csv;
    CompareArmStats dt;
    CompareArmStats benchmark;
    long rows = 0;
};

inline constexpr const char* kCompareEpisodesHeader =
    "seed,episode,dt_reward,dt_energy_j,dt_latency_s,dt_qoe,dt_migrations,dt_cache_hits,"
    "benchmark_reward,benchmark_energy_j,benchmark_latency_s,benchmark_qoe,"
    "benchmark_migrations,benchmark_cache_hits";

inline constexpr const char* kCompareSummaryHeader =
    "rows,dt_reward_mean,dt_reward_std,dt_energy_mean,dt_energy_std,dt_qoe_mean,dt_qoe_std,"
    "dt_latency_mean,dt_latency_std,benchmark_reward_mean,benchmark_reward_std,"
    "benchmark_energy_mean,benchmark_energy_std,benchmark_qoe_mean,benchmark_qoe_std,"
    "benchmark_latency_mean,benchmark_latency_std";

inline CompareResult cmd_compare(const CompareOptions& opt) {
    if (opt.seeds < 1) throw ConfigError("compare: seeds must be >= 1");
    ScenarioConfig cfg = load_scenario_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    auto manifest = detail::open_manifest("compare", opt.config_path, cfg.seed, opt.out_dir);

    TrainOptions arm_opt;
    arm_opt.config_path = opt.config_path;
    arm_opt.episodes = opt.episodes;
    arm_opt.max_steps = opt.max_steps;
    arm_opt.trajectories = opt.trajectories;
    arm_opt.actor_rate = opt.actor_rate;
    arm_opt.critic_rate = opt.critic_rate;
    arm_opt.discount = opt.discount;
    arm_opt.entropy_bonus = opt.entropy_bonus;
    arm_opt.momentum = opt.momentum;
    arm_opt.grad_clip = opt.grad_clip;
    arm_opt.hidden_width = opt.hidden_width;
    arm_opt.w3_bootstrap = opt.w3_bootstrap;

    CompareResult res;
    res.episodes_csv = detail::csv_path(opt.out_dir, "compare_episodes.csv");
    res.summary_csv = detail::csv_path(opt.out_dir, "compare_summary.csv");

    std::ofstream rows(res.episodes_csv);
    if (!rows) throw DataError("compare: cannot write " + res.episodes_csv);
    rows << kCompareEpisodesHeader << "\n";

    detail::ArmAccumulator acc_dt, acc_bm;
    for (int s = 0; s < opt.seeds; ++s) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
        const auto dt_arm = detail::train_one_arm(cfg, arm_opt, seed, /*benchmark=*/false);
        const auto bm_arm = detail::train_one_arm(cfg, arm_opt, seed, /*benchmark=*/true);
        if (dt_arm.report.episodes.size() != bm_arm.report.episodes.size())
            throw NumericError("compare: arm episode counts diverged");
        for (std::size_t e = 0; e < dt_arm.report.episodes.size(); ++e) {
            const auto& d = dt_arm.report.episodes[e];
            const auto& b = bm_arm.report.episodes[e];
            acc_dt.add(d);
            acc_bm.add(b);
            char line[512];
            std::snprintf(line, sizeof(line),
                          "%llu,%d,%.9f,%.9f,%.9f,%.9f,%d,%d,%.9f,%.9f,%.9f,%.9f,%d,%d\n",
                          static_cast<unsigned long long>(seed), d.episode, d.total_reward,
                          d.total_energy_j, d.mean_latency_s, d.mean_qoe, d.migrations,
                          d.cache_hits, b.total_reward, b.total_energy_j, b.mean_latency_s,
                          b.mean_qoe, b.migrations, b.cache_hits);
            rows << line;
            ++res.rows;
        }
    }
    rows.close();

    auto fill = [](const detail::ArmAccumulator& a) {
        CompareArmStats s;
        s.reward_mean = detail::ArmAccumulator::mean_of(a.reward_sum, a.n);
        s.reward_std = detail::ArmAccumulator::std_of(a.reward_sum, a.reward_sq, a.n);
        s.energy_mean = detail::ArmAccumulator::mean_of(a.energy_sum, a.n);
        s.energy_std = detail::ArmAccumulator::std_of(a.energy_sum, a.energy_sq, a.n);
        s.qoe_mean = detail::ArmAccumulator::mean_of(a.qoe_sum, a.n);
        s.qoe_std = detail::ArmAccumulator::std_of(a.qoe_sum, a.qoe_sq, a.n);
        s.latency_mean = detail::ArmAccumulator::mean_of(a.latency_sum, a.n);
        s.latency_std = detail::ArmAccumulator::std_of(a.latency_sum, a.latency_sq, a.n);
        return s;
    };
    res.dt = fill(acc_dt);
    res.benchmark = fill(acc_bm);

    std::ofstream summary(res.summary_csv);
    if (!summary) throw DataError("compare: cannot write " + res.summary_csv);
    summary << kCompareSummaryHeader << "\n";
    char line[640];
    std::snprintf(line, sizeof(line),
                  "%ld,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,"
                  "%.9f,%.9f\n",
                  res.rows, res.dt.reward_mean, res.dt.reward_std, res.dt.energy_mean,
                  res.dt.energy_std, res.dt.qoe_mean, res.dt.qoe_std, res.dt.latency_mean,
                  res.dt.latency_std, res.benchmark.reward_mean, res.benchmark.reward_std,
                  res.benchmark.energy_mean, res.benchmark.energy_std, res.benchmark.qoe_mean,
                  res.benchmark.qoe_std, res.benchmark.latency_mean, res.benchmark.latency_std);
    summary << line;
    summary.close();

    manifest.finished_at_utc = utc_timestamp();
    write_run_manifest(manifest);
    return res;
}

// ---------------------------------------------------------------------------
// speed sweep (synthetic mobility only)
// ---------------------------------------------------------------------------

struct SpeedSweepOptions {
    std::string config_path;
    std::string out_dir;
    std::vector<double> speeds_kmh = {0.0, 20.0, 40.0, 60.0};
    int train_episodes = 100;
    int eval_episodes = 30;
    int max_steps = 50;
    std::optional<std::uint64_t> seed;
    double actor_rate = 5e-4;
    double critic_rate = 1e-3;
    double discount = 0.95;
    double entropy_bonus = 0.01;
    double momentum = 0.0;
    double grad_clip = 500.0;
    int hidden_width = 128;
};

struct SpeedPoint {
    double speed_kmh = 0.0;
    double mean_migrations = 0.0;
    double mean_offload_latency_s = 0.0;
    double mean_latency_s = 0.0;
};

struct SpeedSweepResult {
    std::string csv_path;
    std::vector<SpeedPoint> points;
};

inline constexpr const char* kSpeedSweepHeader =
    "speed_kmh,mean_migrations,mean_offload_latency_s,mean_latency_s,episodes";

inline SpeedSweepResult cmd_speed_sweep(const SpeedSweepOptions& opt) {
    if (opt.speeds_kmh.empty()) throw ConfigError("speed-sweep: need at least one speed");
    for (double v : opt.speeds_kmh)
        if (v < 0.0 || !std::isfinite(v))
            throw ConfigError("speed-sweep: speeds must be finite and >= 0");
    ScenarioConfig cfg = load_scenario_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    auto manifest = detail::open_manifest("speed-sweep", opt.config_path, cfg.seed, opt.out_dir);

    TrainOptions arm_opt;
    arm_opt.config_path = opt.config_path;
    arm_opt.episodes = opt.train_episodes;
    arm_opt.max_steps = opt.max_steps;
    arm_opt.actor_rate = opt.actor_rate;
    arm_opt.critic_rate = opt.critic_rate;
    arm_opt.discount = opt.discount;
    arm_opt.entropy_bonus = opt.entropy_bonus;
    arm_opt.momentum = opt.momentum;
    arm_opt.grad_clip = opt.grad_clip;
    arm_opt.hidden_width = opt.hidden_width;
    const auto trained = detail::train_one_arm(cfg, arm_opt, cfg.seed, /*benchmark=*/false);

    TrainConfig eval_cfg;
    eval_cfg.episodes = opt.eval_episodes;
    eval_cfg.max_steps = opt.max_steps;
    eval_cfg.actor_rate = opt.actor_rate;
    eval_cfg.critic_rate = opt.critic_rate;
    eval_cfg.discount = opt.discount;
    eval_cfg.entropy_bonus = opt.entropy_bonus;
    eval_cfg.seed = cfg.seed;

    SpeedSweepResult res;
    res.csv_path = detail::csv_path(opt.out_dir, "speed_sweep.csv");
    std::ofstream out(res.csv_path);
    if (!out) throw DataError("speed-sweep: cannot write " + res.csv_path);
    out << kSpeedSweepHeader << "\n";

    for (double speed : opt.speeds_kmh) {
        ScenarioConfig at_speed = cfg;
        at_speed.user_speed_kmh = speed;
        Scenario scenario = build_scenario(at_speed, cfg.seed);
        Environment env(std::move(scenario), MobilitySource(), opt.max_steps);
        const TrainReport eval = infer_offloading(env, trained.report.actor,
                                                  trained.report.critic, eval_cfg,
                                                  /*frozen=*/true, /*greedy=*/true);
        SpeedPoint pt;
        pt.speed_kmh = speed;
        double offload_lat = 0.0;
        long offload_eps = 0;
        for (const auto& e : eval.episodes) {
            pt.mean_migrations += e.migrations;
            pt.mean_latency_s += e.mean_latency_s;
            if (e.offload_steps > 0) {
                offload_lat += e.mean_offload_latency_s;
                ++offload_eps;
            }
        }
        const auto n = static_cast<double>(eval.episodes.size());
        if (n > 0) {
            pt.mean_migrations /= n;
            pt.mean_latency_s /= n;
        }
        pt.mean_offload_latency_s = offload_eps > 0 ? offload_lat / offload_eps : 0.0;
        res.points.push_back(pt);
        char line[256];
        std::snprintf(line, sizeof(line), "%.3f,%.9f,%.9f,%.9f,%zu\n", pt.speed_kmh,
                      pt.mean_migrations, pt.mean_offload_latency_s, pt.mean_latency_s,
                      eval.episodes.size());
        out << line;
    }
    out.close();

    manifest.finished_at_utc = utc_timestamp();
    write_run_manifest(manifest);
    return res;
}

}  // namespace edgetwin
