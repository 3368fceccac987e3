// Command-line front end: generate / train / compare / speed-sweep.
// Exit codes: 0 ok, 2 config or usage error, 3 data error, 4 internal error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgetwin/runner.hpp"

namespace {

struct Cli {
    edgetwin::GenerateOptions gen;
    edgetwin::TrainOptions train;
    edgetwin::CompareOptions compare;
    edgetwin::SpeedSweepOptions sweep;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_hyper_flags(CLI::App* cmd, double& actor, double& critic, double& discount,
                     double& entropy, double& momentum, double& clip, int& hidden) {
    cmd->add_option("--actor-rate", actor, "actor learning rate");
    cmd->add_option("--critic-rate", critic, "critic learning rate");
    cmd->add_option("--discount", discount, "bootstrap discount");
    cmd->add_option("--entropy", entropy, "entropy bonus weight");
    cmd->add_option("--momentum", momentum, "momentum coefficient (0 = off)");
    cmd->add_option("--grad-clip", clip, "per-step gradient norm cap (0 = off)");
    cmd->add_option("--hidden", hidden, "hidden layer width");
}

int run(int argc, char** argv) {
    CLI::App app{"digital-twin edge offloading simulator"};
    app.require_subcommand(1);
    Cli cli;

    auto* gen = app.add_subcommand("generate", "place servers and users, write scenario.json");
    gen->add_option("--config", cli.gen.config_path, "scenario config JSON")->required();
    gen->add_option("--out", cli.gen.out_dir, "output directory")->required();
    gen->add_option("--seed", cli.seed, "override the config seed");

    auto* train = app.add_subcommand("train", "train one arm, write train_report.csv");
    train->add_option("--config", cli.train.config_path, "scenario config JSON")->required();
    train->add_option("--out", cli.train.out_dir, "output directory")->required();
    train->add_option("--episodes", cli.train.episodes, "episode count");
    train->add_option("--max-steps", cli.train.max_steps, "steps per episode");
    train->add_option("--seed", cli.seed, "override the config seed");
    train->add_option("--trajectories", cli.train.trajectories,
                      "\"synthetic\" or a trajectory CSV path");
    train->add_flag("--benchmark", cli.train.benchmark, "train the DT-blind benchmark arm");
    train->add_flag("--w3-bootstrap", cli.train.w3_bootstrap,
                    "bootstrap with the QoE objective weight instead of the discount");
    add_hyper_flags(train, cli.train.actor_rate, cli.train.critic_rate, cli.train.discount,
                    cli.train.entropy_bonus, cli.train.momentum, cli.train.grad_clip,
                    cli.train.hidden_width);

    auto* comp = app.add_subcommand("compare", "paired dt vs benchmark runs");
    comp->add_option("--config", cli.compare.config_path, "scenario config JSON")->required();
    comp->add_option("--out", cli.compare.out_dir, "output directory")->required();
    comp->add_option("--episodes", cli.compare.episodes, "episodes per arm");
    comp->add_option("--max-steps", cli.compare.max_steps, "steps per episode");
    comp->add_option("--seeds", cli.compare.seeds, "number of paired seeds");
    comp->add_option("--seed", cli.seed, "base seed override");
    comp->add_option("--trajectories", cli.compare.trajectories,
                     "\"synthetic\" or a trajectory CSV path");
    comp->add_flag("--w3-bootstrap", cli.compare.w3_bootstrap,
                   "bootstrap with the QoE objective weight instead of the discount");
    add_hyper_flags(comp, cli.compare.actor_rate, cli.compare.critic_rate, cli.compare.discount,
                    cli.compare.entropy_bonus, cli.compare.momentum, cli.compare.grad_clip,
                    cli.compare.hidden_width);

    auto* sweep = app.add_subcommand("speed-sweep",
                                     "evaluate a trained policy across user speeds");
    sweep->add_option("--config", cli.sweep.config_path, "scenario config JSON")->required();
    sweep->add_option("--out", cli.sweep.out_dir, "output directory")->required();
    sweep->add_option("--speeds", cli.sweep.speeds_kmh, "speeds in km/h");
    sweep->add_option("--train-episodes", cli.sweep.train_episodes, "training episodes");
    sweep->add_option("--eval-episodes", cli.sweep.eval_episodes, "greedy eval episodes per speed");
    sweep->add_option("--max-steps", cli.sweep.max_steps, "steps per episode");
    sweep->add_option("--seed", cli.seed, "override the config seed");
    add_hyper_flags(sweep, cli.sweep.actor_rate, cli.sweep.critic_rate, cli.sweep.discount,
                    cli.sweep.entropy_bonus, cli.sweep.momentum, cli.sweep.grad_clip,
                    cli.sweep.hidden_width);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (gen->parsed()) {
        cli.seed_set = gen->count("--seed") > 0;
        if (cli.seed_set) cli.gen.seed = cli.seed;
        const auto res = edgetwin::cmd_generate(cli.gen);
        std::printf("generated %d servers, %d users -> %s\n", res.server_count, res.user_count,
                    res.scenario_path.c_str());
    } else if (train->parsed()) {
        cli.seed_set = train->count("--seed") > 0;
        if (cli.seed_set) cli.train.seed = cli.seed;
        const auto res = edgetwin::cmd_train(cli.train);
        std::printf("trained %zu episodes (%s arm)\n", res.report.episodes.size(),
                    cli.train.benchmark ? "benchmark" : "dt");
        std::printf("summary: mean_reward_last20=%.6f total_energy_j=%.6f mean_qoe=%.6f\n",
                    res.mean_reward_last20, res.total_energy_j, res.mean_qoe);
        std::printf("report: %s\n", res.csv_path.c_str());
    } else if (comp->parsed()) {
        cli.seed_set = comp->count("--seed") > 0;
        if (cli.seed_set) cli.compare.seed = cli.seed;
        const auto res = edgetwin::cmd_compare(cli.compare);
        std::printf("compared %ld paired episodes\n", res.rows);
        std::printf("dt:        reward %.6f +- %.6f  energy_j %.6f +- %.6f  qoe %.6f +- %.6f\n",
                    res.dt.reward_mean, res.dt.reward_std, res.dt.energy_mean, res.dt.energy_std,
                    res.dt.qoe_mean, res.dt.qoe_std);
        std::printf("benchmark: reward %.6f +- %.6f  energy_j %.6f +- %.6f  qoe %.6f +- %.6f\n",
                    res.benchmark.reward_mean, res.benchmark.reward_std,
                    res.benchmark.energy_mean, res.benchmark.energy_std, res.benchmark.qoe_mean,
                    res.benchmark.qoe_std);
        std::printf("rows: %s\nsummary: %s\n", res.episodes_csv.c_str(),
                    res.summary_csv.c_str());
    } else if (sweep->parsed()) {
        cli.seed_set = sweep->count("--seed") > 0;
        if (cli.seed_set) cli.sweep.seed = cli.seed;
        const auto res = edgetwin::cmd_speed_sweep(cli.sweep);
        for (const auto& p : res.points)
            std::printf("speed %.1f km/h: migrations/episode %.3f, offload latency %.6f s\n",
                        p.speed_kmh, p.mean_migrations, p.mean_offload_latency_s);
        std::printf("sweep: %s\n", res.csv_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const edgetwin::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const edgetwin::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
}
