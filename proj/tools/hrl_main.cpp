// Command-line front end: run single experiments, parameter scans, the full
// eight-condition comparison, the gradient check, and the scripted-policy
// environment solvability suite.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hrl/compare.hpp"
#include "hrl/config.hpp"
#include "hrl/experiment.hpp"
#include "hrl/gradcheck.hpp"
#include "hrl/svg.hpp"

namespace {

struct CommonOpts {
    std::string out_dir = "out";
    std::optional<int> trials;
    std::optional<int> epochs;
    std::optional<long> seed;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--trials", opts.trials, "override trial count");
    cmd->add_option("--epochs", opts.epochs, "override epoch count");
    cmd->add_option("--seed", opts.seed, "override base seed");
    cmd->add_option("--jobs", opts.jobs, "parallel trial workers")->check(CLI::PositiveNumber);
}

void apply_overrides(hrl::ExperimentConfig& cfg, const CommonOpts& opts) {
    if (opts.trials) cfg.trials = *opts.trials;
    if (opts.epochs) cfg.epochs = *opts.epochs;
    if (opts.seed) cfg.base_seed = *opts.seed;
    cfg.validate();
}

int cmd_run(const std::string& config_path, const CommonOpts& opts) {
    hrl::ExperimentConfig cfg = hrl::experiment_from_json(hrl::load_json_file(config_path));
    apply_overrides(cfg, opts);
    const std::filesystem::path out(opts.out_dir);
    hrl::ExperimentResult result = hrl::run_experiment(cfg, opts.jobs);
    hrl::emit_csv(result, out);
    hrl::emit_plot({{hrl::to_string(cfg.algorithm), result.aggregate}}, out / "curve.svg",
                   hrl::to_string(cfg.algorithm) + " on " + hrl::to_string(cfg.env.task));
    hrl::save_json_file(hrl::to_json(cfg), (out / "config.json").string());
    if (result.aborted_count > 0)
        std::fprintf(stderr, "warning: %d trial(s) aborted\n", result.aborted_count);
    std::printf("final median success: %.3f (q25 %.3f, q75 %.3f)\n",
                result.aggregate.median.back(), result.aggregate.q25.back(),
                result.aggregate.q75.back());
    return 0;
}

int cmd_scan(const std::string& config_path, const CommonOpts& opts) {
    hrl::ScanConfig scan = hrl::scan_from_json(hrl::load_json_file(config_path));
    apply_overrides(scan.base, opts);
    const std::filesystem::path out(opts.out_dir);
    std::filesystem::create_directories(out);
    const auto points = hrl::run_scan(scan, opts.jobs);

    std::ofstream summary(out / "scan_summary.csv");
    if (!summary) throw std::runtime_error("cannot write scan_summary.csv");
    summary << "value,snr_db,final_median,final_q25,final_q75\n";
    std::vector<std::pair<std::string, hrl::CurveAggregate>> curves;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", p.value);
        hrl::emit_csv(p.result, out / ("point_" + std::to_string(i)));
        summary << hrl::detail::fmt(p.value) << ",";
        if (p.snr) summary << hrl::detail::fmt(*p.snr);
        summary << "," << hrl::detail::fmt(p.result.aggregate.median.back()) << ","
                << hrl::detail::fmt(p.result.aggregate.q25.back()) << ","
                << hrl::detail::fmt(p.result.aggregate.q75.back()) << "\n";
        curves.emplace_back(buf, p.result.aggregate);
    }
    hrl::emit_plot(curves, out / "scan.svg",
                   scan.kind == hrl::ScanKind::RotationAngle ? "rotation scan" : "noise scan");
    std::printf("scan complete: %zu points\n", points.size());
    return 0;
}

int cmd_compare(const std::string& config_path, const CommonOpts& opts) {
    hrl::ExperimentConfig cfg = hrl::experiment_from_json(hrl::load_json_file(config_path));
    apply_overrides(cfg, opts);
    const auto entries = hrl::run_compare(cfg, opts.out_dir, opts.jobs);
    for (const auto& e : entries)
        std::printf("%s/%s: final median %.3f\n", hrl::to_string(e.algorithm).c_str(),
                    e.condition.c_str(), e.result.aggregate.median.back());
    return 0;
}

int cmd_gradcheck() {
    const auto report = hrl::run_gradient_check(20, 20240817ULL);
    std::printf("gradcheck: %d instances, max relative error %.3e\n", report.instances,
                report.max_rel_error);
    if (report.max_rel_error >= 1e-4) {
        std::fprintf(stderr, "gradcheck FAILED (threshold 1e-4)\n");
        return 1;
    }
    return 0;
}

int run_oracle_suite(hrl::Task task, int episodes, std::uint64_t seed) {
    hrl::EnvConfig cfg;
    cfg.task = task;
    hrl::RngStream rng(seed);
    int successes = 0;
    for (int e = 0; e < episodes; ++e) {
        auto [obs, desired] = hrl::env_reset(cfg, rng);
        for (int step = 0; step < cfg.episode_length; ++step) {
            const auto action = hrl::scripted_oracle_policy(cfg, obs, desired);
            obs = hrl::env_step(cfg, obs, action);
            if (hrl::success(hrl::ground_truth_goal(cfg, obs), desired,
                             cfg.success_threshold)) {
                ++successes;
                break;
            }
        }
    }
    return successes;
}

int cmd_oracle() {
    const int reach = run_oracle_suite(hrl::Task::Reach, 100, 7ULL);
    const int pick = run_oracle_suite(hrl::Task::PickPlace, 100, 11ULL);
    std::printf("oracle: reach %d/100, pick_place %d/100\n", reach, pick);
    if (reach < 100 || pick < 95) {
        std::fprintf(stderr, "oracle solvability below required rates\n");
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"goal-space perturbation lab for hierarchical goal-conditioned agents"};
    app.require_subcommand(1);

    std::string run_config, scan_config, compare_config;
    CommonOpts run_opts, scan_opts, compare_opts;

    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("config", run_config, "experiment config (json)")->required();
    add_common(run, run_opts);

    auto* scan = app.add_subcommand("scan", "sweep a rotation angle or noise sigma");
    scan->add_option("config", scan_config, "scan config (json)")->required();
    add_common(scan, scan_opts);

    auto* compare = app.add_subcommand("compare",
                                       "run both algorithms across the eight goal-space "
                                       "conditions");
    compare->add_option("config", compare_config, "base experiment config (json)")->required();
    add_common(compare, compare_opts);

    auto* gradcheck = app.add_subcommand("gradcheck", "verify backprop against finite differences");
    auto* oracle = app.add_subcommand("oracle", "scripted-policy environment solvability suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_config, run_opts);
        if (scan->parsed()) return cmd_scan(scan_config, scan_opts);
        if (compare->parsed()) return cmd_compare(compare_config, compare_opts);
        if (gradcheck->parsed()) return cmd_gradcheck();
        if (oracle->parsed()) return cmd_oracle();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
