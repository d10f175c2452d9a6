#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hrl/config.hpp"
#include "hrl/ddpg.hpp"
#include "hrl/env.hpp"
#include "hrl/goalspace.hpp"
#include "hrl/hac.hpp"
#include "hrl/stats.hpp"

namespace hrl {

struct TrialResult {
    int trial_index = 0;
    std::uint64_t seed = 0;
    std::vector<double> success_rates;  // one entry per epoch
    std::vector<long> env_steps;        // cumulative training env steps per epoch
    double wall_time_s = 0.0;
    bool aborted = false;
};

struct ExperimentResult {
    std::vector<TrialResult> trials;  // indexed by trial
    CurveAggregate aggregate;         // across completed trials
    std::vector<long> env_steps;      // per-epoch cumulative training steps
    int aborted_count = 0;
};

namespace detail {

inline Vec goal_from_flat_obs(const EnvConfig& env, const Vec& obs_flat) {
    if (env.task == Task::Reach) return {obs_flat[0], obs_flat[1], obs_flat[2]};
    return {obs_flat[4], obs_flat[5], obs_flat[6]};
}

inline Vec sub_action_bounds(const EnvConfig& env) {
    Vec bounds(static_cast<std::size_t>(env.action_dim()), env.a_max);
    if (env.task == Task::PickPlace) bounds.back() = 1.0;  // grip command
    return bounds;
}

}  // namespace detail

// Trains one seeded agent (or hierarchy) and records the per-epoch eval
// success rate. Deterministic given (config, trial_index): seed is
// base_seed + trial_index and all randomness flows from that stream.
inline TrialResult run_trial(const ExperimentConfig& cfg, int trial_index) {
    const auto t_start = std::chrono::steady_clock::now();
    TrialResult res;
    res.trial_index = trial_index;
    res.seed = static_cast<std::uint64_t>(cfg.base_seed + trial_index);
    RngStream rng(res.seed);

    const EnvConfig& env = cfg.env;
    const int dim_s = cfg.goal_dim_sub();
    const int dim_m = cfg.goal_dim_master();
    HacConfig hac = cfg.hac;
    hac.levels = cfg.algorithm == Algorithm::Her ? 1 : 2;

    DdpgAgent sub = make_ddpg_agent(env.obs_dim(), dim_s, env.action_dim(),
                                    detail::sub_action_bounds(env), cfg.hyper, rng);
    std::optional<DdpgAgent> master;
    if (hac.levels == 2)
        master = make_ddpg_agent(env.obs_dim(), dim_m, dim_s,
                                 Vec(static_cast<std::size_t>(dim_s), hac.master_offset_bound),
                                 cfg.hyper, rng);

    ReplayBuffer<Transition> sub_buffer(static_cast<std::size_t>(cfg.hyper.buffer_capacity));
    ReplayBuffer<MasterTransition> master_buffer(
        static_cast<std::size_t>(cfg.hyper.buffer_capacity));

    // The master acts in absolute subgoal coordinates; its actor output is an
    // offset from the currently achieved sub-level goal, recomputed here.
    const std::function<Vec(const Vec&)> master_base = [&](const Vec& obs_flat) {
        return apply_transform(cfg.f_s, detail::goal_from_flat_obs(env, obs_flat), rng);
    };

    long steps = 0;
    try {
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            for (int ep = 0; ep < cfg.episodes_per_epoch; ++ep) {
                auto [obs, desired] = env_reset(env, rng);
                EpisodeResult er = run_hierarchy_episode(
                    master ? &*master : nullptr, sub, env, obs, desired, cfg.f_m, cfg.f_s, hac,
                    cfg.hyper, cfg.her, /*explore=*/true, rng,
                    master ? &master_buffer : nullptr, &sub_buffer);
                steps += er.env_steps;
                if (sub_buffer.size() >= static_cast<std::size_t>(cfg.hyper.batch_size))
                    for (int u = 0; u < cfg.hyper.updates_per_cycle; ++u)
                        ddpg_update(sub, sub_buffer, cfg.hyper, rng);
                if (master &&
                    master_buffer.size() >= static_cast<std::size_t>(cfg.hyper.batch_size))
                    for (int u = 0; u < cfg.hyper.updates_per_cycle; ++u)
                        ddpg_update(*master, master_buffer, cfg.hyper, rng, master_base);
            }
            int successes = 0;
            for (int e = 0; e < cfg.eval_episodes; ++e) {
                auto [obs, desired] = env_reset(env, rng);
                EpisodeResult er = run_hierarchy_episode(
                    master ? &*master : nullptr, sub, env, obs, desired, cfg.f_m, cfg.f_s, hac,
                    cfg.hyper, cfg.her, /*explore=*/false, rng, nullptr, nullptr);
                successes += er.env_success ? 1 : 0;
            }
            res.success_rates.push_back(static_cast<double>(successes) / cfg.eval_episodes);
            res.env_steps.push_back(steps);
            if (!sub.all_params_finite() || (master && !master->all_params_finite()))
                throw std::runtime_error("non-finite parameters");
        }
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "trial %d aborted: %s\n", trial_index, e.what());
        res.aborted = true;
    }
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

// Runs all trials (optionally on a small thread pool; trials are fully
// independent) and aggregates completed curves. The aggregate does not depend
// on the number of workers.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1) {
    cfg.validate();
    ExperimentResult out;
    out.trials.resize(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.trials) break;
            out.trials[static_cast<std::size_t>(i)] = run_trial(cfg, i);
        }
    };
    const int n_workers = std::max(1, std::min(jobs, cfg.trials));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<std::vector<double>> curves;
    for (const auto& t : out.trials) {
        if (t.aborted) {
            ++out.aborted_count;
            continue;
        }
        curves.push_back(t.success_rates);
        if (out.env_steps.empty()) out.env_steps = t.env_steps;
    }
    if (curves.empty()) throw std::runtime_error("run_experiment: every trial aborted");
    out.aggregate = aggregate_curves(curves);
    return out;
}

struct ScanPoint {
    double value = 0.0;
    std::optional<double> snr = {};  // filled for noise scans
    ExperimentResult result;
};

inline std::vector<ScanPoint> run_scan(const ScanConfig& scan, int jobs = 1) {
    scan.validate();
    std::vector<ScanPoint> out;
    for (const double v : scan.points()) {
        ExperimentConfig cfg = scan.base;
        TransformSpec t = scan.kind == ScanKind::RotationAngle
                              ? TransformSpec::rotation(scan.plane, v, scan.rotation_center)
                              : TransformSpec::noise(v);
        cfg.f_m = t;
        cfg.f_s = t;
        ScanPoint point;
        point.value = v;
        if (scan.kind == ScanKind::NoiseSigma && v > 0.0) {
            RngStream grng(0x9a1ceULL);
            std::vector<Vec> samples;
            samples.reserve(10000);
            for (int i = 0; i < 10000; ++i)
                samples.push_back({grng.u01(), grng.u01(), grng.u01()});
            point.snr = snr_db(v, samples);
        }
        point.result = run_experiment(cfg, jobs);
        out.push_back(std::move(point));
    }
    return out;
}

namespace detail {

// Shortest representation that parses back to the identical double.
inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("emit_csv: cannot write " + p.string());
    return out;
}

}  // namespace detail

// Writes raw.csv (per trial per epoch), aggregate.csv (median + quartiles)
// and samples.csv (cumulative env steps) into `dir`. Rows are ordered by
// trial then epoch; aborted trials are excluded.
inline void emit_csv(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_out(dir / "raw.csv");
        out << "trial,seed,epoch,success_rate\n";
        for (const auto& t : result.trials) {
            if (t.aborted) continue;
            for (std::size_t e = 0; e < t.success_rates.size(); ++e)
                out << t.trial_index << "," << t.seed << "," << e << ","
                    << detail::fmt(t.success_rates[e]) << "\n";
        }
    }
    {
        auto out = detail::open_out(dir / "aggregate.csv");
        out << "epoch,median,q25,q75\n";
        for (std::size_t e = 0; e < result.aggregate.epochs(); ++e)
            out << e << "," << detail::fmt(result.aggregate.median[e]) << ","
                << detail::fmt(result.aggregate.q25[e]) << ","
                << detail::fmt(result.aggregate.q75[e]) << "\n";
    }
    {
        auto out = detail::open_out(dir / "samples.csv");
        out << "epoch,env_steps\n";
        for (std::size_t e = 0; e < result.env_steps.size(); ++e)
            out << e << "," << result.env_steps[e] << "\n";
    }
}

}  // namespace hrl
