#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "hrl/experiment.hpp"
#include "test_helpers.hpp"

using namespace hrl;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.trials = 2;
    cfg.epochs = 2;
    cfg.episodes_per_epoch = 2;
    cfg.eval_episodes = 4;
    cfg.base_seed = 100;
    cfg.hyper.batch_size = 32;
    cfg.hyper.updates_per_cycle = 2;
    cfg.hyper.hidden_sizes = {8, 8};
    return cfg;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("run_trial is deterministic in (config, trial_index)") {
    const ExperimentConfig cfg = tiny_config();
    const TrialResult a = run_trial(cfg, 1);
    const TrialResult b = run_trial(cfg, 1);
    CHECK(a.success_rates == b.success_rates);
    CHECK(a.env_steps == b.env_steps);
    CHECK(a.seed == 101);
    CHECK_FALSE(a.aborted);
    REQUIRE(a.success_rates.size() == 2);
}

TEST_CASE("trials are isolated by seed") {
    const ExperimentConfig cfg = tiny_config();
    const ExperimentResult full = run_experiment(cfg, 1);
    // rerunning one trial standalone reproduces exactly the same curve
    const TrialResult trial1 = run_trial(cfg, 1);
    CHECK(full.trials[1].success_rates == trial1.success_rates);

    // changing the base seed changes results; trial i depends only on its seed
    ExperimentConfig shifted = cfg;
    shifted.base_seed = cfg.base_seed + 1;
    const TrialResult shifted0 = run_trial(shifted, 0);
    CHECK(shifted0.success_rates == trial1.success_rates);
}

TEST_CASE("hac trials run and stay finite") {
    ExperimentConfig cfg = tiny_config();
    cfg.algorithm = Algorithm::Hac;
    cfg.trials = 1;
    const TrialResult t = run_trial(cfg, 0);
    CHECK_FALSE(t.aborted);
    REQUIRE(t.success_rates.size() == 2);
    CHECK(t.env_steps.back() == 2 * 2 * 50);
}

TEST_CASE("aggregate does not depend on the worker count") {
    const ExperimentConfig cfg = tiny_config();
    const ExperimentResult a = run_experiment(cfg, 1);
    const ExperimentResult b = run_experiment(cfg, 3);
    CHECK(a.aggregate.median == b.aggregate.median);
    CHECK(a.aggregate.q25 == b.aggregate.q25);
    CHECK(a.aggregate.q75 == b.aggregate.q75);
}

TEST_CASE("single-trial aggregates collapse to the trial curve") {
    ExperimentConfig cfg = tiny_config();
    cfg.trials = 1;
    const ExperimentResult res = run_experiment(cfg, 1);
    CHECK(res.aggregate.median == res.trials[0].success_rates);
    CHECK(res.aggregate.q25 == res.trials[0].success_rates);
    CHECK(res.aggregate.q75 == res.trials[0].success_rates);
}

TEST_CASE("emitted csvs round-trip and keep quartile ordering") {
    const ExperimentConfig cfg = tiny_config();
    const ExperimentResult res = run_experiment(cfg, 2);
    const auto dir = std::filesystem::temp_directory_path() / "hrl_csv_test";
    std::filesystem::remove_all(dir);
    emit_csv(res, dir);

    const auto raw = read_csv(dir / "raw.csv");
    REQUIRE(raw.size() == 1 + 2 * 2);  // header + trials*epochs
    CHECK(raw[0] == std::vector<std::string>{"trial", "seed", "epoch", "success_rate"});
    for (std::size_t i = 1; i < raw.size(); ++i) {
        const int trial = std::stoi(raw[i][0]);
        const int epoch = std::stoi(raw[i][2]);
        const double rate = std::stod(raw[i][3]);
        CHECK(rate == res.trials[trial].success_rates[epoch]);
        CHECK(std::stoull(raw[i][1]) == res.trials[trial].seed);
    }

    const auto agg = read_csv(dir / "aggregate.csv");
    REQUIRE(agg.size() == 1 + 2);
    CHECK(agg[0] == std::vector<std::string>{"epoch", "median", "q25", "q75"});
    for (std::size_t i = 1; i < agg.size(); ++i) {
        const double median = std::stod(agg[i][1]);
        const double q25 = std::stod(agg[i][2]);
        const double q75 = std::stod(agg[i][3]);
        CHECK(q25 <= median);
        CHECK(median <= q75);
        CHECK(median == res.aggregate.median[i - 1]);
    }

    const auto samples = read_csv(dir / "samples.csv");
    REQUIRE(samples.size() == 1 + 2);
    CHECK(samples[0] == std::vector<std::string>{"epoch", "env_steps"});
    CHECK(std::stol(samples[1][1]) == 100);
    CHECK(std::stol(samples[2][1]) == 200);
}

TEST_CASE("noise scan includes snr and a zero-noise point reduces to baseline") {
    ScanConfig scan;
    scan.kind = ScanKind::NoiseSigma;
    scan.n_points = 2;
    scan.min_value = 0.0;
    scan.max_value = 0.01;
    scan.log_spacing = false;
    scan.base = tiny_config();
    scan.base.trials = 1;
    const auto points = run_scan(scan, 1);
    REQUIRE(points.size() == 2);
    CHECK_FALSE(points[0].snr.has_value());
    REQUIRE(points[1].snr.has_value());
    // uniform-cube goals: per-axis variance 1/12 -> std 0.2887
    CHECK(*points[1].snr == Catch::Approx(10.0 * std::log10((1.0 / 12.0) / 1e-4)).margin(0.2));

    // sigma = 0 equals the baseline experiment bitwise
    ExperimentConfig base = scan.base;
    base.f_m = TransformSpec::noise(0.0);
    base.f_s = TransformSpec::noise(0.0);
    const ExperimentResult direct = run_experiment(base, 1);
    CHECK(points[0].result.aggregate.median == direct.aggregate.median);
}

TEST_CASE("rotation scan with identical endpoints gives identical aggregates") {
    ScanConfig scan;
    scan.kind = ScanKind::RotationAngle;
    scan.n_points = 2;
    scan.min_value = 0.0;
    scan.max_value = 0.0;
    scan.base = tiny_config();
    scan.base.trials = 1;
    const auto points = run_scan(scan, 1);
    REQUIRE(points.size() == 2);
    CHECK(points[0].result.aggregate.median == points[1].result.aggregate.median);
}

TEST_CASE("an oracle-grade policy measures a perfect success rate") {
    EnvConfig env;
    DdpgHyper hyper;
    HacConfig hac;
    hac.levels = 1;
    HerStrategy her;
    DdpgAgent sub = testing::saturating_controller(3, env.a_max, 60.0);
    RngStream rng(9);
    int successes = 0;
    for (int e = 0; e < 100; ++e) {
        auto [obs, desired] = env_reset(env, rng);
        const EpisodeResult res = run_hierarchy_episode(
            nullptr, sub, env, obs, desired, TransformSpec::identity(),
            TransformSpec::identity(), hac, hyper, her, false, rng, nullptr, nullptr);
        successes += res.env_success ? 1 : 0;
    }
    CHECK(successes == 100);
}

TEST_CASE("untrained policies sit near the random-action baseline") {
    EnvConfig env;
    DdpgHyper hyper;
    hyper.hidden_sizes = {16, 16};
    HacConfig hac;
    hac.levels = 1;
    HerStrategy her;
    const int episodes = 400;

    // random-action baseline by monte carlo
    RngStream rng(55);
    hyper.epsilon_random = 1.0;
    DdpgAgent random_agent = make_ddpg_agent(3, 3, 3, {0.05, 0.05, 0.05}, hyper, rng);
    int random_successes = 0;
    for (int e = 0; e < episodes; ++e) {
        auto [obs, desired] = env_reset(env, rng);
        const EpisodeResult res = run_hierarchy_episode(
            nullptr, random_agent, env, obs, desired, TransformSpec::identity(),
            TransformSpec::identity(), hac, hyper, her, true, rng, nullptr, nullptr);
        random_successes += res.env_success ? 1 : 0;
    }

    // untrained deterministic policy
    DdpgAgent fresh = make_ddpg_agent(3, 3, 3, {0.05, 0.05, 0.05}, hyper, rng);
    int fresh_successes = 0;
    for (int e = 0; e < episodes; ++e) {
        auto [obs, desired] = env_reset(env, rng);
        const EpisodeResult res = run_hierarchy_episode(
            nullptr, fresh, env, obs, desired, TransformSpec::identity(),
            TransformSpec::identity(), hac, hyper, her, false, rng, nullptr, nullptr);
        fresh_successes += res.env_success ? 1 : 0;
    }

    const double random_rate = static_cast<double>(random_successes) / episodes;
    const double fresh_rate = static_cast<double>(fresh_successes) / episodes;
    INFO("random " << random_rate << " untrained " << fresh_rate);
    CHECK(std::abs(random_rate - fresh_rate) < 0.12);
}
