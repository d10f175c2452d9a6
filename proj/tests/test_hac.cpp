#include <catch2/catch_amalgamated.hpp>

#include "hrl/hac.hpp"
#include "test_helpers.hpp"

using namespace hrl;

namespace {
constexpr double kPi = 3.14159265358979323846;

EnvObservation obs_at(const Vec& gripper) {
    EnvObservation o;
    o.gripper = gripper;
    return o;
}
}  // namespace

TEST_CASE("wire_goals with identity transforms is a passthrough") {
    const EnvConfig env;
    RngStream rng(1);
    const EnvObservation obs = obs_at({0.2, 0.3, 0.4});
    const Vec desired = {0.8, 0.8, 0.8};
    const WiredGoals w = wire_goals(env, obs, desired, TransformSpec::identity(),
                                    TransformSpec::identity(), rng);
    CHECK(w.achieved_m == obs.gripper);
    CHECK(w.achieved_s == obs.gripper);
    CHECK(w.desired_m == desired);
}

TEST_CASE("extra factor only in the sub space leaves master goals 3-d") {
    const EnvConfig env;
    RngStream rng(2);
    const WiredGoals w =
        wire_goals(env, obs_at({0.2, 0.3, 0.4}), {0.8, 0.8, 0.8},
                   TransformSpec::identity(), TransformSpec::extra_factors(1, 0.0), rng);
    CHECK(w.achieved_s.size() == 4);
    CHECK(w.achieved_s[3] == 0.0);
    CHECK(w.achieved_m.size() == 3);
    CHECK(w.desired_m.size() == 3);
}

TEST_CASE("rotated master goals keep the achieved-desired distance") {
    const EnvConfig env;
    RngStream rng(3);
    const EnvObservation obs = obs_at({0.2, 0.3, 0.4});
    const Vec desired = {0.8, 0.7, 0.6};
    const auto rot = TransformSpec::rotation(RotationPlane::XY, kPi / 4, 0.5);
    const WiredGoals w = wire_goals(env, obs, desired, rot, TransformSpec::identity(), rng);
    CHECK(distance(w.achieved_m, w.desired_m) ==
          Catch::Approx(distance(obs.gripper, desired)).margin(1e-12));
}

TEST_CASE("zero master output proposes the current achieved subgoal") {
    RngStream rng(4);
    DdpgHyper hyper;
    hyper.hidden_sizes = {8};
    DdpgAgent master = make_ddpg_agent(3, 3, 3, {0.1, 0.1, 0.1}, hyper, rng);
    for (auto& m : master.actor.w) m.zero();
    for (auto& b : master.actor.b) std::fill(b.begin(), b.end(), 0.0);
    const Vec achieved_s = {0.3, 0.4, 0.5};
    const Vec subgoal =
        propose_subgoal(master, {0.3, 0.4, 0.5}, {0.9, 0.9, 0.9}, achieved_s, hyper, false, rng);
    CHECK(subgoal == achieved_s);
}

TEST_CASE("proposed subgoals stay within the per-factor offset bound") {
    RngStream rng(5);
    DdpgHyper hyper;
    hyper.hidden_sizes = {8};
    hyper.exploration_sigma = 3.0;
    DdpgAgent master = make_ddpg_agent(3, 3, 3, {0.1, 0.1, 0.1}, hyper, rng);
    for (int i = 0; i < 500; ++i) {
        const Vec achieved_s = {rng.u01(), rng.u01(), rng.u01()};
        const Vec subgoal = propose_subgoal(master, {rng.u01(), rng.u01(), rng.u01()},
                                            {rng.u01(), rng.u01(), rng.u01()}, achieved_s, hyper,
                                            true, rng);
        for (int d = 0; d < 3; ++d)
            CHECK(std::abs(subgoal[d] - achieved_s[d]) <= 0.1 + 1e-12);
    }
}

TEST_CASE("sub episode on an already-satisfied subgoal ends after one step") {
    RngStream rng(6);
    const EnvConfig env;
    DdpgHyper hyper;
    hyper.hidden_sizes = {8};
    DdpgAgent sub = make_ddpg_agent(3, 3, 3, {0.05, 0.05, 0.05}, hyper, rng);
    const EnvObservation obs = obs_at({0.5, 0.5, 0.5});
    const SubEpisodeResult res =
        run_sub_episode(sub, env, obs, /*subgoal=*/{0.5, 0.5, 0.5}, TransformSpec::identity(),
                        10, false, true, hyper, {0.9, 0.9, 0.9}, rng);
    CHECK(res.steps_used == 1);
    CHECK(res.achieved_subgoal);
}

TEST_CASE("sub episode never exceeds its step budget") {
    RngStream rng(7);
    const EnvConfig env;
    DdpgHyper hyper;
    hyper.hidden_sizes = {8};
    DdpgAgent sub = make_ddpg_agent(3, 3, 3, {0.05, 0.05, 0.05}, hyper, rng);
    for (int i = 0; i < 50; ++i) {
        const EnvObservation obs = obs_at({rng.u01(), rng.u01(), rng.u01()});
        const Vec subgoal = {rng.u01(), rng.u01(), rng.u01()};
        const int budget = 1 + static_cast<int>(rng.index(10));
        const SubEpisodeResult res =
            run_sub_episode(sub, env, obs, subgoal, TransformSpec::identity(), budget, true,
                            true, hyper, {0.9, 0.9, 0.9}, rng);
        CHECK(res.steps_used >= 1);
        CHECK(res.steps_used <= budget);
        CHECK(res.transitions.size() == static_cast<std::size_t>(res.steps_used));
    }
}

TEST_CASE("oracle-grade sub-policy reaches any subgoal within range") {
    RngStream rng(8);
    const EnvConfig env;
    DdpgHyper hyper;
    DdpgAgent sub = testing::saturating_controller(3, env.a_max, 60.0);
    const int H = 10;
    for (int i = 0; i < 200; ++i) {
        const Vec start = {rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
        Vec subgoal(3);
        // within H * a_max of the gripper in every axis
        for (int d = 0; d < 3; ++d)
            subgoal[d] = clip_scalar(start[d] + rng.uniform(-H * env.a_max, H * env.a_max),
                                     0.0, 1.0);
        const SubEpisodeResult res =
            run_sub_episode(sub, env, obs_at(start), subgoal, TransformSpec::identity(), H,
                            false, true, hyper, {0.9, 0.9, 0.9}, rng);
        CHECK(res.achieved_subgoal);
    }
}

TEST_CASE("hindsight action stores the actually achieved subgoal") {
    MasterTransition mt;
    mt.obs = {0.1, 0.1, 0.1};
    mt.action = {0.2, 0.2, 0.2};
    mt.achieved_goal = {0.1, 0.1, 0.1};
    mt.next_achieved_goal = {0.15, 0.15, 0.15};
    mt.desired_goal = {0.9, 0.9, 0.9};
    mt.reward = -1.0;

    SECTION("achieved equals the proposal") {
        const MasterTransition h = hindsight_action(mt, {0.2, 0.2, 0.2});
        CHECK(h.action == mt.action);
        CHECK(h.is_hindsight_action);
    }
    SECTION("achieved differs from the proposal") {
        const MasterTransition h = hindsight_action(mt, {0.15, 0.15, 0.15});
        CHECK(h.action == Vec{0.15, 0.15, 0.15});
        CHECK_FALSE(mt.is_hindsight_action);
    }
}

TEST_CASE("subgoal testing penalizes only failures") {
    HacConfig cfg;
    cfg.subgoal_penalty = -10.0;
    MasterTransition mt;
    mt.reward = -1.0;
    mt.done = false;
    const MasterTransition ok = subgoal_test_step(mt, true, cfg);
    CHECK(ok.reward == -1.0);
    CHECK_FALSE(ok.done);
    CHECK(ok.is_subgoal_test);
    const MasterTransition fail = subgoal_test_step(mt, false, cfg);
    CHECK(fail.reward == -10.0);
    CHECK(fail.done);
}

namespace {

struct EpisodeCounters {
    int master_steps = 0;
    int tested = 0;
    int env_steps = 0;
};

EpisodeCounters run_untrained_episodes(int episodes, std::uint64_t seed, double test_rate) {
    EnvConfig env;
    DdpgHyper hyper;
    hyper.hidden_sizes = {8, 8};
    HacConfig hac;
    hac.subgoal_test_rate = test_rate;
    RngStream rng(seed);
    DdpgAgent sub = make_ddpg_agent(3, 3, 3, {0.05, 0.05, 0.05}, hyper, rng);
    DdpgAgent master = make_ddpg_agent(3, 3, 3, {0.1, 0.1, 0.1}, hyper, rng);
    HerStrategy her;
    EpisodeCounters counters;
    for (int e = 0; e < episodes; ++e) {
        auto [obs, desired] = env_reset(env, rng);
        const EpisodeResult res = run_hierarchy_episode(
            &master, sub, env, obs, desired, TransformSpec::identity(),
            TransformSpec::identity(), hac, hyper, her, true, rng, nullptr, nullptr);
        counters.master_steps += static_cast<int>(res.master_transitions.size());
        counters.env_steps += res.env_steps;
        for (const auto& mt : res.master_transitions)
            if (mt.is_subgoal_test) ++counters.tested;
    }
    return counters;
}

}  // namespace

TEST_CASE("hierarchy episodes consume exactly the episode length") {
    const EpisodeCounters counters = run_untrained_episodes(20, 99, 0.3);
    CHECK(counters.env_steps == 20 * 50);
}

TEST_CASE("subgoal tests happen at about the configured rate") {
    const EpisodeCounters counters = run_untrained_episodes(600, 7, 0.3);
    REQUIRE(counters.master_steps > 5000);
    const double fraction = static_cast<double>(counters.tested) / counters.master_steps;
    CHECK(std::abs(fraction - 0.3) < 0.02);
}

TEST_CASE("episode transitions have dimensionally sound goals") {
    EnvConfig env;
    DdpgHyper hyper;
    hyper.hidden_sizes = {8};
    HacConfig hac;
    RngStream rng(13);
    const auto f_m = TransformSpec::identity();
    const auto f_s = TransformSpec::extra_factors(1, 0.0);
    DdpgAgent sub = make_ddpg_agent(3, 4, 3, {0.05, 0.05, 0.05}, hyper, rng);
    DdpgAgent master = make_ddpg_agent(3, 3, 4, Vec(4, 0.1), hyper, rng);
    ReplayBuffer<Transition> sub_buf(10000);
    ReplayBuffer<MasterTransition> master_buf(10000);
    HerStrategy her;
    auto [obs, desired] = env_reset(env, rng);
    const EpisodeResult res =
        run_hierarchy_episode(&master, sub, env, obs, desired, f_m, f_s, hac, hyper, her, true,
                              rng, &master_buf, &sub_buf);
    for (const auto& t : res.sub_transitions) {
        CHECK(t.desired_goal.size() == 4);
        CHECK(t.achieved_goal.size() == 4);
    }
    for (const auto& mt : res.master_transitions) {
        CHECK(mt.action.size() == 4);
        CHECK(mt.desired_goal.size() == 3);
        CHECK(mt.achieved_goal.size() == 3);
    }
    // no cross-space leakage after relabeling either
    for (std::size_t i = 0; i < master_buf.size(); ++i) {
        CHECK(master_buf.at(i).desired_goal.size() == 3);
        CHECK(master_buf.at(i).action.size() == 4);
    }
    for (std::size_t i = 0; i < sub_buf.size(); ++i)
        CHECK(sub_buf.at(i).desired_goal.size() == 4);
}

TEST_CASE("hindsight master actions replay to zero-distance success") {
    EnvConfig env;
    DdpgHyper hyper;
    hyper.hidden_sizes = {8};
    HacConfig hac;
    RngStream rng(17);
    DdpgAgent sub = make_ddpg_agent(3, 3, 3, {0.05, 0.05, 0.05}, hyper, rng);
    DdpgAgent master = make_ddpg_agent(3, 3, 3, {0.1, 0.1, 0.1}, hyper, rng);
    HerStrategy her;
    auto [obs, desired] = env_reset(env, rng);
    const EpisodeResult res = run_hierarchy_episode(
        &master, sub, env, obs, desired, TransformSpec::identity(), TransformSpec::identity(),
        hac, hyper, her, true, rng, nullptr, nullptr);
    RngStream dummy(0);
    REQUIRE_FALSE(res.master_hindsight.empty());
    for (const auto& h : res.master_hindsight) {
        // stored action equals f_s(g(end state)); for deterministic f_s this
        // is exactly the next observation's goal factors
        const Vec end_goal = {h.next_obs[0], h.next_obs[1], h.next_obs[2]};
        CHECK(distance(h.action, end_goal) == 0.0);
        CHECK(h.is_hindsight_action);
    }
}

TEST_CASE("one-level episodes bypass the master entirely") {
    EnvConfig env;
    DdpgHyper hyper;
    hyper.hidden_sizes = {8};
    HacConfig hac;
    hac.levels = 1;
    RngStream rng(19);
    DdpgAgent sub = make_ddpg_agent(3, 3, 3, {0.05, 0.05, 0.05}, hyper, rng);
    HerStrategy her;
    auto [obs, desired] = env_reset(env, rng);
    const EpisodeResult res = run_hierarchy_episode(
        nullptr, sub, env, obs, desired, TransformSpec::identity(), TransformSpec::identity(),
        hac, hyper, her, true, rng, nullptr, nullptr);
    CHECK(res.master_transitions.empty());
    CHECK(res.env_steps == env.episode_length);
    CHECK(res.sub_transitions.size() == static_cast<std::size_t>(env.episode_length));
    for (const auto& t : res.sub_transitions) CHECK(t.desired_goal == desired);
}

TEST_CASE("scripted master and sub solve the environment end to end") {
    EnvConfig env;
    DdpgHyper hyper;
    HacConfig hac;
    RngStream rng(23);
    DdpgAgent sub = testing::saturating_controller(3, env.a_max, 60.0);
    DdpgAgent master = testing::saturating_controller(3, hac.master_offset_bound, 60.0);
    HerStrategy her;
    int successes = 0;
    const int episodes = 100;
    for (int e = 0; e < episodes; ++e) {
        auto [obs, desired] = env_reset(env, rng);
        const EpisodeResult res = run_hierarchy_episode(
            &master, sub, env, obs, desired, TransformSpec::identity(),
            TransformSpec::identity(), hac, hyper, her, false, rng, nullptr, nullptr);
        successes += res.env_success ? 1 : 0;
    }
    CHECK(successes == episodes);
}

TEST_CASE("rotating both master wiring inputs preserves every success boolean") {
    EnvConfig env;
    DdpgHyper hyper;
    HacConfig hac;
    HerStrategy her;
    const auto rot = TransformSpec::rotation(RotationPlane::XZ, 0.6, 0.5);
    RngStream rng(31);
    RngStream rot_rng(0);  // rotation is deterministic, stream is unused
    DdpgAgent sub = testing::saturating_controller(3, env.a_max, 60.0);
    DdpgAgent master = testing::saturating_controller(3, hac.master_offset_bound, 60.0);
    int checked = 0;
    for (int e = 0; e < 10; ++e) {
        auto [obs, desired] = env_reset(env, rng);
        const EpisodeResult res = run_hierarchy_episode(
            &master, sub, env, obs, desired, TransformSpec::identity(),
            TransformSpec::identity(), hac, hyper, her, true, rng, nullptr, nullptr);
        for (const auto& mt : res.master_transitions) {
            const bool plain =
                success(mt.next_achieved_goal, mt.desired_goal, env.success_threshold);
            const bool rotated = success(apply_transform(rot, mt.next_achieved_goal, rot_rng),
                                         apply_transform(rot, mt.desired_goal, rot_rng),
                                         env.success_threshold);
            CHECK(plain == rotated);
            ++checked;
        }
    }
    CHECK(checked > 50);
}
