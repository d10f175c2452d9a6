#pragma once

#include <algorithm>
#include <vector>

#include "hrl/ddpg.hpp"
#include "hrl/env.hpp"
#include "hrl/goalspace.hpp"
#include "hrl/replay.hpp"

namespace hrl {

struct HacConfig {
    int horizon = 10;                 // max sub-policy steps per master action
    double subgoal_test_rate = 0.3;
    double subgoal_penalty = -10.0;
    double master_offset_bound = 0.1; // per-factor subgoal offset limit
    int levels = 2;

    void validate() const {
        require(horizon >= 1, "HacConfig: horizon must be >= 1");
        require(subgoal_test_rate >= 0.0 && subgoal_test_rate <= 1.0,
                "HacConfig: subgoal_test_rate out of [0,1]");
        require(subgoal_penalty < 0.0, "HacConfig: subgoal_penalty must be < 0");
        require(master_offset_bound > 0.0, "HacConfig: master_offset_bound must be > 0");
        require(levels == 1 || levels == 2, "HacConfig: levels must be 1 or 2");
    }
};

struct MasterTransition : Transition {
    bool is_subgoal_test = false;
    bool is_hindsight_action = false;
};

struct WiredGoals {
    Vec achieved_m;
    Vec desired_m;
    Vec achieved_s;
};

// The two goal-space hooks: both levels see the ground-truth factors only
// through their respective modification functions.
inline WiredGoals wire_goals(const EnvConfig& config, const EnvObservation& obs,
                             const Vec& desired_goal_env, const TransformSpec& f_m,
                             const TransformSpec& f_s, RngStream& rng) {
    const Vec g = ground_truth_goal(config, obs);
    WiredGoals wired;
    wired.achieved_m = apply_transform(f_m, g, rng);
    wired.desired_m = apply_transform(f_m, desired_goal_env, rng);
    wired.achieved_s = apply_transform(f_s, g, rng);
    return wired;
}

// Subgoal = currently achieved sub-level goal plus a bounded offset from the
// master actor (exploration noise included when exploring).
inline Vec propose_subgoal(DdpgAgent& master, const Vec& obs_flat, const Vec& desired_m,
                           const Vec& achieved_s, const DdpgHyper& hyper, bool explore,
                           RngStream& rng) {
    Vec offset = select_action(master, obs_flat, desired_m, explore, hyper, rng);
    Vec subgoal = achieved_s;
    for (std::size_t i = 0; i < subgoal.size(); ++i) subgoal[i] += offset[i];
    return subgoal;
}

struct SubEpisodeResult {
    std::vector<Transition> transitions;
    Vec achieved_final;       // f_s-achieved goal at the last reached state
    bool achieved_subgoal = false;
    int steps_used = 0;
    EnvObservation end_obs;
    bool env_success_seen = false;  // true env goal reached at any step
};

// Runs the sub-policy against one subgoal for at most max_steps env steps.
// Always takes at least one step so the env-step budget advances; with
// stop_on_success the loop ends as soon as the subgoal is reached in F_s.
inline SubEpisodeResult run_sub_episode(DdpgAgent& sub, const EnvConfig& config,
                                        const EnvObservation& start_obs, const Vec& subgoal,
                                        const TransformSpec& f_s, int max_steps, bool explore,
                                        bool stop_on_success, const DdpgHyper& hyper,
                                        const Vec& desired_goal_env, RngStream& rng) {
    require(max_steps >= 1, "run_sub_episode: max_steps must be >= 1");
    SubEpisodeResult res;
    EnvObservation obs = start_obs;
    Vec achieved = apply_transform(f_s, ground_truth_goal(config, obs), rng);
    for (int step = 0; step < max_steps; ++step) {
        const Vec obs_flat = obs.flat(config);
        const Vec a = select_action(sub, obs_flat, subgoal, explore, hyper, rng);
        const EnvObservation next_obs = env_step(config, obs, EnvAction::from_flat(config, a));
        const Vec next_achieved =
            apply_transform(f_s, ground_truth_goal(config, next_obs), rng);

        Transition t;
        t.obs = obs_flat;
        t.action = a;
        t.next_obs = next_obs.flat(config);
        t.achieved_goal = achieved;
        t.next_achieved_goal = next_achieved;
        t.desired_goal = subgoal;
        t.reward = sparse_reward(next_achieved, subgoal, config.success_threshold);
        t.done = t.reward == 0.0;
        res.transitions.push_back(std::move(t));

        res.env_success_seen =
            res.env_success_seen ||
            success(ground_truth_goal(config, next_obs), desired_goal_env,
                    config.success_threshold);
        obs = next_obs;
        achieved = next_achieved;
        res.steps_used = step + 1;
        if (res.transitions.back().done) {
            res.achieved_subgoal = true;
            if (stop_on_success) break;
        }
    }
    if (!res.transitions.empty())
        res.achieved_subgoal = res.transitions.back().done || res.achieved_subgoal;
    res.end_obs = obs;
    res.achieved_final = achieved;
    return res;
}

// Replay copy whose action is the subgoal the sub-policy actually reached.
inline MasterTransition hindsight_action(const MasterTransition& mt, const Vec& achieved_final) {
    MasterTransition out = mt;
    out.action = achieved_final;
    out.is_hindsight_action = true;
    return out;
}

// Penalize tested subgoals the sub-policy could not reach.
inline MasterTransition subgoal_test_step(const MasterTransition& mt, bool achieved_subgoal,
                                          const HacConfig& config) {
    MasterTransition out = mt;
    out.is_subgoal_test = true;
    if (!achieved_subgoal) {
        out.reward = config.subgoal_penalty;
        out.done = true;
    }
    return out;
}

struct EpisodeResult {
    std::vector<MasterTransition> master_transitions;  // proposed actions, test-handled
    std::vector<MasterTransition> master_hindsight;    // hindsight-action copies
    std::vector<Transition> sub_transitions;           // raw, before relabeling
    bool env_success = false;
    int env_steps = 0;
};

// One full environment episode under the hierarchy. With levels = 1 the
// master is bypassed and the sub-policy is goal-conditioned on
// f_s(desired_goal_env) for the whole episode. When buffers are supplied,
// hindsight-relabeled experience is inserted (sub-episodes relabel within
// themselves; the master level relabels its hindsight-action sequence).
inline EpisodeResult run_hierarchy_episode(DdpgAgent* master, DdpgAgent& sub,
                                           const EnvConfig& config, const EnvObservation& obs0,
                                           const Vec& desired_goal_env, const TransformSpec& f_m,
                                           const TransformSpec& f_s, const HacConfig& hac,
                                           const DdpgHyper& hyper, const HerStrategy& her,
                                           bool explore, RngStream& rng,
                                           ReplayBuffer<MasterTransition>* master_buffer,
                                           ReplayBuffer<Transition>* sub_buffer) {
    hac.validate();
    EpisodeResult res;

    if (hac.levels == 1) {
        const Vec desired_s = apply_transform(f_s, desired_goal_env, rng);
        SubEpisodeResult se =
            run_sub_episode(sub, config, obs0, desired_s, f_s, config.episode_length, explore,
                            /*stop_on_success=*/false, hyper, desired_goal_env, rng);
        res.env_success = se.env_success_seen;
        res.env_steps = se.steps_used;
        if (sub_buffer != nullptr)
            for (auto& t : her_relabel(se.transitions, her, config.success_threshold, rng))
                sub_buffer->push(std::move(t));
        res.sub_transitions = std::move(se.transitions);
        return res;
    }

    require(master != nullptr, "run_hierarchy_episode: two levels need a master agent");
    const WiredGoals wired0 = wire_goals(config, obs0, desired_goal_env, f_m, f_s, rng);
    const Vec desired_m = wired0.desired_m;  // transformed once, held for the episode

    EnvObservation obs = obs0;
    int remaining = config.episode_length;
    while (remaining > 0) {
        const Vec g = ground_truth_goal(config, obs);
        const Vec achieved_m = apply_transform(f_m, g, rng);
        const Vec achieved_s = apply_transform(f_s, g, rng);
        const Vec obs_flat = obs.flat(config);

        const bool is_test = explore && rng.chance(hac.subgoal_test_rate);
        const bool act_explore = explore && !is_test;
        const Vec subgoal =
            propose_subgoal(*master, obs_flat, desired_m, achieved_s, hyper, act_explore, rng);

        SubEpisodeResult se = run_sub_episode(sub, config, obs, subgoal, f_s,
                                              std::min(hac.horizon, remaining), act_explore,
                                              /*stop_on_success=*/true, hyper,
                                              desired_goal_env, rng);
        remaining -= se.steps_used;
        res.env_steps += se.steps_used;
        res.env_success = res.env_success || se.env_success_seen;

        const Vec next_achieved_m =
            apply_transform(f_m, ground_truth_goal(config, se.end_obs), rng);
        MasterTransition mt;
        mt.obs = obs_flat;
        mt.action = subgoal;
        mt.next_obs = se.end_obs.flat(config);
        mt.achieved_goal = achieved_m;
        mt.next_achieved_goal = next_achieved_m;
        mt.desired_goal = desired_m;
        mt.reward = sparse_reward(next_achieved_m, desired_m, config.success_threshold);
        mt.done = mt.reward == 0.0;

        res.master_hindsight.push_back(hindsight_action(mt, se.achieved_final));
        if (is_test) mt = subgoal_test_step(mt, se.achieved_subgoal, hac);
        res.master_transitions.push_back(std::move(mt));

        if (sub_buffer != nullptr)
            for (auto& t : her_relabel(se.transitions, her, config.success_threshold, rng))
                sub_buffer->push(std::move(t));
        res.sub_transitions.insert(res.sub_transitions.end(),
                                   std::make_move_iterator(se.transitions.begin()),
                                   std::make_move_iterator(se.transitions.end()));
        obs = se.end_obs;
    }

    if (master_buffer != nullptr) {
        // Replay follows the usual HAC recipe: hindsight-action transitions
        // (always achievable) carry the goal-relabeled learning signal, and
        // tested proposals enter as-is so penalties are preserved.
        for (auto& t : her_relabel(res.master_hindsight, her, config.success_threshold, rng))
            master_buffer->push(std::move(t));
        for (const auto& t : res.master_transitions)
            if (t.is_subgoal_test) master_buffer->push(t);
    }
    return res;
}

}  // namespace hrl
