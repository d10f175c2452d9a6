#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "hrl/rng.hpp"
#include "hrl/vec.hpp"

namespace hrl {

enum class Task { Reach, PickPlace };

struct EnvConfig {
    Task task = Task::Reach;
    int episode_length = 50;
    double success_threshold = 0.1;
    double a_max = 0.05;
    double grasp_radius = 0.05;

    int obs_dim() const { return task == Task::Reach ? 3 : 7; }
    int action_dim() const { return task == Task::Reach ? 3 : 4; }

    void validate() const {
        require(episode_length >= 1, "EnvConfig: episode_length must be >= 1");
        require(success_threshold > 0.0, "EnvConfig: success_threshold must be > 0");
        require(a_max > 0.0, "EnvConfig: a_max must be > 0");
        require(grasp_radius > 0.0, "EnvConfig: grasp_radius must be > 0");
    }
};

// Kinematic desk-scale state. The pick-and-place fields are unused (zero)
// for the reach task.
struct EnvObservation {
    Vec gripper = {0.0, 0.0, 0.0};
    double grip_closed = 0.0;
    Vec object = {0.0, 0.0, 0.0};

    Vec flat(const EnvConfig& config) const {
        if (config.task == Task::Reach) return gripper;
        Vec out = gripper;
        out.push_back(grip_closed);
        out.insert(out.end(), object.begin(), object.end());
        return out;
    }
};

struct EnvAction {
    Vec delta = {0.0, 0.0, 0.0};
    double grip_command = 0.0;  // pick-place only, in [-1, 1]

    Vec flat(const EnvConfig& config) const {
        if (config.task == Task::Reach) return delta;
        Vec out = delta;
        out.push_back(grip_command);
        return out;
    }

    static EnvAction from_flat(const EnvConfig& config, const Vec& a) {
        require(static_cast<int>(a.size()) == config.action_dim(),
                "EnvAction: flat action dimension mismatch");
        EnvAction act;
        act.delta = {a[0], a[1], a[2]};
        if (config.task == Task::PickPlace) act.grip_command = a[3];
        return act;
    }
};

inline bool success(const Vec& achieved, const Vec& desired, double threshold) {
    return distance(achieved, desired) < threshold;
}

// Ground-truth goal factors: gripper position for reach, object position
// for pick-and-place.
inline Vec ground_truth_goal(const EnvConfig& config, const EnvObservation& obs) {
    return config.task == Task::Reach ? obs.gripper : obs.object;
}

namespace detail {
inline Vec uniform_point(RngStream& rng) {
    return {rng.u01(), rng.u01(), rng.u01()};
}
}  // namespace detail

// Positions and the desired goal are uniform over the unit cube; resampled
// until the episode does not start already solved.
inline std::pair<EnvObservation, Vec> env_reset(const EnvConfig& config, RngStream& rng) {
    config.validate();
    EnvObservation obs;
    obs.gripper = detail::uniform_point(rng);
    obs.grip_closed = 0.0;
    if (config.task == Task::PickPlace) obs.object = detail::uniform_point(rng);
    Vec desired = detail::uniform_point(rng);
    while (distance(ground_truth_goal(config, obs), desired) <= config.success_threshold)
        desired = detail::uniform_point(rng);
    return {obs, desired};
}

// Pure kinematic step: gripper moves by the clipped delta and is clipped to
// the unit cube. The object moves rigidly with the gripper iff the grip is
// commanded closed and the object is within grasp radius before the move.
inline EnvObservation env_step(const EnvConfig& config, const EnvObservation& state,
                               const EnvAction& action) {
    EnvObservation next = state;
    Vec disp(3);
    for (int i = 0; i < 3; ++i) {
        const double d = clip_scalar(action.delta[i], -config.a_max, config.a_max);
        const double moved = clip_scalar(state.gripper[i] + d, 0.0, 1.0);
        disp[i] = moved - state.gripper[i];
        next.gripper[i] = moved;
    }
    if (config.task == Task::PickPlace) {
        const double grip = clip_scalar(action.grip_command, -1.0, 1.0);
        next.grip_closed = 0.5 * (grip + 1.0);
        const bool attached =
            grip > 0.0 && distance(state.gripper, state.object) < config.grasp_radius;
        if (attached) {
            for (int i = 0; i < 3; ++i)
                next.object[i] = clip_scalar(state.object[i] + disp[i], 0.0, 1.0);
        }
    }
    return next;
}

// Hand-written solver used to bound task difficulty independently of any
// learning. Reach: move straight at the goal. Pick-place: approach the
// object, grab, carry to the goal.
inline EnvAction scripted_oracle_policy(const EnvConfig& config, const EnvObservation& obs,
                                        const Vec& desired_goal) {
    EnvAction act;
    auto step_toward = [&](const Vec& from, const Vec& to) {
        Vec d(3);
        for (int i = 0; i < 3; ++i) d[i] = clip_scalar(to[i] - from[i], -config.a_max, config.a_max);
        return d;
    };
    if (config.task == Task::Reach) {
        act.delta = step_toward(obs.gripper, desired_goal);
        return act;
    }
    const bool holding = obs.grip_closed > 0.5 &&
                         distance(obs.gripper, obs.object) < config.grasp_radius;
    if (holding || distance(obs.gripper, obs.object) < 0.8 * config.grasp_radius) {
        // The object displaces exactly with the gripper, so aim the object
        // itself at the goal; the grab happens on the same step.
        act.delta = step_toward(obs.object, desired_goal);
        act.grip_command = 1.0;
    } else {
        act.delta = step_toward(obs.gripper, obs.object);
        act.grip_command = -1.0;
    }
    return act;
}

}  // namespace hrl
