#pragma once

#include <cstdio>
#include <functional>
#include <vector>

#include "hrl/nn.hpp"
#include "hrl/replay.hpp"
#include "hrl/rng.hpp"
#include "hrl/vec.hpp"

namespace hrl {

struct DdpgHyper {
    double gamma = 0.98;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double tau = 0.05;
    int batch_size = 128;
    int buffer_capacity = 100000;
    int updates_per_cycle = 40;       // gradient steps after each training episode
    double exploration_sigma = 0.1;   // gaussian action noise, fraction of the bound
    double epsilon_random = 0.2;      // chance of a uniform random action
    std::vector<int> hidden_sizes = {64, 64};

    void validate() const {
        require(gamma >= 0.0 && gamma < 1.0, "DdpgHyper: gamma out of [0,1)");
        require(actor_lr > 0.0 && critic_lr > 0.0, "DdpgHyper: learning rates must be > 0");
        require(tau > 0.0 && tau <= 1.0, "DdpgHyper: tau out of (0,1]");
        require(batch_size >= 1, "DdpgHyper: batch_size must be >= 1");
        require(buffer_capacity >= batch_size, "DdpgHyper: buffer smaller than batch");
        require(updates_per_cycle >= 0, "DdpgHyper: updates_per_cycle must be >= 0");
        require(exploration_sigma >= 0.0, "DdpgHyper: exploration_sigma must be >= 0");
        require(epsilon_random >= 0.0 && epsilon_random <= 1.0,
                "DdpgHyper: epsilon_random out of [0,1]");
        require(!hidden_sizes.empty(), "DdpgHyper: need at least one hidden layer");
    }
};

// Goal-conditioned DDPG agent: bounded tanh actor, scalar critic, slow-moving
// target copies of both.
struct DdpgAgent {
    int obs_dim = 0;
    int goal_dim = 0;
    int action_dim = 0;
    Vec action_bound;  // per-dimension magnitude

    MlpSpec actor_spec;
    MlpSpec critic_spec;
    MlpParams actor, critic, actor_target, critic_target;
    AdamState actor_opt, critic_opt;

    // scratch, reused across updates; one agent is owned by one thread
    struct Scratch {
        Matrix sg_next, sga_next, sga, sg, sga_pi;
        Matrix dq, dsga, du;
        MlpWorkspace ws_actor, ws_critic, ws_actor_t, ws_critic_t, ws_critic_pi, ws_policy;
        MlpGrads actor_grads, critic_grads, discard_grads;
        std::vector<std::size_t> idx;
        bool ready = false;
    };
    Scratch scratch;

    bool all_params_finite() const {
        return actor.all_entries_finite() && critic.all_entries_finite() &&
               actor_target.all_entries_finite() && critic_target.all_entries_finite();
    }
};

inline DdpgAgent make_ddpg_agent(int obs_dim, int goal_dim, int action_dim, Vec action_bound,
                                 const DdpgHyper& hyper, RngStream& rng) {
    hyper.validate();
    require(static_cast<int>(action_bound.size()) == action_dim,
            "make_ddpg_agent: bound dimension mismatch");
    DdpgAgent a;
    a.obs_dim = obs_dim;
    a.goal_dim = goal_dim;
    a.action_dim = action_dim;
    a.action_bound = std::move(action_bound);

    a.actor_spec.layer_sizes.push_back(obs_dim + goal_dim);
    for (int h : hyper.hidden_sizes) a.actor_spec.layer_sizes.push_back(h);
    a.actor_spec.layer_sizes.push_back(action_dim);
    a.actor_spec.hidden_activation = Activation::Relu;
    a.actor_spec.output_activation = Activation::Tanh;

    a.critic_spec.layer_sizes.push_back(obs_dim + goal_dim + action_dim);
    for (int h : hyper.hidden_sizes) a.critic_spec.layer_sizes.push_back(h);
    a.critic_spec.layer_sizes.push_back(1);
    a.critic_spec.hidden_activation = Activation::Relu;
    a.critic_spec.output_activation = Activation::Linear;

    a.actor = init_mlp(a.actor_spec, rng);
    a.critic = init_mlp(a.critic_spec, rng);
    a.actor_target = a.actor;
    a.critic_target = a.critic;
    a.actor_opt = adam_init(a.actor_spec, hyper.actor_lr);
    a.critic_opt = adam_init(a.critic_spec, hyper.critic_lr);
    return a;
}

// Deterministic bounded action: tanh head scaled per dimension.
inline Vec policy(DdpgAgent& agent, const Vec& obs, const Vec& goal) {
    Matrix x(1, agent.obs_dim + agent.goal_dim);
    require(static_cast<int>(obs.size()) == agent.obs_dim &&
                static_cast<int>(goal.size()) == agent.goal_dim,
            "policy: input dimension mismatch");
    std::copy(obs.begin(), obs.end(), x.data.begin());
    std::copy(goal.begin(), goal.end(), x.data.begin() + agent.obs_dim);
    const Matrix& y = mlp_forward_batch(agent.actor, agent.actor_spec, x, agent.scratch.ws_policy);
    Vec out(agent.action_dim);
    for (int i = 0; i < agent.action_dim; ++i) out[i] = agent.action_bound[i] * y.at(0, i);
    return out;
}

// Behavior policy: deterministic action, optionally with gaussian noise and
// an epsilon chance of a uniform draw over the action box. Always clipped.
inline Vec select_action(DdpgAgent& agent, const Vec& obs, const Vec& goal, bool explore,
                         const DdpgHyper& hyper, RngStream& rng) {
    Vec a = policy(agent, obs, goal);
    if (explore) {
        for (int i = 0; i < agent.action_dim; ++i)
            a[i] += rng.normal(0.0, hyper.exploration_sigma * agent.action_bound[i]);
        if (rng.chance(hyper.epsilon_random)) {
            for (int i = 0; i < agent.action_dim; ++i)
                a[i] = rng.uniform(-agent.action_bound[i], agent.action_bound[i]);
        }
    }
    for (int i = 0; i < agent.action_dim; ++i)
        a[i] = clip_scalar(a[i], -agent.action_bound[i], agent.action_bound[i]);
    return a;
}

struct UpdateStats {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    bool skipped = false;
};

namespace detail {

inline void zero_grads(MlpGrads& g) {
    for (auto& m : g.w) m.zero();
    for (auto& v : g.b) std::fill(v.begin(), v.end(), 0.0);
}

}  // namespace detail

// One minibatch step: critic regresses on the clipped bootstrap target, the
// actor ascends the critic, targets track slowly. `action_base(obs)` shifts
// the actor output (used by the master level, whose actions are absolute
// subgoals proposed as offsets from the currently achieved subgoal).
template <typename T>
UpdateStats ddpg_update(DdpgAgent& agent, const ReplayBuffer<T>& buffer,
                        const DdpgHyper& hyper, RngStream& rng,
                        const std::function<Vec(const Vec&)>& action_base = {}) {
    const int B = hyper.batch_size;
    if (buffer.size() < static_cast<std::size_t>(B)) {
        std::fprintf(stderr, "ddpg_update: buffer %zu < batch %d, skipping\n", buffer.size(), B);
        return {0.0, 0.0, true};
    }
    auto& s = agent.scratch;
    if (!s.ready) {
        s.actor_grads = zeros_like(agent.actor_spec);
        s.critic_grads = zeros_like(agent.critic_spec);
        s.discard_grads = zeros_like(agent.critic_spec);
        s.ready = true;
    }
    const int sg_dim = agent.obs_dim + agent.goal_dim;
    const int sga_dim = sg_dim + agent.action_dim;
    s.idx.resize(B);
    for (int b = 0; b < B; ++b) s.idx[b] = rng.index(buffer.size());

    // targets: y = clip(r + gamma * (1-done) * Q'(s', g, pi'(s', g)))
    if (s.sg_next.rows != B || s.sg_next.cols != sg_dim) s.sg_next.resize(B, sg_dim);
    for (int b = 0; b < B; ++b) {
        const T& tr = buffer.at(s.idx[b]);
        double* row = s.sg_next.row(b);
        std::copy(tr.next_obs.begin(), tr.next_obs.end(), row);
        std::copy(tr.desired_goal.begin(), tr.desired_goal.end(), row + agent.obs_dim);
    }
    const Matrix& raw_next =
        mlp_forward_batch(agent.actor_target, agent.actor_spec, s.sg_next, s.ws_actor_t);
    if (s.sga_next.rows != B || s.sga_next.cols != sga_dim) s.sga_next.resize(B, sga_dim);
    for (int b = 0; b < B; ++b) {
        double* row = s.sga_next.row(b);
        std::copy(s.sg_next.row(b), s.sg_next.row(b) + sg_dim, row);
        const T& tr = buffer.at(s.idx[b]);
        Vec base;
        if (action_base) base = action_base(tr.next_obs);
        for (int i = 0; i < agent.action_dim; ++i) {
            double u = agent.action_bound[i] * raw_next.at(b, i);
            if (!base.empty()) u += base[i];
            row[sg_dim + i] = u;
        }
    }
    const Matrix& q_next =
        mlp_forward_batch(agent.critic_target, agent.critic_spec, s.sga_next, s.ws_critic_t);
    const double q_floor = -1.0 / (1.0 - hyper.gamma);
    Vec y(B);
    for (int b = 0; b < B; ++b) {
        const T& tr = buffer.at(s.idx[b]);
        const double bootstrap = tr.done ? 0.0 : hyper.gamma * q_next.at(b, 0);
        y[b] = clip_scalar(tr.reward + bootstrap, q_floor, 0.0);
    }

    // critic on stored actions
    if (s.sga.rows != B || s.sga.cols != sga_dim) s.sga.resize(B, sga_dim);
    for (int b = 0; b < B; ++b) {
        const T& tr = buffer.at(s.idx[b]);
        double* row = s.sga.row(b);
        std::copy(tr.obs.begin(), tr.obs.end(), row);
        std::copy(tr.desired_goal.begin(), tr.desired_goal.end(), row + agent.obs_dim);
        std::copy(tr.action.begin(), tr.action.end(), row + sg_dim);
    }
    const Matrix& q = mlp_forward_batch(agent.critic, agent.critic_spec, s.sga, s.ws_critic);
    if (s.dq.rows != B || s.dq.cols != 1) s.dq.resize(B, 1);
    double critic_loss = 0.0;
    for (int b = 0; b < B; ++b) {
        const double err = q.at(b, 0) - y[b];
        critic_loss += err * err;
        s.dq.at(b, 0) = 2.0 * err / B;
    }
    critic_loss /= B;
    detail::zero_grads(s.critic_grads);
    mlp_backward_batch(agent.critic, agent.critic_spec, s.ws_critic, s.dq, s.critic_grads);
    adam_step(agent.critic_opt, agent.critic, s.critic_grads);

    // actor ascends Q(s, g, pi(s, g))
    if (s.sg.rows != B || s.sg.cols != sg_dim) s.sg.resize(B, sg_dim);
    for (int b = 0; b < B; ++b) {
        const T& tr = buffer.at(s.idx[b]);
        double* row = s.sg.row(b);
        std::copy(tr.obs.begin(), tr.obs.end(), row);
        std::copy(tr.desired_goal.begin(), tr.desired_goal.end(), row + agent.obs_dim);
    }
    const Matrix& raw_pi = mlp_forward_batch(agent.actor, agent.actor_spec, s.sg, s.ws_actor);
    if (s.sga_pi.rows != B || s.sga_pi.cols != sga_dim) s.sga_pi.resize(B, sga_dim);
    for (int b = 0; b < B; ++b) {
        double* row = s.sga_pi.row(b);
        std::copy(s.sg.row(b), s.sg.row(b) + sg_dim, row);
        const T& tr = buffer.at(s.idx[b]);
        Vec base;
        if (action_base) base = action_base(tr.obs);
        for (int i = 0; i < agent.action_dim; ++i) {
            double u = agent.action_bound[i] * raw_pi.at(b, i);
            if (!base.empty()) u += base[i];
            row[sg_dim + i] = u;
        }
    }
    const Matrix& q_pi =
        mlp_forward_batch(agent.critic, agent.critic_spec, s.sga_pi, s.ws_critic_pi);
    double actor_loss = 0.0;
    for (int b = 0; b < B; ++b) actor_loss -= q_pi.at(b, 0);
    actor_loss /= B;
    if (s.dq.rows != B || s.dq.cols != 1) s.dq.resize(B, 1);
    for (int b = 0; b < B; ++b) s.dq.at(b, 0) = -1.0 / B;
    detail::zero_grads(s.discard_grads);
    mlp_backward_batch(agent.critic, agent.critic_spec, s.ws_critic_pi, s.dq, s.discard_grads,
                       &s.dsga);
    if (s.du.rows != B || s.du.cols != agent.action_dim) s.du.resize(B, agent.action_dim);
    for (int b = 0; b < B; ++b)
        for (int i = 0; i < agent.action_dim; ++i)
            s.du.at(b, i) = s.dsga.at(b, sg_dim + i) * agent.action_bound[i];
    detail::zero_grads(s.actor_grads);
    mlp_backward_batch(agent.actor, agent.actor_spec, s.ws_actor, s.du, s.actor_grads);
    adam_step(agent.actor_opt, agent.actor, s.actor_grads);

    soft_update(agent.actor_target, agent.actor, hyper.tau);
    soft_update(agent.critic_target, agent.critic, hyper.tau);
    return {critic_loss, actor_loss, false};
}

}  // namespace hrl
