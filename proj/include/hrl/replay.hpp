#pragma once

#include <cstddef>
#include <vector>

#include "hrl/rng.hpp"
#include "hrl/vec.hpp"

namespace hrl {

// Goal-conditioned experience tuple. Goals live in whatever transformed
// space the owning level uses.
struct Transition {
    Vec obs;
    Vec action;
    Vec next_obs;
    Vec achieved_goal;
    Vec next_achieved_goal;
    Vec desired_goal;
    double reward = 0.0;
    bool done = false;
};

// 0 when the achieved goal is within the threshold of the desired one,
// -1 otherwise.
inline double sparse_reward(const Vec& achieved, const Vec& desired, double threshold) {
    return distance(achieved, desired) < threshold ? 0.0 : -1.0;
}

struct HerStrategy {
    enum class Mode { Future };
    Mode mode = Mode::Future;
    int k = 4;  // relabeled copies per transition
};

// Fixed-capacity ring; oldest entries are overwritten first.
template <typename T>
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        require(capacity >= 1, "ReplayBuffer: capacity must be >= 1");
        storage_.reserve(capacity);
    }

    void push(T item) {
        if (storage_.size() < capacity_) {
            storage_.push_back(std::move(item));
        } else {
            storage_[cursor_] = std::move(item);
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }

    // i = 0 is the oldest retained entry.
    const T& at(std::size_t i) const {
        require(i < storage_.size(), "ReplayBuffer: index out of range");
        if (storage_.size() < capacity_) return storage_[i];
        return storage_[(cursor_ + i) % capacity_];
    }

    const T& sample(RngStream& rng) const {
        require(!storage_.empty(), "ReplayBuffer: sample from empty buffer");
        return storage_[rng.index(storage_.size())];
    }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<T> storage_;
};

// Hindsight relabeling, `future` strategy: the output keeps every original
// transition and appends, per transition t, k copies whose desired goal is
// the next achieved goal of a uniformly drawn transition t' >= t in the same
// episode. Rewards and done flags of the copies are recomputed.
template <typename T>
std::vector<T> her_relabel(const std::vector<T>& episode, const HerStrategy& strategy,
                           double threshold, RngStream& rng) {
    require(!episode.empty(), "her_relabel: empty episode");
    require(strategy.k >= 1, "her_relabel: k must be >= 1");
    std::vector<T> out;
    out.reserve(episode.size() * (1 + static_cast<std::size_t>(strategy.k)));
    out.insert(out.end(), episode.begin(), episode.end());
    for (std::size_t t = 0; t < episode.size(); ++t) {
        for (int c = 0; c < strategy.k; ++c) {
            const std::size_t src = t + rng.index(episode.size() - t);
            T copy = episode[t];
            copy.desired_goal = episode[src].next_achieved_goal;
            copy.reward = sparse_reward(copy.next_achieved_goal, copy.desired_goal, threshold);
            copy.done = copy.reward == 0.0;
            out.push_back(std::move(copy));
        }
    }
    return out;
}

}  // namespace hrl
