#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrl/ddpg.hpp"
#include "hrl/env.hpp"
#include "hrl/goalspace.hpp"
#include "hrl/hac.hpp"
#include "hrl/replay.hpp"

namespace hrl {

using json = nlohmann::json;

enum class Algorithm { Her, Hac };

inline std::string to_string(Algorithm a) { return a == Algorithm::Her ? "her" : "hac"; }
inline std::string to_string(Task t) { return t == Task::Reach ? "reach" : "pick_place"; }
inline std::string to_string(RotationPlane p) {
    switch (p) {
        case RotationPlane::XY: return "xy";
        case RotationPlane::YZ: return "yz";
        default: return "xz";
    }
}

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "her") return Algorithm::Her;
    if (s == "hac") return Algorithm::Hac;
    throw std::invalid_argument("unknown algorithm: " + s);
}

inline Task task_from_string(const std::string& s) {
    if (s == "reach") return Task::Reach;
    if (s == "pick_place") return Task::PickPlace;
    throw std::invalid_argument("unknown task: " + s);
}

inline RotationPlane plane_from_string(const std::string& s) {
    if (s == "xy") return RotationPlane::XY;
    if (s == "yz") return RotationPlane::YZ;
    if (s == "xz") return RotationPlane::XZ;
    throw std::invalid_argument("unknown rotation plane: " + s);
}

// Transforms are written as a flat list of primitive records; an empty list
// is the identity and a multi-record list composes left to right.
inline json transform_to_json(const TransformSpec& t) {
    switch (t.kind) {
        case TransformKind::Identity:
            return json::array();
        case TransformKind::Rotation:
            return json::array({{{"kind", "rotation"},
                                 {"plane", to_string(t.plane)},
                                 {"angle", t.angle},
                                 {"center", t.center}}});
        case TransformKind::Noise:
            return json::array({{{"kind", "noise"}, {"sigma", t.sigma}}});
        case TransformKind::ExtraFactors:
            return json::array({{{"kind", "extra_factors"},
                                 {"count", t.count},
                                 {"value", t.value}}});
        case TransformKind::Compose: {
            json arr = json::array();
            for (const auto& p : t.parts)
                for (const auto& rec : transform_to_json(p)) arr.push_back(rec);
            return arr;
        }
    }
    return json::array();
}

inline TransformSpec transform_from_json(const json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("transform must be a list of records");
    std::vector<TransformSpec> parts;
    for (const auto& rec : arr) {
        const std::string kind = rec.at("kind").get<std::string>();
        if (kind == "identity") {
            parts.push_back(TransformSpec::identity());
        } else if (kind == "rotation") {
            parts.push_back(TransformSpec::rotation(
                plane_from_string(rec.at("plane").get<std::string>()),
                rec.at("angle").get<double>(), rec.value("center", 0.0)));
        } else if (kind == "noise") {
            parts.push_back(TransformSpec::noise(rec.at("sigma").get<double>()));
        } else if (kind == "extra_factors") {
            parts.push_back(
                TransformSpec::extra_factors(rec.at("count").get<int>(),
                                             rec.at("value").get<double>()));
        } else {
            throw std::invalid_argument("unknown transform kind: " + kind);
        }
    }
    if (parts.empty()) return TransformSpec::identity();
    if (parts.size() == 1) return parts.front();
    TransformSpec t = TransformSpec::compose(std::move(parts));
    t.validate();
    return t;
}

struct ExperimentConfig {
    EnvConfig env;
    Algorithm algorithm = Algorithm::Her;
    TransformSpec f_m;
    TransformSpec f_s;
    int trials = 10;
    int epochs = 60;
    int episodes_per_epoch = 50;
    int eval_episodes = 20;
    long base_seed = 1000;
    DdpgHyper hyper;
    HacConfig hac;
    HerStrategy her;

    void validate() const {
        env.validate();
        hyper.validate();
        hac.validate();
        f_m.validate();
        f_s.validate();
        require(trials >= 1, "ExperimentConfig: trials must be >= 1");
        require(epochs >= 1, "ExperimentConfig: epochs must be >= 1");
        require(episodes_per_epoch >= 1, "ExperimentConfig: episodes_per_epoch must be >= 1");
        require(eval_episodes >= 1, "ExperimentConfig: eval_episodes must be >= 1");
        require(her.k >= 1, "ExperimentConfig: her.k must be >= 1");
        // master actions live in F_s
        output_dim(f_s, 3);
        output_dim(f_m, 3);
    }

    int goal_dim_master() const { return output_dim(f_m, 3); }
    int goal_dim_sub() const { return output_dim(f_s, 3); }
};

inline json to_json(const ExperimentConfig& c) {
    json j;
    j["env"] = {{"task", to_string(c.env.task)},
                {"episode_length", c.env.episode_length},
                {"success_threshold", c.env.success_threshold},
                {"a_max", c.env.a_max},
                {"grasp_radius", c.env.grasp_radius}};
    j["algorithm"] = to_string(c.algorithm);
    j["f_m"] = transform_to_json(c.f_m);
    j["f_s"] = transform_to_json(c.f_s);
    j["trials"] = c.trials;
    j["epochs"] = c.epochs;
    j["episodes_per_epoch"] = c.episodes_per_epoch;
    j["eval_episodes"] = c.eval_episodes;
    j["base_seed"] = c.base_seed;
    j["hyper"] = {{"gamma", c.hyper.gamma},
                  {"actor_lr", c.hyper.actor_lr},
                  {"critic_lr", c.hyper.critic_lr},
                  {"tau", c.hyper.tau},
                  {"batch_size", c.hyper.batch_size},
                  {"buffer_capacity", c.hyper.buffer_capacity},
                  {"updates_per_cycle", c.hyper.updates_per_cycle},
                  {"exploration_sigma", c.hyper.exploration_sigma},
                  {"epsilon_random", c.hyper.epsilon_random},
                  {"hidden_sizes", c.hyper.hidden_sizes}};
    j["hac"] = {{"horizon", c.hac.horizon},
                {"subgoal_test_rate", c.hac.subgoal_test_rate},
                {"subgoal_penalty", c.hac.subgoal_penalty},
                {"master_offset_bound", c.hac.master_offset_bound},
                {"levels", c.algorithm == Algorithm::Her ? 1 : 2}};
    j["her"] = {{"mode", "future"}, {"k", c.her.k}};
    return j;
}

inline ExperimentConfig experiment_from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("env")) {
        const auto& e = j.at("env");
        if (e.contains("task")) c.env.task = task_from_string(e.at("task").get<std::string>());
        c.env.episode_length = e.value("episode_length", c.env.episode_length);
        c.env.success_threshold = e.value("success_threshold", c.env.success_threshold);
        c.env.a_max = e.value("a_max", c.env.a_max);
        c.env.grasp_radius = e.value("grasp_radius", c.env.grasp_radius);
    }
    if (j.contains("algorithm"))
        c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    if (j.contains("f_m")) c.f_m = transform_from_json(j.at("f_m"));
    if (j.contains("f_s")) c.f_s = transform_from_json(j.at("f_s"));
    c.trials = j.value("trials", c.trials);
    c.epochs = j.value("epochs", c.epochs);
    c.episodes_per_epoch = j.value("episodes_per_epoch", c.episodes_per_epoch);
    c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
    c.base_seed = j.value("base_seed", c.base_seed);
    if (j.contains("hyper")) {
        const auto& h = j.at("hyper");
        c.hyper.gamma = h.value("gamma", c.hyper.gamma);
        c.hyper.actor_lr = h.value("actor_lr", c.hyper.actor_lr);
        c.hyper.critic_lr = h.value("critic_lr", c.hyper.critic_lr);
        c.hyper.tau = h.value("tau", c.hyper.tau);
        c.hyper.batch_size = h.value("batch_size", c.hyper.batch_size);
        c.hyper.buffer_capacity = h.value("buffer_capacity", c.hyper.buffer_capacity);
        c.hyper.updates_per_cycle = h.value("updates_per_cycle", c.hyper.updates_per_cycle);
        c.hyper.exploration_sigma = h.value("exploration_sigma", c.hyper.exploration_sigma);
        c.hyper.epsilon_random = h.value("epsilon_random", c.hyper.epsilon_random);
        c.hyper.hidden_sizes =
            h.value("hidden_sizes", c.hyper.hidden_sizes);
    }
    if (j.contains("hac")) {
        const auto& h = j.at("hac");
        c.hac.horizon = h.value("horizon", c.hac.horizon);
        c.hac.subgoal_test_rate = h.value("subgoal_test_rate", c.hac.subgoal_test_rate);
        c.hac.subgoal_penalty = h.value("subgoal_penalty", c.hac.subgoal_penalty);
        c.hac.master_offset_bound = h.value("master_offset_bound", c.hac.master_offset_bound);
        c.hac.levels = h.value("levels", c.hac.levels);
    }
    if (j.contains("her")) c.her.k = j.at("her").value("k", c.her.k);
    // keep the two encodings of "one level vs two" consistent
    c.hac.levels = c.algorithm == Algorithm::Her ? 1 : 2;
    c.validate();
    return c;
}

enum class ScanKind { RotationAngle, NoiseSigma };

struct ScanConfig {
    ScanKind kind = ScanKind::RotationAngle;
    RotationPlane plane = RotationPlane::XY;
    int n_points = 5;
    double min_value = 0.0;
    double max_value = 0.7853981633974483;  // pi/4
    bool log_spacing = false;
    double rotation_center = 0.5;
    ExperimentConfig base;

    void validate() const {
        require(n_points >= 2, "ScanConfig: n_points must be >= 2");
        require(max_value >= min_value, "ScanConfig: max < min");
        if (log_spacing) require(min_value > 0.0, "ScanConfig: log spacing needs min > 0");
        base.validate();
    }

    std::vector<double> points() const {
        std::vector<double> out;
        for (int i = 0; i < n_points; ++i) {
            const double t = static_cast<double>(i) / (n_points - 1);
            if (log_spacing)
                out.push_back(min_value * std::pow(max_value / min_value, t));
            else
                out.push_back(min_value + t * (max_value - min_value));
        }
        return out;
    }
};

inline json to_json(const ScanConfig& s) {
    json j;
    j["scan"] = {{"kind", s.kind == ScanKind::RotationAngle ? "rotation_angle" : "noise_sigma"},
                 {"plane", to_string(s.plane)},
                 {"n_points", s.n_points},
                 {"min", s.min_value},
                 {"max", s.max_value},
                 {"spacing", s.log_spacing ? "log" : "linear"},
                 {"rotation_center", s.rotation_center}};
    j["base"] = to_json(s.base);
    return j;
}

inline ScanConfig scan_from_json(const json& j) {
    ScanConfig s;
    const auto& sc = j.at("scan");
    const std::string kind = sc.at("kind").get<std::string>();
    if (kind == "rotation_angle")
        s.kind = ScanKind::RotationAngle;
    else if (kind == "noise_sigma")
        s.kind = ScanKind::NoiseSigma;
    else
        throw std::invalid_argument("unknown scan kind: " + kind);
    if (sc.contains("plane")) s.plane = plane_from_string(sc.at("plane").get<std::string>());
    s.n_points = sc.value("n_points", s.n_points);
    s.min_value = sc.value("min", s.min_value);
    s.max_value = sc.value("max", s.max_value);
    if (sc.contains("spacing")) s.log_spacing = sc.at("spacing").get<std::string>() == "log";
    s.rotation_center = sc.value("rotation_center", s.rotation_center);
    s.base = experiment_from_json(j.at("base"));
    s.validate();
    return s;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace hrl
