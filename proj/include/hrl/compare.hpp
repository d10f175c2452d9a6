#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "hrl/experiment.hpp"
#include "hrl/svg.hpp"

namespace hrl {

struct Condition {
    std::string name;
    TransformSpec transform;
};

// The eight goal-space conditions of the perturbation study: baseline, each
// individual modification, and every combination (composed in the canonical
// order rotation, extra factors, noise).
inline std::vector<Condition> perturbation_conditions(double angle = 0.7853981633974483,
                                                      RotationPlane plane = RotationPlane::XY,
                                                      double center = 0.5, double sigma = 0.01,
                                                      int extra_count = 1,
                                                      double extra_value = 0.0) {
    const TransformSpec rot = TransformSpec::rotation(plane, angle, center);
    const TransformSpec noi = TransformSpec::noise(sigma);
    const TransformSpec ext = TransformSpec::extra_factors(extra_count, extra_value);
    return {
        {"baseline", TransformSpec::identity()},
        {"rotation", rot},
        {"noise", noi},
        {"extra_factor", ext},
        {"rotation_noise", TransformSpec::compose({rot, noi})},
        {"rotation_extra", TransformSpec::compose({rot, ext})},
        {"extra_noise", TransformSpec::compose({ext, noi})},
        {"rotation_extra_noise", TransformSpec::compose({rot, ext, noi})},
    };
}

struct CompareEntry {
    Algorithm algorithm;
    std::string condition;
    ExperimentResult result;
};

// Runs both algorithms across all eight conditions, emitting per-condition
// CSVs, one chart per algorithm, and a summary table.
inline std::vector<CompareEntry> run_compare(const ExperimentConfig& base,
                                             const std::filesystem::path& out_dir, int jobs) {
    std::vector<CompareEntry> entries;
    const auto conditions = perturbation_conditions();
    for (Algorithm algo : {Algorithm::Her, Algorithm::Hac}) {
        std::vector<std::pair<std::string, CurveAggregate>> curves;
        for (const auto& cond : conditions) {
            ExperimentConfig cfg = base;
            cfg.algorithm = algo;
            cfg.f_m = cond.transform;
            cfg.f_s = cond.transform;
            CompareEntry entry{algo, cond.name, run_experiment(cfg, jobs)};
            emit_csv(entry.result, out_dir / to_string(algo) / cond.name);
            curves.emplace_back(cond.name, entry.result.aggregate);
            entries.push_back(std::move(entry));
        }
        emit_plot(curves, out_dir / ("compare_" + to_string(algo) + ".svg"),
                  to_string(algo) + " on " + to_string(base.env.task));
    }
    std::ofstream summary(out_dir / "summary.csv");
    if (!summary) throw std::runtime_error("run_compare: cannot write summary.csv");
    summary << "algorithm,condition,final_median,final_q25,final_q75\n";
    for (const auto& e : entries) {
        const auto& agg = e.result.aggregate;
        summary << to_string(e.algorithm) << "," << e.condition << ","
                << detail::fmt(agg.median.back()) << "," << detail::fmt(agg.q25.back()) << ","
                << detail::fmt(agg.q75.back()) << "\n";
    }
    return entries;
}

}  // namespace hrl
