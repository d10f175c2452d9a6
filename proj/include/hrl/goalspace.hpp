#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hrl/rng.hpp"
#include "hrl/vec.hpp"

namespace hrl {

enum class TransformKind { Identity, Rotation, Noise, ExtraFactors, Compose };
enum class RotationPlane { XY, YZ, XZ };

inline std::pair<int, int> plane_axes(RotationPlane plane) {
    switch (plane) {
        case RotationPlane::XY: return {0, 1};
        case RotationPlane::YZ: return {1, 2};
        default: return {0, 2};
    }
}

// Declarative goal-space modification: a rotation of two axes, additive
// Gaussian noise, appended constant factors, or a left-to-right composition.
struct TransformSpec {
    TransformKind kind = TransformKind::Identity;

    // rotation
    RotationPlane plane = RotationPlane::XY;
    double angle = 0.0;
    double center = 0.0;  // rotation center coordinate on both plane axes

    // noise
    double sigma = 0.0;

    // extra factors
    int count = 1;
    double value = 0.0;

    std::vector<TransformSpec> parts;

    static TransformSpec identity() { return {}; }

    static TransformSpec rotation(RotationPlane p, double angle_rad, double center = 0.0) {
        TransformSpec t;
        t.kind = TransformKind::Rotation;
        t.plane = p;
        t.angle = angle_rad;
        t.center = center;
        return t;
    }

    static TransformSpec noise(double sigma) {
        TransformSpec t;
        t.kind = TransformKind::Noise;
        t.sigma = sigma;
        return t;
    }

    static TransformSpec extra_factors(int count, double value) {
        TransformSpec t;
        t.kind = TransformKind::ExtraFactors;
        t.count = count;
        t.value = value;
        return t;
    }

    static TransformSpec compose(std::vector<TransformSpec> parts) {
        TransformSpec t;
        t.kind = TransformKind::Compose;
        t.parts = std::move(parts);
        return t;
    }

    void validate() const {
        switch (kind) {
            case TransformKind::Rotation:
                require(angle >= 0.0 && angle < 6.283185307179586477,
                        "TransformSpec: rotation angle out of [0, 2pi)");
                break;
            case TransformKind::Noise:
                require(std::isfinite(sigma) && sigma >= 0.0,
                        "TransformSpec: noise sigma must be finite and >= 0");
                break;
            case TransformKind::ExtraFactors:
                require(count >= 1, "TransformSpec: extra factor count must be >= 1");
                require(std::isfinite(value), "TransformSpec: extra factor value must be finite");
                break;
            case TransformKind::Compose:
                require(!parts.empty(), "TransformSpec: empty composition");
                for (const auto& p : parts) p.validate();
                break;
            default: break;
        }
    }
};

inline int output_dim(const TransformSpec& spec, int input_dim) {
    require(input_dim >= 1, "output_dim: input_dim must be >= 1");
    switch (spec.kind) {
        case TransformKind::Identity:
        case TransformKind::Noise:
            return input_dim;
        case TransformKind::Rotation: {
            const auto [i, j] = plane_axes(spec.plane);
            require(input_dim > std::max(i, j), "output_dim: rotation plane axis missing");
            return input_dim;
        }
        case TransformKind::ExtraFactors:
            return input_dim + spec.count;
        case TransformKind::Compose: {
            int d = input_dim;
            for (const auto& p : spec.parts) d = output_dim(p, d);
            return d;
        }
    }
    return input_dim;
}

// Applies the modification to a ground-truth goal vector. Noise draws fresh
// samples from the stream on every call.
inline Vec apply_transform(const TransformSpec& spec, const Vec& g, RngStream& rng) {
    switch (spec.kind) {
        case TransformKind::Identity:
            return g;
        case TransformKind::Rotation: {
            const auto [i, j] = plane_axes(spec.plane);
            require(static_cast<int>(g.size()) > std::max(i, j),
                    "apply_transform: rotation plane axis missing");
            Vec out = g;
            const double c = std::cos(spec.angle);
            const double s = std::sin(spec.angle);
            const double x = g[i] - spec.center;
            const double y = g[j] - spec.center;
            out[i] = spec.center + c * x - s * y;
            out[j] = spec.center + s * x + c * y;
            return out;
        }
        case TransformKind::Noise: {
            Vec out = g;
            for (double& x : out) x += rng.normal(0.0, spec.sigma);
            return out;
        }
        case TransformKind::ExtraFactors: {
            Vec out = g;
            out.insert(out.end(), static_cast<std::size_t>(spec.count), spec.value);
            return out;
        }
        case TransformKind::Compose: {
            require(!spec.parts.empty(), "apply_transform: empty composition");
            Vec out = g;
            for (const auto& p : spec.parts) out = apply_transform(p, out, rng);
            return out;
        }
    }
    return g;
}

// 10*log10(P_signal / P_noise), with P_signal the mean per-axis population
// variance of the samples and P_noise = sigma^2. Undefined (nullopt) when
// the samples carry no variance.
inline std::optional<double> snr_db(double sigma, const std::vector<Vec>& goal_samples) {
    require(sigma > 0.0, "snr_db: sigma must be > 0");
    require(goal_samples.size() >= 2, "snr_db: need at least 2 samples");
    const std::size_t dim = goal_samples.front().size();
    const double n = static_cast<double>(goal_samples.size());
    double mean_axis_var = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
        double mean = 0.0;
        for (const auto& g : goal_samples) mean += g[a];
        mean /= n;
        double var = 0.0;
        for (const auto& g : goal_samples) var += (g[a] - mean) * (g[a] - mean);
        mean_axis_var += var / n;
    }
    mean_axis_var /= static_cast<double>(dim);
    if (mean_axis_var <= 0.0) return std::nullopt;
    return 10.0 * std::log10(mean_axis_var / (sigma * sigma));
}

}  // namespace hrl
