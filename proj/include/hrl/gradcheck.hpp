#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hrl/nn.hpp"
#include "hrl/rng.hpp"

namespace hrl {

namespace detail {

// Forward pass that also reports the smallest |pre-activation| over relu
// layers, so instances sitting on a kink can be resampled before finite
// differencing.
inline double min_relu_margin(const MlpParams& params, const MlpSpec& spec, const Vec& input) {
    double margin = 1e300;
    Vec a = input;
    for (int l = 0; l < spec.num_weight_layers(); ++l) {
        const Matrix& w = params.w[l];
        Vec z(w.rows);
        for (int o = 0; o < w.rows; ++o) {
            double acc = params.b[l][o];
            const double* wr = w.row(o);
            for (int i = 0; i < w.cols; ++i) acc += wr[i] * a[i];
            z[o] = acc;
        }
        if (spec.activation_of(l) == Activation::Relu)
            for (double v : z) margin = std::min(margin, std::abs(v));
        a.resize(z.size());
        for (std::size_t o = 0; o < z.size(); ++o) a[o] = activate(spec.activation_of(l), z[o]);
    }
    return margin;
}

}  // namespace detail

struct GradCheckReport {
    double max_rel_error = 0.0;
    int instances = 0;
};

// Compares analytic backprop gradients against central finite differences
// (h = 1e-5) on random small networks; checks every weight, bias and input
// entry of a random scalarized loss.
inline GradCheckReport run_gradient_check(int instances, std::uint64_t seed) {
    RngStream rng(seed);
    GradCheckReport report;
    report.instances = instances;
    const double h = 1e-5;

    for (int inst = 0; inst < instances; ++inst) {
        MlpSpec spec;
        MlpParams params;
        Vec input;
        // resample until no relu unit sits near its kink
        for (;;) {
            spec.layer_sizes.clear();
            const int n_hidden = 1 + static_cast<int>(rng.index(3));
            spec.layer_sizes.push_back(1 + static_cast<int>(rng.index(8)));
            for (int i = 0; i < n_hidden; ++i)
                spec.layer_sizes.push_back(2 + static_cast<int>(rng.index(31)));
            spec.layer_sizes.push_back(1 + static_cast<int>(rng.index(8)));
            spec.hidden_activation = rng.chance(0.5) ? Activation::Relu : Activation::Tanh;
            spec.output_activation = rng.chance(0.5) ? Activation::Linear : Activation::Tanh;
            params = init_mlp(spec, rng);
            for (auto& b : params.b)
                for (double& x : b) x = rng.normal(0.0, 0.1);
            input.resize(spec.input_dim());
            for (double& x : input) x = rng.normal(0.0, 1.0);
            if (spec.hidden_activation != Activation::Relu ||
                detail::min_relu_margin(params, spec, input) > 1e-3)
                break;
        }

        Vec loss_weights(spec.output_dim());
        for (double& c : loss_weights) c = rng.normal(0.0, 1.0);
        auto loss = [&](const MlpParams& p, const Vec& x) {
            const Vec y = mlp_forward(p, spec, x);
            double acc = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) acc += loss_weights[i] * y[i];
            return acc;
        };

        auto [grads, input_grad] = mlp_backward(params, spec, input, loss_weights);

        auto check = [&](double analytic, double numeric) {
            const double rel =
                std::abs(analytic - numeric) / (std::abs(analytic) + std::abs(numeric) + 1e-6);
            report.max_rel_error = std::max(report.max_rel_error, rel);
        };

        MlpParams probe = params;
        for (std::size_t l = 0; l < params.w.size(); ++l) {
            for (std::size_t i = 0; i < params.w[l].data.size(); ++i) {
                const double saved = probe.w[l].data[i];
                probe.w[l].data[i] = saved + h;
                const double up = loss(probe, input);
                probe.w[l].data[i] = saved - h;
                const double down = loss(probe, input);
                probe.w[l].data[i] = saved;
                check(grads.w[l].data[i], (up - down) / (2.0 * h));
            }
            for (std::size_t i = 0; i < params.b[l].size(); ++i) {
                const double saved = probe.b[l][i];
                probe.b[l][i] = saved + h;
                const double up = loss(probe, input);
                probe.b[l][i] = saved - h;
                const double down = loss(probe, input);
                probe.b[l][i] = saved;
                check(grads.b[l][i], (up - down) / (2.0 * h));
            }
        }
        Vec probe_in = input;
        for (std::size_t i = 0; i < input.size(); ++i) {
            const double saved = probe_in[i];
            probe_in[i] = saved + h;
            const double up = loss(params, probe_in);
            probe_in[i] = saved - h;
            const double down = loss(params, probe_in);
            probe_in[i] = saved;
            check(input_grad[i], (up - down) / (2.0 * h));
        }
    }
    return report;
}

}  // namespace hrl
