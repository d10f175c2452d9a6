#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hrl/rng.hpp"
#include "hrl/vec.hpp"

namespace hrl {

enum class Activation { Relu, Tanh, Linear };

// Dense row-major matrix, the only tensor shape the net core needs.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    void resize(int r, int c) {
        rows = r;
        cols = c;
        data.assign(static_cast<std::size_t>(r) * c, 0.0);
    }

    void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

struct MlpSpec {
    std::vector<int> layer_sizes;  // input, hidden..., output
    Activation hidden_activation = Activation::Relu;
    Activation output_activation = Activation::Linear;

    int num_weight_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }

    Activation activation_of(int layer) const {
        return layer == num_weight_layers() - 1 ? output_activation : hidden_activation;
    }

    void validate() const {
        require(layer_sizes.size() >= 2, "MlpSpec: need at least input and output layers");
        for (int s : layer_sizes) require(s >= 1, "MlpSpec: layer size must be >= 1");
    }
};

// Weight matrices are (out x in); one bias vector per weight layer.
struct MlpParams {
    std::vector<Matrix> w;
    std::vector<Vec> b;

    bool matches(const MlpSpec& spec) const {
        if (static_cast<int>(w.size()) != spec.num_weight_layers()) return false;
        if (w.size() != b.size()) return false;
        for (std::size_t l = 0; l < w.size(); ++l) {
            if (w[l].rows != spec.layer_sizes[l + 1] || w[l].cols != spec.layer_sizes[l])
                return false;
            if (static_cast<int>(b[l].size()) != spec.layer_sizes[l + 1]) return false;
        }
        return true;
    }

    bool all_entries_finite() const {
        for (const auto& m : w)
            for (double x : m.data)
                if (!std::isfinite(x)) return false;
        for (const auto& v : b)
            if (!all_finite(v)) return false;
        return true;
    }
};

using MlpGrads = MlpParams;

inline MlpParams zeros_like(const MlpSpec& spec) {
    MlpParams p;
    const int L = spec.num_weight_layers();
    p.w.reserve(L);
    p.b.reserve(L);
    for (int l = 0; l < L; ++l) {
        p.w.emplace_back(spec.layer_sizes[l + 1], spec.layer_sizes[l]);
        p.b.emplace_back(static_cast<std::size_t>(spec.layer_sizes[l + 1]), 0.0);
    }
    return p;
}

// He-uniform for relu layers, Xavier-uniform otherwise; zero biases.
inline MlpParams init_mlp(const MlpSpec& spec, RngStream& rng) {
    spec.validate();
    MlpParams p = zeros_like(spec);
    for (int l = 0; l < spec.num_weight_layers(); ++l) {
        const double fan_in = spec.layer_sizes[l];
        const double fan_out = spec.layer_sizes[l + 1];
        const double bound = spec.activation_of(l) == Activation::Relu
                                 ? std::sqrt(6.0 / fan_in)
                                 : std::sqrt(6.0 / (fan_in + fan_out));
        for (double& x : p.w[l].data) x = rng.uniform(-bound, bound);
    }
    return p;
}

namespace detail {

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        default: return z;
    }
}

// Derivative expressed through the activation value.
inline double activate_grad(Activation a, double value) {
    switch (a) {
        case Activation::Relu: return value > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: return 1.0 - value * value;
        default: return 1.0;
    }
}

}  // namespace detail

// Per-layer activation values for a batch; acts[0] is the input.
struct MlpWorkspace {
    std::vector<Matrix> acts;
    std::vector<Matrix> deltas;  // scratch for backward
};

// Forward pass over a batch (rows = samples). Activations are kept in the
// workspace for a later backward pass.
inline const Matrix& mlp_forward_batch(const MlpParams& params, const MlpSpec& spec,
                                       const Matrix& input, MlpWorkspace& ws) {
    require(input.cols == spec.input_dim(), "mlp_forward: input dimension mismatch");
    require(params.matches(spec), "mlp_forward: params do not match spec");
    const int L = spec.num_weight_layers();
    const int B = input.rows;
    ws.acts.resize(L + 1);
    ws.acts[0] = input;
    for (int l = 0; l < L; ++l) {
        const Matrix& wl = params.w[l];
        const Vec& bl = params.b[l];
        const Matrix& a_in = ws.acts[l];
        Matrix& a_out = ws.acts[l + 1];
        if (a_out.rows != B || a_out.cols != wl.rows) a_out.resize(B, wl.rows);
        const Activation act = spec.activation_of(l);
        for (int s = 0; s < B; ++s) {
            const double* x = a_in.row(s);
            double* y = a_out.row(s);
            for (int o = 0; o < wl.rows; ++o) {
                const double* wrow = wl.row(o);
                double z = bl[o];
                for (int i = 0; i < wl.cols; ++i) z += wrow[i] * x[i];
                y[o] = detail::activate(act, z);
            }
        }
    }
    return ws.acts.back();
}

inline Vec mlp_forward(const MlpParams& params, const MlpSpec& spec, const Vec& input) {
    Matrix x(1, static_cast<int>(input.size()));
    std::copy(input.begin(), input.end(), x.data.begin());
    MlpWorkspace ws;
    const Matrix& y = mlp_forward_batch(params, spec, x, ws);
    return Vec(y.data.begin(), y.data.end());
}

// Reverse pass for the batch held in `ws`. Gradients are summed over the
// batch and accumulated into `grads` (caller zeroes/scales). When `input_grad`
// is non-null it receives d(loss)/d(input).
inline void mlp_backward_batch(const MlpParams& params, const MlpSpec& spec,
                               MlpWorkspace& ws, const Matrix& output_grad,
                               MlpGrads& grads, Matrix* input_grad = nullptr) {
    const int L = spec.num_weight_layers();
    require(static_cast<int>(ws.acts.size()) == L + 1, "mlp_backward: run forward first");
    const int B = ws.acts[0].rows;
    require(output_grad.rows == B && output_grad.cols == spec.output_dim(),
            "mlp_backward: output_grad shape mismatch");

    ws.deltas.resize(L + 1);
    Matrix& d_out = ws.deltas[L];
    d_out = output_grad;

    for (int l = L - 1; l >= 0; --l) {
        const Matrix& wl = params.w[l];
        const Matrix& a_out = ws.acts[l + 1];
        const Matrix& a_in = ws.acts[l];
        Matrix& dz = ws.deltas[l + 1];
        const Activation act = spec.activation_of(l);

        // dz := upstream grad * act'(a_out)
        for (int s = 0; s < B; ++s) {
            double* dzr = dz.row(s);
            const double* ar = a_out.row(s);
            for (int o = 0; o < wl.rows; ++o) dzr[o] *= detail::activate_grad(act, ar[o]);
        }

        Matrix& gw = grads.w[l];
        Vec& gb = grads.b[l];
        for (int s = 0; s < B; ++s) {
            const double* dzr = dz.row(s);
            const double* xr = a_in.row(s);
            for (int o = 0; o < wl.rows; ++o) {
                const double g = dzr[o];
                if (g == 0.0) continue;
                double* gwr = gw.row(o);
                for (int i = 0; i < wl.cols; ++i) gwr[i] += g * xr[i];
                gb[o] += g;
            }
        }

        const bool need_dx = l > 0 || input_grad != nullptr;
        if (!need_dx) break;
        Matrix& dx = ws.deltas[l];
        if (dx.rows != B || dx.cols != wl.cols) dx.resize(B, wl.cols);
        dx.zero();
        for (int s = 0; s < B; ++s) {
            const double* dzr = dz.row(s);
            double* dxr = dx.row(s);
            for (int o = 0; o < wl.rows; ++o) {
                const double g = dzr[o];
                if (g == 0.0) continue;
                const double* wrow = wl.row(o);
                for (int i = 0; i < wl.cols; ++i) dxr[i] += g * wrow[i];
            }
        }
    }
    if (input_grad != nullptr) *input_grad = ws.deltas[0];
}

inline std::pair<MlpGrads, Vec> mlp_backward(const MlpParams& params, const MlpSpec& spec,
                                             const Vec& input, const Vec& output_grad) {
    require(static_cast<int>(output_grad.size()) == spec.output_dim(),
            "mlp_backward: output_grad dimension mismatch");
    Matrix x(1, static_cast<int>(input.size()));
    std::copy(input.begin(), input.end(), x.data.begin());
    MlpWorkspace ws;
    mlp_forward_batch(params, spec, x, ws);
    Matrix dy(1, static_cast<int>(output_grad.size()));
    std::copy(output_grad.begin(), output_grad.end(), dy.data.begin());
    MlpGrads grads = zeros_like(spec);
    Matrix dx;
    mlp_backward_batch(params, spec, ws, dy, grads, &dx);
    return {std::move(grads), Vec(dx.data.begin(), dx.data.end())};
}

struct AdamState {
    long step_count = 0;
    MlpGrads first_moment;
    MlpGrads second_moment;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

inline AdamState adam_init(const MlpSpec& spec, double learning_rate) {
    AdamState s;
    s.first_moment = zeros_like(spec);
    s.second_moment = zeros_like(spec);
    s.learning_rate = learning_rate;
    return s;
}

namespace detail {

inline void adam_apply(AdamState& state, double* theta, double* m, double* v,
                       const double* g, std::size_t n, double bc1, double bc2) {
    const double lr = state.learning_rate;
    const double b1 = state.beta1, b2 = state.beta2, eps = state.epsilon;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(g[i]))
            throw std::runtime_error("adam_step: non-finite gradient entry");
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace detail

// Standard Adam with bias correction; mutates params and state in place.
inline void adam_step(AdamState& state, MlpParams& params, const MlpGrads& grads) {
    require(params.w.size() == grads.w.size() &&
                params.w.size() == state.first_moment.w.size(),
            "adam_step: shape mismatch");
    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t l = 0; l < params.w.size(); ++l) {
        detail::adam_apply(state, params.w[l].data.data(), state.first_moment.w[l].data.data(),
                           state.second_moment.w[l].data.data(), grads.w[l].data.data(),
                           params.w[l].data.size(), bc1, bc2);
        detail::adam_apply(state, params.b[l].data(), state.first_moment.b[l].data(),
                           state.second_moment.b[l].data(), grads.b[l].data(),
                           params.b[l].size(), bc1, bc2);
    }
}

// target' = (1-tau)*target + tau*online, elementwise.
inline void soft_update(MlpParams& target, const MlpParams& online, double tau) {
    require(tau > 0.0 && tau <= 1.0, "soft_update: tau out of (0,1]");
    require(target.w.size() == online.w.size(), "soft_update: shape mismatch");
    if (tau == 1.0) {
        target = online;
        return;
    }
    for (std::size_t l = 0; l < target.w.size(); ++l) {
        require(target.w[l].data.size() == online.w[l].data.size() &&
                    target.b[l].size() == online.b[l].size(),
                "soft_update: shape mismatch");
        for (std::size_t i = 0; i < target.w[l].data.size(); ++i)
            target.w[l].data[i] = (1.0 - tau) * target.w[l].data[i] + tau * online.w[l].data[i];
        for (std::size_t i = 0; i < target.b[l].size(); ++i)
            target.b[l][i] = (1.0 - tau) * target.b[l][i] + tau * online.b[l][i];
    }
}

}  // namespace hrl
