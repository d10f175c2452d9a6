#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hrl/vec.hpp"

namespace hrl {

// Linear-interpolation quantile on the sorted list, index h = q*(n-1).
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    require(q >= 0.0 && q <= 1.0, "quantile: q out of [0,1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

// Per-epoch median with 25%/75% quartiles across trials.
struct CurveAggregate {
    std::vector<double> median;
    std::vector<double> q25;
    std::vector<double> q75;

    std::size_t epochs() const { return median.size(); }
};

inline CurveAggregate aggregate_curves(const std::vector<std::vector<double>>& curves) {
    require(!curves.empty(), "aggregate_curves: no curves");
    const std::size_t n_epochs = curves.front().size();
    for (const auto& c : curves)
        require(c.size() == n_epochs, "aggregate_curves: ragged curves");
    CurveAggregate agg;
    agg.median.reserve(n_epochs);
    agg.q25.reserve(n_epochs);
    agg.q75.reserve(n_epochs);
    std::vector<double> column(curves.size());
    for (std::size_t e = 0; e < n_epochs; ++e) {
        for (std::size_t t = 0; t < curves.size(); ++t) column[t] = curves[t][e];
        agg.q25.push_back(quantile(column, 0.25));
        agg.median.push_back(quantile(column, 0.5));
        agg.q75.push_back(quantile(column, 0.75));
    }
    return agg;
}

namespace detail {
// Average ranks (1-based), ties get the mean of their rank block.
inline std::vector<double> ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}
}  // namespace detail

// Spearman rank correlation with average-rank tie handling. Returns 0 when
// either side is constant (no orderable trend).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "spearman: need matched lists, n >= 2");
    const auto rx = detail::ranks(x);
    const auto ry = detail::ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// First (fractional) epoch index at which the curve reaches `level`, with
// linear interpolation between epochs; nullopt when never reached.
// Epoch e here means "after e+1 epochs of training" for e starting at 0.
inline std::optional<double> epochs_to_reach(const std::vector<double>& curve, double level) {
    for (std::size_t e = 0; e < curve.size(); ++e) {
        if (curve[e] >= level) {
            if (e == 0 || curve[e] == curve[e - 1]) return static_cast<double>(e);
            const double prev = curve[e - 1];
            const double frac = (level - prev) / (curve[e] - prev);
            return static_cast<double>(e - 1) + frac;
        }
    }
    return std::nullopt;
}

}  // namespace hrl
