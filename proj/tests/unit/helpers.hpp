/* Copyright 2026 The supreg Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Independent reference computations shared by the unit tests. Nothing here
// calls the code under test for the quantity it checks.

#include <supreg/market_data.hpp>
#include <supreg/pelt.hpp>
#include <supreg/pwlf.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace supreg::testing {

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma = 1.0,
                                    double mean = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(mean, sigma);
    std::vector<double> v(n);
    for (auto& x : v)
        x = d(rng);
    return v;
}

inline std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v)
        x = d(rng);
    return v;
}

/// Two-pass sum of squared deviations from the mean of v[a..b].
inline double naive_ssd(const std::vector<double>& v, std::size_t a, std::size_t b) {
    double mean = 0.0;
    for (std::size_t t = a; t <= b; ++t)
        mean += v[t];
    mean /= static_cast<double>(b - a + 1);
    double s = 0.0;
    for (std::size_t t = a; t <= b; ++t)
        s += (v[t] - mean) * (v[t] - mean);
    return s;
}

/// Segment cost backed by an arbitrary function.
class FunctionCost final : public SegmentCost {
public:
    FunctionCost(std::size_t days, std::size_t min_len,
                 std::function<double(std::size_t, std::size_t)> fn)
        : days_(days), min_len_(min_len), fn_(std::move(fn)) {}

    double cost(std::size_t a, std::size_t b) const override {
        ++calls;
        return fn_(a, b);
    }
    std::size_t min_segment_length() const override { return min_len_; }
    std::size_t days() const override { return days_; }

    mutable std::size_t calls = 0;

private:
    std::size_t days_;
    std::size_t min_len_;
    std::function<double(std::size_t, std::size_t)> fn_;
};

/// Optimal partitioning without pruning: O(n^2) dynamic program over every
/// admissible last segment.
struct OptimalPartition {
    double objective = 0.0; // sum of costs + penalty * regimes
    std::vector<std::size_t> changepoints;
};

inline OptimalPartition optimal_partition(const SegmentCost& cost, std::size_t n, double penalty) {
    const std::size_t L = std::max<std::size_t>(cost.min_segment_length(), 1);
    std::vector<double> f(n + 1, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> prev(n + 1, 0);
    f[0] = 0.0;
    for (std::size_t t = 1; t <= n; ++t)
        for (std::size_t s = 0; s + L <= t; ++s) {
            if (!std::isfinite(f[s]))
                continue;
            const double v = f[s] + cost.cost(s, t - 1) + penalty;
            if (v < f[t]) {
                f[t] = v;
                prev[t] = s;
            }
        }
    OptimalPartition out;
    out.objective = f[n];
    for (std::size_t t = n; t > 0; t = prev[t])
        if (prev[t] > 0)
            out.changepoints.push_back(prev[t] - 1);
    std::reverse(out.changepoints.begin(), out.changepoints.end());
    return out;
}

/// Slope-clamped simple regression: intercept reported at min(x).
struct LineFit {
    double slope = 0.0;
    double value_at_min = 0.0;
    double ssr = 0.0;
};

inline LineFit clamped_regression(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    LineFit f;
    f.slope = std::max(0.0, sxy / sxx);
    const double xmin = *std::min_element(x.begin(), x.end());
    f.value_at_min = my + f.slope * (xmin - mx);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (my + f.slope * (x[i] - mx));
        f.ssr += r * r;
    }
    return f;
}

/// Per-segment evaluation: find the segment containing q and use its line.
inline double segmentwise_value(const pwlf::PiecewiseLinearCurve& c, double q) {
    const auto slopes = c.segment_slopes();
    double value = c.intercept;
    if (q <= c.breakpoints.front())
        return value + slopes.front() * (q - c.breakpoints.front());
    for (std::size_t j = 0; j + 1 < c.breakpoints.size(); ++j) {
        const double lo = c.breakpoints[j], hi = c.breakpoints[j + 1];
        if (q <= hi || j + 2 == c.breakpoints.size())
            return value + slopes[j] * (q - lo);
        value += slopes[j] * (hi - lo);
    }
    return value;
}

inline double residual_ssr(const pwlf::PiecewiseLinearCurve& c, const std::vector<double>& x,
                           const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - segmentwise_value(c, x[i]);
        s += r * r;
    }
    return s;
}

/// Equilibria with `hours` entries per day from per-day generators.
inline EquilibriumSeries make_series(std::size_t days, int hours,
                                     const std::function<std::pair<double, double>(std::size_t, int)>& qp) {
    std::vector<Equilibrium> obs;
    std::vector<Date> dates;
    const Date start{std::chrono::year{2020} / 1 / 1};
    for (std::size_t d = 0; d < days; ++d) {
        dates.push_back(start + std::chrono::days{static_cast<long>(d)});
        for (int h = 0; h < hours; ++h) {
            auto [q, p] = qp(d, h);
            obs.push_back({d, h, p, q});
        }
    }
    return EquilibriumSeries(std::move(obs), std::move(dates));
}

/// Random monotone curve on [lo, hi] with `k` interior breakpoints.
inline pwlf::PiecewiseLinearCurve random_curve(std::mt19937_64& rng, double lo, double hi,
                                               std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> b{lo};
    std::vector<double> interior;
    for (std::size_t i = 0; i < k; ++i)
        interior.push_back(lo + (hi - lo) * u(rng));
    std::sort(interior.begin(), interior.end());
    b.insert(b.end(), interior.begin(), interior.end());
    b.push_back(hi);
    std::vector<double> slopes;
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        slopes.push_back(3.0 * u(rng) * u(rng));
    return pwlf::PiecewiseLinearCurve::from_slopes(b, 100.0 * u(rng) - 20.0, slopes);
}

/// Trapezoid rule on `points` evenly spaced samples.
inline double trapezoid(const std::function<double(double)>& f, double lo, double hi,
                        std::size_t points) {
    const double h = (hi - lo) / static_cast<double>(points - 1);
    double s = 0.5 * (f(lo) + f(hi));
    for (std::size_t i = 1; i + 1 < points; ++i)
        s += f(lo + h * static_cast<double>(i));
    return s * h;
}

} // namespace supreg::testing
