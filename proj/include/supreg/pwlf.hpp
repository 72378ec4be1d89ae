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

// Continuous piecewise-linear least squares with non-negative segment slopes.
//
// A curve with breakpoints b_1 <= ... <= b_K is written in the hinge basis
//
//     f(q) = intercept + sum_{j=1}^{K-1} inc_j * max(0, q - b_j)
//
// so segment j (between b_j and b_{j+1}) has slope s_j = inc_1 + ... + inc_j.
// Fits pin b_1 and b_K to the data range and require every s_j >= 0.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace supreg::pwlf {

struct PiecewiseLinearCurve {
    std::vector<double> breakpoints;      // K >= 2, sorted
    double intercept = 0.0;               // value at breakpoints.front()
    std::vector<double> slope_increments; // K - 1 entries

    static PiecewiseLinearCurve from_slopes(std::vector<double> breakpoints, double intercept,
                                            std::span<const double> slopes);

    std::vector<double> segment_slopes() const;
    std::size_t interior_count() const noexcept;
    double lower() const { return breakpoints.front(); }
    double upper() const { return breakpoints.back(); }
};

/// Value at q. Beyond the breakpoint range the first/last segment is
/// extended linearly; callers decide whether to flag extrapolation.
double evaluate(const PiecewiseLinearCurve& curve, double q);

struct FitReport {
    PiecewiseLinearCurve curve;
    double ssr = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
    std::size_t k_interior = 0;
};

/// Effort of the outer breakpoint search. All members are deterministic
/// knobs; equal configs give bitwise-equal fits.
struct SearchConfig {
    /// Largest number of breakpoint configurations scored in the start
    /// stage. When every midpoint configuration fits in the budget the start
    /// stage is an exhaustive grid over midpoints of distinct x values.
    std::size_t grid_budget = 1280;
    /// Extra starts drawn from a rotated Halton sequence.
    std::size_t halton_starts = 8;
    /// Best starts carried into local refinement.
    std::size_t refine_starts = 4;
    /// Cap on coordinate-descent sweeps per start.
    std::size_t max_sweeps = 64;
    std::uint64_t seed = 0x5eedULL;

    /// Cheaper profile for long sweeps on large data.
    static SearchConfig fast();
};

inline constexpr std::size_t kMaxInterior = 12;

/// Least-squares curve with exactly `k_interior` interior breakpoints
/// (before collapsing coincident ones). Needs |x| >= 2 (k_interior + 2).
FitReport fit_fixed(std::span<const double> x, std::span<const double> y, std::size_t k_interior,
                    const SearchConfig& search = {});

/// Adds interior breakpoints one at a time while each addition lowers the
/// SSR by at least `min_rel_improvement` of the previous SSR.
FitReport fit_adaptive(std::span<const double> x, std::span<const double> y, std::size_t k_max,
                       double min_rel_improvement, const SearchConfig& search = {});

/// Inner problem only: best intercept and non-negative slopes for the given
/// breakpoints (first = min(x), last = max(x)), solved on the explicit
/// design matrix. Coincident breakpoints are kept as given.
FitReport solve_fixed_breakpoints(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> breakpoints);

/// Drops zero-width segments.
PiecewiseLinearCurve collapse(const PiecewiseLinearCurve& curve);

double sum_of_squares(std::span<const double> y);

} // namespace supreg::pwlf
