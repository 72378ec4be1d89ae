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

// Penalty sweeps, regime-count selection, per-regime supply curves and
// pairwise curve dissimilarity.

#include <supreg/cost.hpp>
#include <supreg/market_data.hpp>
#include <supreg/pelt.hpp>
#include <supreg/pwlf.hpp>

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace supreg::regimes {

struct SweepPoint {
    double penalty = 0.0;
    std::size_t regime_count = 0;
    /// Sum of segment costs, penalty excluded.
    double cost = 0.0;
    double unexplained_ratio = 1.0;
    pelt::Segmentation segmentation;
};

struct ThresholdResolution {
    /// Fraction of variance to explain, in [0, 1).
    double threshold = 0.0;
    std::size_t regime_count = 1;
    bool interpolated = false;
    /// Real-valued crossing before rounding up; equals regime_count when
    /// observed directly.
    double interpolated_count = 1.0;
    /// Closest observed count achieving the threshold, when interpolated.
    std::optional<std::size_t> nearest_observed;
};

struct SweepResult {
    /// One point per grid value, in grid order.
    std::vector<SweepPoint> runs;
    /// One point per distinct regime count (the cheapest), ascending in m.
    std::vector<SweepPoint> points;
    double baseline = 0.0;
    std::map<double, ThresholdResolution> thresholds_resolved;
};

/// `count` log-spaced values from low_fraction * baseline to baseline.
std::vector<double> default_beta_grid(double baseline, std::size_t count = 60,
                                      double low_fraction = 1e-6);

SweepResult sweep_penalty(const SegmentCost& cost, std::size_t n_days, std::span<const double> grid,
                          pelt::CostCache& cache, const pelt::Options& options = {});
SweepResult sweep_penalty(const SegmentCost& cost, std::size_t n_days, std::span<const double> grid,
                          const pelt::Options& options = {});

/// Smallest regime count whose unexplained ratio is at most 1 - threshold.
/// Between two observed counts more than one apart the crossing is found by
/// linear interpolation of (m, ratio) and rounded up.
ThresholdResolution resolve_threshold(const SweepResult& sweep, double threshold);

/// Resolves every threshold and stores it in `sweep.thresholds_resolved`.
void resolve_thresholds(SweepResult& sweep, std::span<const double> thresholds);

/// Penalty from a local noise estimate: factor * (params + 1) * sigma2 *
/// log(observations), where sigma2 is the median residual variance over
/// disjoint windows of `window_days` days. Windows straddling a shift are
/// outvoted by the median.
double noise_penalty(const CauseCost& cost, std::size_t n_days, std::size_t window_days = 5,
                     double factor = 2.0);
double noise_penalty(const EffectCost& cost, std::size_t n_days, std::size_t window_days = 5,
                     double factor = 2.0);

struct TargetResult {
    pelt::Segmentation segmentation;
    bool exact = false;
    double penalty = 0.0;
    /// When not exact: the closest attained counts below and above the
    /// target, with their segmentations.
    std::optional<pelt::Segmentation> below;
    std::optional<pelt::Segmentation> above;
};

/// Bisects the penalty (geometrically) until the segmentation has
/// `target_regimes` regimes. When no penalty attains it, `segmentation` is
/// the bracketing result closest to the target (ties to the larger count).
TargetResult segment_to_count(const SegmentCost& cost, std::size_t n_days,
                              std::size_t target_regimes, pelt::CostCache& cache,
                              const pelt::Options& options = {}, std::size_t max_iterations = 200);

struct Support {
    double lower = 0.0;
    double upper = 0.0;
    double width() const noexcept { return upper - lower; }
};

struct RegimeCurve {
    std::size_t first_day = 0;
    std::size_t last_day = 0;
    std::size_t hours = 0;
    /// Share of all hours in the segmentation.
    double coverage = 0.0;
    pwlf::FitReport fit;
    /// Residual-load range observed in the regime; the curve is only
    /// supported by data inside it.
    Support support;
};

struct RegimeCurveSet {
    pelt::Segmentation segmentation;
    CurveSpec spec;
    std::vector<RegimeCurve> regimes;
    std::vector<Date> dates;
};

RegimeCurveSet fit_regime_curves(const EquilibriumSeries& equilibria,
                                 const pelt::Segmentation& segmentation, const CurveSpec& spec,
                                 const pwlf::SearchConfig& search = {});
/// Same, reusing fits memoized by the effect cost.
RegimeCurveSet fit_regime_curves(const EffectCost& cost, const pelt::Segmentation& segmentation);

enum class SupportPolicy { Intersection, Union };

SupportPolicy parse_support_policy(std::string_view text);
std::string_view to_string(SupportPolicy policy) noexcept;

struct CurveDistance {
    /// Integral of |a - b| over the support.
    double area = 0.0;
    /// area / support width, EUR/MWh.
    double mean_abs = 0.0;
    Support support;
};

/// Exact integral of |a(q) - b(q)| over the policy support. Under Union the
/// curves are extended linearly beyond their breakpoints.
CurveDistance curve_distance(const pwlf::PiecewiseLinearCurve& a,
                             const pwlf::PiecewiseLinearCurve& b, Support support_a,
                             Support support_b, SupportPolicy policy = SupportPolicy::Intersection);

struct SimilarityMatrix {
    std::size_t size = 0;
    SupportPolicy policy = SupportPolicy::Intersection;
    /// Row-major size x size; absent where supports do not overlap.
    std::vector<std::optional<double>> mean_abs;
    std::vector<std::optional<double>> area;
    /// Per regime, the most similar regime that is not a neighbour in time.
    std::vector<std::optional<std::size_t>> nearest_non_adjacent;

    const std::optional<double>& at(std::size_t i, std::size_t j) const {
        return mean_abs[i * size + j];
    }
};

SimilarityMatrix similarity_matrix(std::span<const pwlf::PiecewiseLinearCurve> curves,
                                   std::span<const Support> supports,
                                   SupportPolicy policy = SupportPolicy::Intersection);
SimilarityMatrix similarity_matrix(const RegimeCurveSet& set,
                                   SupportPolicy policy = SupportPolicy::Intersection);

} // namespace supreg::regimes
