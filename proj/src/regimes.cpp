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
#include <supreg/regimes.hpp>

#include <supreg/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace supreg::regimes {

std::vector<double> default_beta_grid(double baseline, std::size_t count, double low_fraction) {
    if (count == 0)
        throw Error(ErrorCode::InvalidArgument, "penalty grid needs at least one point");
    if (!(low_fraction > 0.0 && low_fraction <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "grid low fraction must lie in (0, 1]");
    if (!std::isfinite(baseline) || baseline < 0.0)
        throw Error(ErrorCode::NonFinite, "baseline cost must be finite and >= 0");
    // a constant sample has nothing to explain; any positive penalty gives m = 1
    const double top = baseline > 0.0 ? baseline : 1.0;
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = top;
        return grid;
    }
    const double lo = std::log(top * low_fraction);
    const double hi = std::log(top);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    grid.back() = top;
    return grid;
}

namespace {

double ratio_of(double cost, double baseline, std::size_t m) {
    if (m == 1 || baseline <= 0.0)
        return 1.0;
    return std::clamp(cost / baseline, 0.0, 1.0);
}

} // namespace

SweepResult sweep_penalty(const SegmentCost& cost, std::size_t n_days, std::span<const double> grid,
                          pelt::CostCache& cache, const pelt::Options& options) {
    if (grid.empty())
        throw Error(ErrorCode::InvalidArgument, "penalty grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] <= 0.0)
            throw Error(ErrorCode::InvalidArgument, "penalties must be positive and finite");
        if (i > 0 && grid[i] < grid[i - 1])
            throw Error(ErrorCode::InvalidArgument, "penalty grid must be sorted ascending");
    }
    SweepResult result;
    result.baseline = cache.get(cost, 0, n_days - 1);

    for (double beta : grid) {
        SweepPoint p;
        p.penalty = beta;
        p.segmentation = pelt::segment_with_cache(cost, n_days, beta, cache, options);
        p.regime_count = p.segmentation.regime_count();
        p.cost = pelt::segments_cost(cost, p.segmentation, cache);
        p.unexplained_ratio = ratio_of(p.cost, result.baseline, p.regime_count);
        result.runs.push_back(std::move(p));
    }

    std::map<std::size_t, const SweepPoint*> cheapest;
    for (const auto& p : result.runs) {
        auto [it, inserted] = cheapest.emplace(p.regime_count, &p);
        if (!inserted && p.cost < it->second->cost)
            it->second = &p;
    }
    for (const auto& [m, p] : cheapest)
        result.points.push_back(*p);
    return result;
}

SweepResult sweep_penalty(const SegmentCost& cost, std::size_t n_days, std::span<const double> grid,
                          const pelt::Options& options) {
    pelt::CostCache cache;
    return sweep_penalty(cost, n_days, grid, cache, options);
}

ThresholdResolution resolve_threshold(const SweepResult& sweep, double threshold) {
    if (!(threshold >= 0.0 && threshold < 1.0))
        throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 1)");
    if (sweep.points.empty())
        throw Error(ErrorCode::InvalidArgument, "sweep has no points");
    const double target = 1.0 - threshold;

    // the single-regime ratio is 1 by definition even when m = 1 was not swept
    std::vector<std::pair<std::size_t, double>> curve;
    if (sweep.points.front().regime_count != 1)
        curve.emplace_back(1, 1.0);
    for (const auto& p : sweep.points)
        curve.emplace_back(p.regime_count, p.unexplained_ratio);

    ThresholdResolution r;
    r.threshold = threshold;
    for (std::size_t j = 0; j < curve.size(); ++j) {
        const auto [mj, rj] = curve[j];
        if (rj > target)
            continue;
        r.regime_count = mj;
        r.interpolated_count = static_cast<double>(mj);
        if (j == 0)
            return r;
        const auto [mi, ri] = curve[j - 1];
        if (mj - mi <= 1)
            return r;
        const double span = static_cast<double>(mj - mi);
        const double m_star = static_cast<double>(mi) + (ri - target) / (ri - rj) * span;
        // the ceiling of a value a rounding error above an integer is that integer
        const double rounded = std::ceil(m_star - 1e-9 * static_cast<double>(mj));
        r.interpolated = true;
        r.interpolated_count = m_star;
        r.regime_count = std::clamp(static_cast<std::size_t>(std::max(rounded, 1.0)), mi + 1, mj);
        r.nearest_observed = mj;
        return r;
    }
    throw Error(ErrorCode::Unreachable,
                "no swept regime count explains " + std::to_string(threshold * 100.0) +
                    "% (lowest unexplained ratio " + std::to_string(curve.back().second) + ")");
}

void resolve_thresholds(SweepResult& sweep, std::span<const double> thresholds) {
    for (double t : thresholds)
        sweep.thresholds_resolved[t] = resolve_threshold(sweep, t);
}

namespace {

double median(std::vector<double> v) {
    if (v.empty())
        throw Error(ErrorCode::TooShort, "sample shorter than one noise window");
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1)
        return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

double window_penalty(const SegmentCost& cost, std::size_t n_days, std::size_t window_days,
                      double factor, double params, double observations,
                      const std::function<double(std::size_t, std::size_t)>& dof) {
    if (window_days < std::max<std::size_t>(cost.min_segment_length(), 2))
        throw Error(ErrorCode::InvalidArgument, "noise window shorter than a segment");
    if (!(factor > 0.0))
        throw Error(ErrorCode::InvalidArgument, "penalty factor must be positive");
    std::vector<double> variances;
    for (std::size_t a = 0; a + window_days <= n_days; a += window_days) {
        const std::size_t b = a + window_days - 1;
        const double df = dof(a, b);
        if (df > 0.0)
            variances.push_back(cost.cost(a, b) / df);
    }
    const double sigma2 = median(std::move(variances));
    return factor * (params + 1.0) * sigma2 * std::log(std::max(observations, 2.0));
}

} // namespace

double noise_penalty(const CauseCost& cost, std::size_t n_days, std::size_t window_days,
                     double factor) {
    const double drivers = static_cast<double>(cost.panel().drivers.size());
    return window_penalty(cost, n_days, window_days, factor, drivers,
                          static_cast<double>(n_days),
                          [&](std::size_t a, std::size_t b) {
                              return drivers * static_cast<double>(b - a);
                          });
}

double noise_penalty(const EffectCost& cost, std::size_t n_days, std::size_t window_days,
                     double factor) {
    const double params = 2.0 + 2.0 * static_cast<double>(cost.spec().max_interior);
    return window_penalty(cost, n_days, window_days, factor, params,
                          static_cast<double>(cost.series().hours_in(0, n_days - 1)),
                          [&](std::size_t a, std::size_t b) {
                              return static_cast<double>(cost.series().hours_in(a, b)) - params;
                          });
}

TargetResult segment_to_count(const SegmentCost& cost, std::size_t n_days,
                              std::size_t target_regimes, pelt::CostCache& cache,
                              const pelt::Options& options, std::size_t max_iterations) {
    if (target_regimes == 0)
        throw Error(ErrorCode::InvalidArgument, "target regime count must be positive");
    const double baseline = cache.get(cost, 0, n_days - 1);
    auto run = [&](double beta) { return pelt::segment_with_cache(cost, n_days, beta, cache, options); };

    TargetResult out;
    // beyond the baseline a second regime can never pay for itself
    double hi = 2.0 * baseline + 1.0;
    pelt::Segmentation seg_hi = run(hi);
    if (seg_hi.regime_count() == target_regimes) {
        out.segmentation = seg_hi;
        out.exact = true;
        out.penalty = hi;
        return out;
    }
    double lo = 0.0;
    pelt::Segmentation seg_lo = run(lo);
    if (seg_lo.regime_count() == target_regimes) {
        out.segmentation = seg_lo;
        out.exact = true;
        out.penalty = lo;
        return out;
    }
    if (seg_lo.regime_count() < target_regimes) {
        out.segmentation = seg_lo;
        out.penalty = lo;
        out.below = seg_lo;
        return out;
    }

    for (std::size_t it = 0; it < max_iterations; ++it) {
        double mid;
        if (lo == 0.0)
            mid = hi > 1e-300 ? hi * 1e-3 : hi * 0.5;
        else
            mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi))
            break;
        pelt::Segmentation seg = run(mid);
        const std::size_t m = seg.regime_count();
        if (m == target_regimes) {
            out.segmentation = std::move(seg);
            out.exact = true;
            out.penalty = mid;
            return out;
        }
        if (m > target_regimes) {
            lo = mid;
            seg_lo = std::move(seg);
        } else {
            hi = mid;
            seg_hi = std::move(seg);
        }
        if (lo > 0.0 && hi / lo - 1.0 < 1e-12)
            break;
    }
    out.below = seg_hi;
    out.above = seg_lo;
    const std::size_t gap_below = target_regimes - seg_hi.regime_count();
    const std::size_t gap_above = seg_lo.regime_count() - target_regimes;
    if (gap_above <= gap_below) {
        out.segmentation = seg_lo;
        out.penalty = lo;
    } else {
        out.segmentation = seg_hi;
        out.penalty = hi;
    }
    return out;
}

namespace {

RegimeCurveSet fit_set(const EquilibriumSeries& equilibria, const pelt::Segmentation& segmentation,
                       const CurveSpec& spec,
                       const std::function<pwlf::FitReport(std::size_t, std::size_t)>& fit) {
    if (segmentation.n_days != equilibria.days())
        throw Error(ErrorCode::InvalidArgument,
                    "segmentation covers " + std::to_string(segmentation.n_days) +
                        " days, equilibria " + std::to_string(equilibria.days()));
    RegimeCurveSet set;
    set.segmentation = segmentation;
    set.spec = spec;
    set.dates = equilibria.dates();
    const double total_hours = static_cast<double>(equilibria.hours());
    std::size_t index = 0;
    for (auto [first, last] : segmentation.regimes()) {
        ++index;
        RegimeCurve rc;
        rc.first_day = first;
        rc.last_day = last;
        rc.hours = equilibria.hours_in(first, last);
        rc.coverage = total_hours > 0.0 ? static_cast<double>(rc.hours) / total_hours : 0.0;
        if (rc.hours < spec.min_points())
            throw Error(ErrorCode::TooFewPoints,
                        "regime " + std::to_string(index) + " has " + std::to_string(rc.hours) +
                            " hours, need " + std::to_string(spec.min_points()));
        try {
            rc.fit = fit(first, last);
        } catch (const Error& e) {
            throw Error(e.code(), "regime " + std::to_string(index) + ": " + e.what());
        }
        auto obs = equilibria.day_range(first, last);
        auto [lo, hi] = std::minmax_element(obs.begin(), obs.end(), [](const auto& a, const auto& b) {
            return a.residual_load < b.residual_load;
        });
        rc.support = {lo->residual_load, hi->residual_load};
        set.regimes.push_back(std::move(rc));
    }
    return set;
}

} // namespace

RegimeCurveSet fit_regime_curves(const EquilibriumSeries& equilibria,
                                 const pelt::Segmentation& segmentation, const CurveSpec& spec,
                                 const pwlf::SearchConfig& search) {
    return fit_set(equilibria, segmentation, spec, [&](std::size_t first, std::size_t last) {
        std::vector<double> x, y;
        equilibria.collect(first, last, x, y);
        return fit_curve(x, y, spec, search);
    });
}

RegimeCurveSet fit_regime_curves(const EffectCost& cost, const pelt::Segmentation& segmentation) {
    return fit_set(cost.series(), segmentation, cost.spec(),
                   [&](std::size_t first, std::size_t last) { return *cost.fit(first, last); });
}

SupportPolicy parse_support_policy(std::string_view text) {
    if (text == "intersection")
        return SupportPolicy::Intersection;
    if (text == "union")
        return SupportPolicy::Union;
    throw Error(ErrorCode::InvalidArgument, "unknown support policy '" + std::string(text) + "'");
}

std::string_view to_string(SupportPolicy policy) noexcept {
    return policy == SupportPolicy::Intersection ? "intersection" : "union";
}

CurveDistance curve_distance(const pwlf::PiecewiseLinearCurve& a,
                             const pwlf::PiecewiseLinearCurve& b, Support support_a,
                             Support support_b, SupportPolicy policy) {
    CurveDistance out;
    if (policy == SupportPolicy::Intersection)
        out.support = {std::max(support_a.lower, support_b.lower),
                       std::min(support_a.upper, support_b.upper)};
    else
        out.support = {std::min(support_a.lower, support_b.lower),
                       std::max(support_a.upper, support_b.upper)};
    if (!std::isfinite(out.support.lower) || !std::isfinite(out.support.upper))
        throw Error(ErrorCode::NonFinite, "curve support is not finite");
    if (!(out.support.upper > out.support.lower))
        throw Error(ErrorCode::EmptyOverlap, "curve supports do not overlap");

    const double lo = out.support.lower;
    const double hi = out.support.upper;
    std::vector<double> knots{lo, hi};
    for (const auto* c : {&a, &b})
        for (double q : c->breakpoints)
            if (q > lo && q < hi)
                knots.push_back(q);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    double area = 0.0;
    double d_prev = pwlf::evaluate(a, knots[0]) - pwlf::evaluate(b, knots[0]);
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double u = knots[i - 1];
        const double v = knots[i];
        const double d = pwlf::evaluate(a, v) - pwlf::evaluate(b, v);
        const double w = v - u;
        if ((d_prev >= 0.0 && d >= 0.0) || (d_prev <= 0.0 && d <= 0.0)) {
            area += 0.5 * (std::abs(d_prev) + std::abs(d)) * w;
        } else {
            // the difference changes sign once inside the piece
            const double r = std::abs(d_prev) / (std::abs(d_prev) + std::abs(d)) * w;
            area += 0.5 * (std::abs(d_prev) * r + std::abs(d) * (w - r));
        }
        d_prev = d;
    }
    out.area = area;
    out.mean_abs = area / (hi - lo);
    return out;
}

SimilarityMatrix similarity_matrix(std::span<const pwlf::PiecewiseLinearCurve> curves,
                                   std::span<const Support> supports, SupportPolicy policy) {
    if (curves.size() != supports.size())
        throw Error(ErrorCode::InvalidArgument, "one support per curve required");
    if (curves.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "similarity needs at least two regimes");
    const std::size_t n = curves.size();
    SimilarityMatrix s;
    s.size = n;
    s.policy = policy;
    s.mean_abs.assign(n * n, std::nullopt);
    s.area.assign(n * n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
        s.mean_abs[i * n + i] = 0.0;
        s.area[i * n + i] = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            try {
                const auto d = curve_distance(curves[i], curves[j], supports[i], supports[j], policy);
                s.mean_abs[i * n + j] = s.mean_abs[j * n + i] = d.mean_abs;
                s.area[i * n + j] = s.area[j * n + i] = d.area;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EmptyOverlap)
                    throw;
            }
        }
    }
    s.nearest_non_adjacent.assign(n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if ((i > j ? i - j : j - i) <= 1)
                continue;
            const auto& v = s.mean_abs[i * n + j];
            if (v && *v < best) {
                best = *v;
                s.nearest_non_adjacent[i] = j;
            }
        }
    }
    return s;
}

SimilarityMatrix similarity_matrix(const RegimeCurveSet& set, SupportPolicy policy) {
    std::vector<pwlf::PiecewiseLinearCurve> curves;
    std::vector<Support> supports;
    for (const auto& r : set.regimes) {
        curves.push_back(r.fit.curve);
        supports.push_back(r.support);
    }
    return similarity_matrix(curves, supports, policy);
}

} // namespace supreg::regimes
