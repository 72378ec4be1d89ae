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

// The two segment-cost families.
//
// Cause-driven (C1..C3): summed within-segment squared deviation of every
// daily driver from its segment mean.
//
// Effect-driven (E1..E3): SSR of a monotone piecewise-linear price curve
// fitted to all hourly (residual load, price) pairs of the segment.

#include <supreg/market_data.hpp>
#include <supreg/pelt.hpp>
#include <supreg/pwlf.hpp>

#include <memory>
#include <mutex>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace supreg {

enum class SpecId { C1, C2, C3, E1, E2, E3 };

SpecId parse_spec_id(std::string_view token);
std::string_view to_string(SpecId id) noexcept;
bool is_cause_driven(SpecId id) noexcept;
PanelSpec panel_spec(SpecId id);

class CauseCost final : public SegmentCost {
public:
    explicit CauseCost(DriverPanel panel, std::size_t min_segment_length = 1);

    double cost(std::size_t first_day, std::size_t last_day) const override;
    std::size_t min_segment_length() const override { return min_len_; }
    std::size_t days() const override { return days_; }

    const DriverPanel& panel() const noexcept { return panel_; }

private:
    DriverPanel panel_;
    std::size_t days_ = 0;
    std::size_t min_len_ = 1;
    // per driver, n + 1 prefix sums of centred values and their squares
    std::vector<std::vector<long double>> sum_;
    std::vector<std::vector<long double>> sum_sq_;
};

enum class CurveKind { E1, E2, E3 };

struct CurveSpec {
    CurveKind kind = CurveKind::E3;
    std::size_t max_interior = 2;
    double min_rel_improvement = 0.01;

    static CurveSpec e1();
    static CurveSpec e2();
    static CurveSpec e3(double min_rel_improvement = 0.01);

    /// Fewest points the fit accepts.
    std::size_t min_points() const noexcept { return 2 * (max_interior + 2); }
};

CurveSpec curve_spec_for(SpecId id);
std::string_view to_string(CurveKind kind) noexcept;

pwlf::FitReport fit_curve(std::span<const double> x, std::span<const double> y,
                          const CurveSpec& spec, const pwlf::SearchConfig& search);

class EffectCost final : public SegmentCost {
public:
    EffectCost(EquilibriumSeries series, CurveSpec spec, pwlf::SearchConfig search = {},
               std::size_t min_segment_length = 2);

    double cost(std::size_t first_day, std::size_t last_day) const override;
    std::size_t min_segment_length() const override { return min_len_; }
    std::size_t days() const override { return series_.days(); }

    /// Fitted curve of the segment; memoized so regime reports reuse the fits
    /// made during segmentation.
    std::shared_ptr<const pwlf::FitReport> fit(std::size_t first_day, std::size_t last_day) const;
    std::size_t cached_fits() const;

    const EquilibriumSeries& series() const noexcept { return series_; }
    const CurveSpec& spec() const noexcept { return spec_; }
    const pwlf::SearchConfig& search() const noexcept { return search_; }

private:
    EquilibriumSeries series_;
    CurveSpec spec_;
    pwlf::SearchConfig search_;
    std::size_t min_len_ = 2;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::uint64_t, std::shared_ptr<const pwlf::FitReport>> fits_;
};

/// Cost of the whole sample as one segment; the denominator of every
/// unexplained-variance ratio.
double baseline_cost(const SegmentCost& cost, std::size_t n_days);

} // namespace supreg
