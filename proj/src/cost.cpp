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
#include <supreg/cost.hpp>

#include <supreg/error.hpp>

#include <cmath>
#include <numeric>
#include <string>

namespace supreg {

SpecId parse_spec_id(std::string_view token) {
    if (token == "C1") return SpecId::C1;
    if (token == "C2") return SpecId::C2;
    if (token == "C3") return SpecId::C3;
    if (token == "E1") return SpecId::E1;
    if (token == "E2") return SpecId::E2;
    if (token == "E3") return SpecId::E3;
    throw Error(ErrorCode::InvalidArgument, "unknown specification '" + std::string(token) + "'");
}

std::string_view to_string(SpecId id) noexcept {
    switch (id) {
    case SpecId::C1: return "C1";
    case SpecId::C2: return "C2";
    case SpecId::C3: return "C3";
    case SpecId::E1: return "E1";
    case SpecId::E2: return "E2";
    case SpecId::E3: return "E3";
    }
    return "?";
}

bool is_cause_driven(SpecId id) noexcept {
    return id == SpecId::C1 || id == SpecId::C2 || id == SpecId::C3;
}

PanelSpec panel_spec(SpecId id) {
    switch (id) {
    case SpecId::C1: return PanelSpec::C1;
    case SpecId::C2: return PanelSpec::C2;
    case SpecId::C3: return PanelSpec::C3;
    default: break;
    }
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(id)) + " is not cause-driven");
}

CauseCost::CauseCost(DriverPanel panel, std::size_t min_segment_length)
    : panel_(std::move(panel)), min_len_(std::max<std::size_t>(min_segment_length, 1)) {
    if (panel_.drivers.empty())
        throw Error(ErrorCode::EmptyInput, "cause cost needs at least one driver");
    days_ = panel_.days();
    if (days_ == 0)
        throw Error(ErrorCode::EmptyInput, "cause cost drivers are empty");
    for (const auto& d : panel_.drivers) {
        if (d.values.size() != days_)
            throw Error(ErrorCode::InvalidArgument, "driver '" + d.name + "' has a different length");
        const long double mean =
            std::accumulate(d.values.begin(), d.values.end(), 0.0L) / static_cast<long double>(days_);
        std::vector<long double> s(days_ + 1, 0.0L), s2(days_ + 1, 0.0L);
        for (std::size_t t = 0; t < days_; ++t) {
            if (!std::isfinite(d.values[t]))
                throw Error(ErrorCode::NonFinite, "driver '" + d.name + "' has non-finite values");
            const long double c = static_cast<long double>(d.values[t]) - mean;
            s[t + 1] = s[t] + c;
            s2[t + 1] = s2[t] + c * c;
        }
        sum_.push_back(std::move(s));
        sum_sq_.push_back(std::move(s2));
    }
}

double CauseCost::cost(std::size_t first_day, std::size_t last_day) const {
    if (first_day > last_day || last_day >= days_)
        throw Error(ErrorCode::OutOfRange, "segment [" + std::to_string(first_day) + ", " +
                                               std::to_string(last_day) + "] outside " +
                                               std::to_string(days_) + " days");
    if (first_day == last_day)
        return 0.0;
    const long double len = static_cast<long double>(last_day - first_day + 1);
    long double total = 0.0L;
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        const long double s = sum_[i][last_day + 1] - sum_[i][first_day];
        const long double s2 = sum_sq_[i][last_day + 1] - sum_sq_[i][first_day];
        const long double ssd = s2 - s * s / len;
        total += ssd > 0.0L ? ssd : 0.0L;
    }
    return static_cast<double>(total);
}

CurveSpec CurveSpec::e1() { return CurveSpec{CurveKind::E1, 0, 0.01}; }
CurveSpec CurveSpec::e2() { return CurveSpec{CurveKind::E2, 2, 0.01}; }
CurveSpec CurveSpec::e3(double min_rel_improvement) {
    if (!(min_rel_improvement > 0.0 && min_rel_improvement < 1.0))
        throw Error(ErrorCode::InvalidArgument, "E3 threshold must lie in (0, 1)");
    return CurveSpec{CurveKind::E3, 2, min_rel_improvement};
}

CurveSpec curve_spec_for(SpecId id) {
    switch (id) {
    case SpecId::E1: return CurveSpec::e1();
    case SpecId::E2: return CurveSpec::e2();
    case SpecId::E3: return CurveSpec::e3();
    default: break;
    }
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(id)) + " is not effect-driven");
}

std::string_view to_string(CurveKind kind) noexcept {
    switch (kind) {
    case CurveKind::E1: return "E1";
    case CurveKind::E2: return "E2";
    case CurveKind::E3: return "E3";
    }
    return "?";
}

pwlf::FitReport fit_curve(std::span<const double> x, std::span<const double> y,
                          const CurveSpec& spec, const pwlf::SearchConfig& search) {
    switch (spec.kind) {
    case CurveKind::E1:
        return pwlf::fit_fixed(x, y, 0, search);
    case CurveKind::E2:
        return pwlf::fit_fixed(x, y, spec.max_interior, search);
    case CurveKind::E3:
        return pwlf::fit_adaptive(x, y, spec.max_interior, spec.min_rel_improvement, search);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown curve kind");
}

EffectCost::EffectCost(EquilibriumSeries series, CurveSpec spec, pwlf::SearchConfig search,
                       std::size_t min_segment_length)
    : series_(std::move(series)), spec_(spec), search_(search),
      min_len_(std::max<std::size_t>(min_segment_length, 1)) {
    if (series_.days() == 0)
        throw Error(ErrorCode::EmptyInput, "effect cost needs equilibria");
    if (spec_.kind == CurveKind::E3 &&
        !(spec_.min_rel_improvement > 0.0 && spec_.min_rel_improvement < 1.0))
        throw Error(ErrorCode::InvalidArgument, "E3 threshold must lie in (0, 1)");
}

std::shared_ptr<const pwlf::FitReport> EffectCost::fit(std::size_t first_day,
                                                       std::size_t last_day) const {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(first_day) << 32) | static_cast<std::uint64_t>(last_day);
    {
        std::lock_guard lock(mutex_);
        auto it = fits_.find(key);
        if (it != fits_.end())
            return it->second;
    }
    std::vector<double> x, y;
    series_.collect(first_day, last_day, x, y);
    if (x.size() < spec_.min_points())
        throw Error(ErrorCode::TooFewPoints,
                    std::to_string(x.size()) + " hours in days [" + std::to_string(first_day) +
                        ", " + std::to_string(last_day) + "], need " +
                        std::to_string(spec_.min_points()));
    auto report = std::make_shared<const pwlf::FitReport>(fit_curve(x, y, spec_, search_));
    std::lock_guard lock(mutex_);
    return fits_.emplace(key, std::move(report)).first->second;
}

double EffectCost::cost(std::size_t first_day, std::size_t last_day) const {
    return fit(first_day, last_day)->ssr;
}

std::size_t EffectCost::cached_fits() const {
    std::lock_guard lock(mutex_);
    return fits_.size();
}

double baseline_cost(const SegmentCost& cost, std::size_t n_days) {
    if (n_days == 0 || n_days < cost.min_segment_length())
        throw Error(ErrorCode::TooShort, "sample shorter than the minimum segment");
    return cost.cost(0, n_days - 1);
}

} // namespace supreg
