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
#include <supreg/synth.hpp>

#include <supreg/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

namespace supreg::synth {

using namespace std::chrono;

std::size_t SyntheticScenario::days() const noexcept {
    std::size_t n = 0;
    for (const auto& r : regimes)
        n += r.days;
    return n;
}

namespace {

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::InvalidScenario, what);
}

void validate(const SyntheticScenario& s) {
    if (s.regimes.empty())
        invalid("scenario has no regimes");
    if (!(s.price_sigma >= 0.0) || !(s.driver_sigma >= 0.0) || !(s.demand.load_sigma_mw >= 0.0))
        invalid("noise standard deviations must be >= 0");
    if (!(s.demand.high_mw > s.demand.low_mw) || s.demand.low_mw < 0.0)
        invalid("demand range must satisfy 0 <= low < high");
    if (!(s.demand.weekend_factor > 0.0) || !(s.demand.seasonal_amplitude >= 0.0))
        invalid("weekend factor must be > 0 and seasonal amplitude >= 0");
    if (s.driver_names.empty())
        invalid("scenario needs at least one driver");
    for (std::size_t r = 0; r < s.regimes.size(); ++r) {
        const auto& reg = s.regimes[r];
        const std::string tag = "regime " + std::to_string(r + 1);
        if (reg.days == 0)
            invalid(tag + " has zero days");
        const auto& b = reg.curve.breakpoints;
        if (b.size() < 2 || reg.curve.slope_increments.size() + 1 != b.size())
            invalid(tag + " curve needs K >= 2 breakpoints and K - 1 slopes");
        if (!std::is_sorted(b.begin(), b.end()))
            invalid(tag + " breakpoints are not sorted");
        for (double slope : reg.curve.segment_slopes())
            if (!(slope >= 0.0))
                invalid(tag + " curve has a negative slope");
        if (!reg.driver_levels.empty() && reg.driver_levels.size() != s.driver_names.size())
            invalid(tag + " needs one driver level per driver");
    }
}

double mean_price(const pwlf::PiecewiseLinearCurve& curve, const DemandProcess& demand) {
    double sum = 0.0;
    constexpr int kSteps = 100;
    for (int i = 0; i <= kSteps; ++i)
        sum += pwlf::evaluate(curve, demand.low_mw + (demand.high_mw - demand.low_mw) * i / kSteps);
    return sum / (kSteps + 1);
}

} // namespace

GeneratedMarket generate(const SyntheticScenario& scenario) {
    validate(scenario);
    const auto& dem = scenario.demand;
    const double range = dem.high_mw - dem.low_mw;
    const std::size_t n = scenario.days();

    std::mt19937_64 rng(scenario.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    GeneratedMarket out;
    out.hourly.reserve(n * 24);
    std::vector<Date> dates(n);
    std::vector<std::vector<double>> driver_values(scenario.driver_names.size(),
                                                   std::vector<double>(n));

    std::size_t day = 0;
    for (std::size_t r = 0; r < scenario.regimes.size(); ++r) {
        const auto& reg = scenario.regimes[r];
        std::vector<double> levels = reg.driver_levels;
        if (levels.empty())
            levels.assign(scenario.driver_names.size(), mean_price(reg.curve, dem));
        for (std::size_t d = 0; d < reg.days; ++d, ++day) {
            const Date date = scenario.start + days{static_cast<long>(day)};
            dates[day] = date;
            const unsigned wd = weekday{date}.c_encoding();
            const bool weekend = wd == 0 || wd == 6;
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(day);
            const double seasonal = dem.seasonal_amplitude * range * std::cos(phase / 365.0);
            const double wind_level = 0.12 * range * (1.0 + 0.5 * std::sin(phase / 7.3));
            const double swing = range * (weekend ? dem.weekend_factor : 1.0);
            for (int h = 0; h < 24; ++h) {
                const double profile =
                    0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (h - 3) / 24.0);
                double q = dem.low_mw + swing * profile + seasonal;
                if (dem.load_sigma_mw > 0.0)
                    q += dem.load_sigma_mw * gauss(rng);
                HourlyObservation o;
                o.timestamp = HourStamp{date} + hours{h};
                o.solar = 0.15 * range * std::max(0.0, std::sin(std::numbers::pi * (h - 6) / 12.0));
                o.wind = wind_level;
                o.hydro_ror = 1500.0;
                o.load = std::max(0.0, q + o.wind + o.solar + o.hydro_ror);
                double price = pwlf::evaluate(reg.curve, o.residual_load());
                if (scenario.price_sigma > 0.0)
                    price += scenario.price_sigma * gauss(rng);
                o.price = price;
                out.hourly.push_back(o);
            }
            for (std::size_t i = 0; i < levels.size(); ++i) {
                double v = levels[i];
                if (scenario.driver_sigma > 0.0)
                    v += scenario.driver_sigma * gauss(rng);
                driver_values[i][day] = v;
            }
        }
        if (r + 1 < scenario.regimes.size())
            out.changepoints.push_back(day - 1);
    }

    out.equilibria = to_equilibrium_series(out.hourly, GapPolicy::Fail).series;
    for (std::size_t i = 0; i < scenario.driver_names.size(); ++i) {
        const auto& name = scenario.driver_names[i];
        std::vector<DatedValue> dated(n);
        for (std::size_t t = 0; t < n; ++t)
            dated[t] = {dates[t], driver_values[i][t]};
        out.dated_drivers[name] = std::move(dated);
        out.drivers[name] = DailyDriver{name, std::move(driver_values[i]), "EUR/MWh", Scale::Levels};
    }
    return out;
}

SyntheticScenario scenario_from_config(const Config& config) {
    SyntheticScenario s;
    s.seed = static_cast<std::uint64_t>(config.get_int("seed", 1));
    if (auto start = config.get("start_date"))
        s.start = parse_date(*start);
    s.price_sigma = config.get_double("price_sigma", 0.0);
    s.driver_sigma = config.get_double("driver_sigma", 0.0);
    if (auto names = config.get("drivers")) {
        s.driver_names.clear();
        std::string_view rest = *names;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            std::string token(rest.substr(0, comma));
            token.erase(0, token.find_first_not_of(" \t"));
            token.erase(token.find_last_not_of(" \t") + 1);
            if (!token.empty())
                s.driver_names.push_back(token);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }
    s.demand.low_mw = config.get_double("demand.low_mw", s.demand.low_mw);
    s.demand.high_mw = config.get_double("demand.high_mw", s.demand.high_mw);
    s.demand.weekend_factor = config.get_double("demand.weekend_factor", s.demand.weekend_factor);
    s.demand.seasonal_amplitude =
        config.get_double("demand.seasonal_amplitude", s.demand.seasonal_amplitude);
    s.demand.load_sigma_mw = config.get_double("demand.load_sigma_mw", s.demand.load_sigma_mw);

    const long count = config.get_int("regimes", 0);
    if (count <= 0)
        invalid("scenario key 'regimes' must be a positive count");
    for (long i = 1; i <= count; ++i) {
        const std::string prefix = "regime." + std::to_string(i) + ".";
        auto breakpoints = config.get_doubles(prefix + "breakpoints");
        auto slopes = config.get_doubles(prefix + "slopes");
        const long days = config.get_int(prefix + "days", 0);
        if (!breakpoints || !slopes || days <= 0)
            invalid(prefix + "{days,breakpoints,slopes} are required");
        if (slopes->size() + 1 != breakpoints->size())
            invalid(prefix + "slopes needs one entry fewer than breakpoints");
        RegimeSpec reg;
        reg.days = static_cast<std::size_t>(days);
        reg.curve = pwlf::PiecewiseLinearCurve::from_slopes(
            *breakpoints, config.get_double(prefix + "intercept", 0.0), *slopes);
        if (auto levels = config.get_doubles(prefix + "drivers"))
            reg.driver_levels = *levels;
        s.regimes.push_back(std::move(reg));
    }
    validate(s);
    return s;
}

SyntheticScenario three_regime_scenario(std::size_t days_each, double gap, double price_sigma,
                                        std::uint64_t seed) {
    const std::vector<double> bps{20000.0, 45000.0, 62000.0, 85000.0};
    const std::vector<double> slopes{0.0006, 0.002, 0.006};
    const double offsets[] = {0.0, gap, 0.0};
    SyntheticScenario s;
    s.seed = seed;
    s.price_sigma = price_sigma;
    s.driver_sigma = price_sigma;
    for (double offset : offsets) {
        RegimeSpec reg;
        reg.days = days_each;
        reg.curve = pwlf::PiecewiseLinearCurve::from_slopes(bps, 15.0 + offset, slopes);
        s.regimes.push_back(std::move(reg));
    }
    return s;
}

pelt::Segmentation brute_force_partition(const SegmentCost& cost, std::size_t n_days,
                                         double penalty) {
    if (n_days > kMaxBruteForceDays)
        throw Error(ErrorCode::TooLarge, std::to_string(n_days) + " days exceed the exhaustive limit of " +
                                             std::to_string(kMaxBruteForceDays));
    if (n_days == 0)
        throw Error(ErrorCode::TooShort, "nothing to partition");
    if (!(penalty >= 0.0) || !std::isfinite(penalty))
        throw Error(ErrorCode::InvalidArgument, "penalty must be finite and >= 0");
    const std::size_t min_len = std::max<std::size_t>(cost.min_segment_length(), 1);

    std::vector<double> memo(n_days * n_days, -1.0);
    auto seg_cost = [&](std::size_t a, std::size_t b) {
        double& v = memo[a * n_days + b];
        if (v < 0.0)
            v = cost.cost(a, b);
        return v;
    };

    bool found = false;
    double best_value = 0.0;
    std::vector<std::size_t> best_cps;
    const std::uint64_t masks = std::uint64_t{1} << (n_days - 1);
    std::vector<std::size_t> cps;
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        cps.clear();
        for (std::size_t d = 0; d + 1 < n_days; ++d)
            if (mask >> d & 1U)
                cps.push_back(d);
        // accumulate exactly as the recursion does: F(0) = -penalty
        double f = -penalty;
        std::size_t first = 0;
        bool ok = true;
        for (std::size_t i = 0; i <= cps.size() && ok; ++i) {
            const std::size_t last = i < cps.size() ? cps[i] : n_days - 1;
            if (last + 1 - first < min_len) {
                ok = false;
                break;
            }
            f = f + seg_cost(first, last) + penalty;
            first = last + 1;
        }
        if (!ok)
            continue;
        const double value = f + penalty;
        bool take = !found || value < best_value;
        if (found && value == best_value) {
            // later starts of the final segments win, compared from the end
            take = std::lexicographical_compare(best_cps.rbegin(), best_cps.rend(), cps.rbegin(),
                                                cps.rend());
        }
        if (take) {
            found = true;
            best_value = value;
            best_cps = cps;
        }
    }
    if (!found)
        throw Error(ErrorCode::TooShort, "no admissible segmentation");
    pelt::Segmentation seg;
    seg.changepoints = std::move(best_cps);
    seg.penalty = penalty;
    seg.total_cost = best_value;
    seg.n_days = n_days;
    return seg;
}

pwlf::FitReport grid_pwlf_oracle(std::span<const double> x, std::span<const double> y,
                                 std::size_t k_interior) {
    if (k_interior < 1 || k_interior > 2)
        throw Error(ErrorCode::InvalidArgument, "oracle supports one or two interior breakpoints");
    if (x.size() != y.size())
        throw Error(ErrorCode::InvalidArgument, "x and y differ in length");
    std::vector<double> u(x.begin(), x.end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    if (u.size() > kMaxOracleDistinct)
        throw Error(ErrorCode::TooLarge, std::to_string(u.size()) + " distinct x exceed " +
                                             std::to_string(kMaxOracleDistinct));
    if (u.size() < 2)
        throw Error(ErrorCode::DegenerateRange, "oracle needs two distinct x values");
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        mids.push_back(0.5 * (u[i] + u[i + 1]));

    pwlf::FitReport best;
    bool have = false;
    auto consider = [&](std::vector<double> bps) {
        auto fit = pwlf::solve_fixed_breakpoints(x, y, bps);
        if (!have || fit.ssr < best.ssr) {
            best = std::move(fit);
            have = true;
        }
    };
    for (std::size_t i = 0; i < mids.size(); ++i) {
        if (k_interior == 1) {
            consider({u.front(), mids[i], u.back()});
            continue;
        }
        for (std::size_t j = i; j < mids.size(); ++j)
            consider({u.front(), mids[i], mids[j], u.back()});
    }
    best.k_interior = k_interior;
    return best;
}

RecoveryScore score_recovery(std::span<const std::size_t> found, std::span<const std::size_t> truth,
                             std::size_t tolerance_days) {
    RecoveryScore score;
    score.shift_date_errors.assign(truth.size(), std::nullopt);
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> pairs; // |err|, truth, found
    for (std::size_t i = 0; i < truth.size(); ++i)
        for (std::size_t j = 0; j < found.size(); ++j) {
            const std::size_t err = found[j] > truth[i] ? found[j] - truth[i] : truth[i] - found[j];
            if (err <= tolerance_days)
                pairs.emplace_back(err, i, j);
        }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> used(found.size(), false);
    for (auto [err, i, j] : pairs) {
        if (score.shift_date_errors[i] || used[j])
            continue;
        used[j] = true;
        score.shift_date_errors[i] = static_cast<long>(found[j]) - static_cast<long>(truth[i]);
    }
    for (const auto& e : score.shift_date_errors)
        if (!e)
            ++score.missed;
    score.spurious = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
    return score;
}

RecoveryScore score_recovery(const pelt::Segmentation& found, std::span<const std::size_t> truth,
                             std::size_t tolerance_days) {
    return score_recovery(found.changepoints, truth, tolerance_days);
}

std::vector<double> curve_errors(const regimes::RegimeCurveSet& fitted,
                                 const SyntheticScenario& scenario, const GeneratedMarket& market) {
    std::vector<std::size_t> true_regime(scenario.days());
    std::size_t day = 0;
    for (std::size_t r = 0; r < scenario.regimes.size(); ++r)
        for (std::size_t d = 0; d < scenario.regimes[r].days; ++d)
            true_regime[day++] = r;

    std::vector<double> errors;
    for (const auto& reg : fitted.regimes) {
        std::vector<std::size_t> votes(scenario.regimes.size(), 0);
        for (std::size_t d = reg.first_day; d <= reg.last_day; ++d)
            ++votes[true_regime.at(d)];
        const auto truth = static_cast<std::size_t>(
            std::max_element(votes.begin(), votes.end()) - votes.begin());
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& e : market.equilibria.day_range(reg.first_day, reg.last_day)) {
            sum += std::abs(pwlf::evaluate(reg.fit.curve, e.residual_load) -
                            pwlf::evaluate(scenario.regimes[truth].curve, e.residual_load));
            ++count;
        }
        errors.push_back(count > 0 ? sum / static_cast<double>(count) : 0.0);
    }
    return errors;
}

} // namespace supreg::synth
