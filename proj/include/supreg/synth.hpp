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

// Synthetic markets with known regimes, and exhaustive oracles for the
// segmentation and curve-fitting engines.

#include <supreg/config.hpp>
#include <supreg/market_data.hpp>
#include <supreg/pelt.hpp>
#include <supreg/pwlf.hpp>
#include <supreg/regimes.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace supreg::synth {

struct RegimeSpec {
    std::size_t days = 0;
    pwlf::PiecewiseLinearCurve curve;
    /// Mean level of every driver while the regime lasts; empty means the
    /// mean price of the curve over the demand range, for every driver.
    std::vector<double> driver_levels;
};

struct DemandProcess {
    double low_mw = 30000.0;
    double high_mw = 75000.0;
    /// Multiplier on the daily swing on Saturdays and Sundays.
    double weekend_factor = 0.85;
    /// Day-to-day level shift amplitude as a share of the range.
    double seasonal_amplitude = 0.1;
    double load_sigma_mw = 0.0;
};

struct SyntheticScenario {
    std::vector<RegimeSpec> regimes;
    DemandProcess demand;
    double price_sigma = 0.0;
    double driver_sigma = 0.0;
    std::vector<std::string> driver_names{"coal", "gas"};
    std::uint64_t seed = 1;
    Date start = Date{std::chrono::year{2019} / 1 / 1};

    std::size_t days() const noexcept;
};

struct GeneratedMarket {
    std::vector<HourlyObservation> hourly;
    EquilibriumSeries equilibria;
    std::map<std::string, DailyDriver> drivers;
    /// The driver series keyed by date, as written to daily CSV files.
    std::map<std::string, std::vector<DatedValue>> dated_drivers;
    /// Last day of every true regime except the final one.
    std::vector<std::size_t> changepoints;
};

GeneratedMarket generate(const SyntheticScenario& scenario);

/// Scenario from key-value config:
///
///   seed, start_date, price_sigma, driver_sigma, drivers (comma list),
///   demand.low_mw, demand.high_mw, demand.weekend_factor,
///   demand.seasonal_amplitude, demand.load_sigma_mw,
///   regimes (count), regime.<i>.days, regime.<i>.breakpoints,
///   regime.<i>.intercept, regime.<i>.slopes, regime.<i>.drivers
///
/// with i counting from 1.
SyntheticScenario scenario_from_config(const Config& config);

/// Three regimes of `days_each` days whose curves are parallel shifts
/// `gap` EUR/MWh apart, with a steep upper segment.
SyntheticScenario three_regime_scenario(std::size_t days_each, double gap, double price_sigma,
                                        std::uint64_t seed);

inline constexpr std::size_t kMaxBruteForceDays = 15;
inline constexpr std::size_t kMaxOracleDistinct = 50;

/// Global optimum by enumerating every partition of [0, n) whose segments
/// respect the cost's minimum length. Ties resolve as the PELT recursion
/// does: the latest admissible start of the final segment wins.
pelt::Segmentation brute_force_partition(const SegmentCost& cost, std::size_t n_days,
                                         double penalty);

/// Best fit over every placement of `k_interior` interior breakpoints on
/// midpoints of the sorted distinct x values, solved exactly per placement.
pwlf::FitReport grid_pwlf_oracle(std::span<const double> x, std::span<const double> y,
                                 std::size_t k_interior);

struct RecoveryScore {
    /// Per true shift: found minus true, in days; absent when missed.
    std::vector<std::optional<long>> shift_date_errors;
    std::size_t missed = 0;
    std::size_t spurious = 0;
    /// Mean absolute price error per found regime, EUR/MWh.
    std::vector<double> curve_errors;

    bool perfect() const noexcept { return missed == 0 && spurious == 0; }
};

/// Greedy one-to-one matching of changepoints, closest pairs first.
RecoveryScore score_recovery(std::span<const std::size_t> found, std::span<const std::size_t> truth,
                             std::size_t tolerance_days);
RecoveryScore score_recovery(const pelt::Segmentation& found, std::span<const std::size_t> truth,
                             std::size_t tolerance_days);

/// Mean |fitted - true| price per fitted regime over the generated residual
/// loads of that regime, against the true regime covering most of its days.
std::vector<double> curve_errors(const regimes::RegimeCurveSet& fitted,
                                 const SyntheticScenario& scenario, const GeneratedMarket& market);

} // namespace supreg::synth
