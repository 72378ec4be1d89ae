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

// Ingestion and transforms for hourly market data and daily supply drivers.
//
// All timestamps are UTC. A "day" is a UTC calendar day, so every complete
// day has exactly 24 hourly observations regardless of local daylight-saving
// transitions.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace supreg {

using HourStamp = std::chrono::sys_time<std::chrono::hours>;
using Date = std::chrono::sys_days;

HourStamp parse_timestamp(std::string_view text);
Date parse_date(std::string_view text);
std::string format_timestamp(HourStamp t);
std::string format_date(Date d);

/// Shortest text that parses back to exactly the same double.
std::string format_number(double value);
double parse_number(std::string_view text);

struct HourlyObservation {
    HourStamp timestamp;
    double price = 0.0;     // EUR/MWh, may be negative
    double load = 0.0;      // MW
    double wind = 0.0;      // MW
    double solar = 0.0;     // MW
    double hydro_ror = 0.0; // MW, run-of-river only

    double residual_load() const noexcept { return load - wind - solar - hydro_ror; }
};

struct ColumnMap {
    std::string timestamp = "timestamp";
    std::string price = "price_eur_mwh";
    std::string load = "load_mw";
    std::string wind = "wind_mw";
    std::string solar = "solar_mw";
    std::string hydro_ror = "hydro_ror_mw";
};

std::vector<HourlyObservation> parse_hourly_csv(std::istream& in, const ColumnMap& columns = {});
std::vector<HourlyObservation> load_hourly_csv(const std::filesystem::path& path,
                                               const ColumnMap& columns = {});
void write_hourly_csv(std::ostream& out, std::span<const HourlyObservation> obs,
                      const ColumnMap& columns = {});

struct Equilibrium {
    std::size_t day_index = 0;
    int hour_of_day = 0;
    double price = 0.0;
    double residual_load = 0.0;
};

/// Hourly (price, residual load) pairs grouped into consecutive day indices.
class EquilibriumSeries {
public:
    EquilibriumSeries() = default;
    /// `dates[d]` is the calendar date of day index d. Observations must be
    /// grouped by non-decreasing day index and every index in [0, n) present.
    EquilibriumSeries(std::vector<Equilibrium> observations, std::vector<Date> dates);

    std::size_t days() const noexcept { return dates_.size(); }
    std::size_t hours() const noexcept { return observations_.size(); }
    std::span<const Equilibrium> observations() const noexcept { return observations_; }
    const std::vector<Date>& dates() const noexcept { return dates_; }

    /// Observations of days [first_day, last_day], inclusive.
    std::span<const Equilibrium> day_range(std::size_t first_day, std::size_t last_day) const;
    std::size_t hours_in(std::size_t first_day, std::size_t last_day) const;

    /// Copies residual load into `x` and price into `y` for the day range.
    void collect(std::size_t first_day, std::size_t last_day, std::vector<double>& x,
                 std::vector<double>& y) const;

private:
    std::vector<Equilibrium> observations_;
    std::vector<Date> dates_;
    std::vector<std::size_t> offsets_; // days() + 1 entries
};

enum class GapPolicy { Fail, Interpolate, DropDay };

struct GapReport {
    std::size_t hourly_count = 0;
    std::size_t interpolated_hours = 0;
    std::vector<Date> dropped_days;
};

struct EquilibriumBuild {
    EquilibriumSeries series;
    GapReport report;
};

/// Residual load per hour; day 0 is the UTC date of the first observation.
/// Under Interpolate, runs of at most `max_gap_hours` missing hours with
/// observed neighbours on both sides are filled linearly.
EquilibriumBuild to_equilibrium_series(std::span<const HourlyObservation> obs, GapPolicy policy,
                                       int max_gap_hours = 2);

struct CarbonIntensity {
    std::string fuel;
    double factor = 0.0; // tCO2 per MWh thermal
};

inline constexpr double kDefaultGasIntensity = 0.201;
inline constexpr double kDefaultCoalIntensity = 0.338;

/// fuel_price + factor * eua_price, in EUR/MWh thermal.
double carbon_adjust(double fuel_price, double eua_price, const CarbonIntensity& intensity);

enum class Scale { Levels, Normalized };

struct DailyDriver {
    std::string name;
    std::vector<double> values;
    std::string units;
    Scale scale = Scale::Levels;
};

struct DatedValue {
    Date date;
    double value = 0.0;
};

std::vector<DatedValue> parse_daily_csv(std::istream& in);
std::vector<DatedValue> load_daily_csv(const std::filesystem::path& path);
void write_daily_csv(std::ostream& out, std::span<const DatedValue> series);

enum class FillPolicy { ForwardFill, Fail };

struct AlignedDriver {
    DailyDriver driver;
    std::size_t filled = 0;
};

/// One value per calendar day. Quotes dated after the calendar are ignored;
/// days without a quote take the most recent earlier one under ForwardFill.
AlignedDriver align_daily(std::string name, std::span<const DatedValue> series,
                          std::span<const Date> calendar, FillPolicy policy,
                          std::string units = {});

/// Subtract the mean, divide by the population standard deviation.
DailyDriver normalize(const DailyDriver& driver);

namespace driver_names {
inline constexpr std::string_view coal = "coal";
inline constexpr std::string_view gas = "gas";
inline constexpr std::string_view eua = "eua";
inline constexpr std::string_view capacity_total = "capacity_total";
inline constexpr std::string_view capacity_nuclear = "capacity_nuclear";
inline constexpr std::string_view capacity_lignite = "capacity_lignite";
} // namespace driver_names

enum class PanelSpec { C1, C2, C3, Custom };

std::string_view to_string(PanelSpec spec) noexcept;

struct DriverPanel {
    std::vector<DailyDriver> drivers;
    PanelSpec spec = PanelSpec::Custom;

    std::size_t days() const noexcept { return drivers.empty() ? 0 : drivers.front().values.size(); }
};

/// Names of the driver series a cause-driven specification needs.
std::vector<std::string> required_drivers(PanelSpec spec);

/// C1 keeps levels; C2 and C3 normalize every member series.
DriverPanel build_panel(PanelSpec spec, const std::map<std::string, DailyDriver>& available);

/// Any nonempty set of equal-length series sharing one scale.
DriverPanel make_custom_panel(std::vector<DailyDriver> drivers);

} // namespace supreg
