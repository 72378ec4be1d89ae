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
#include <supreg/market_data.hpp>

#include <supreg/error.hpp>

#include "csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>

namespace supreg {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size())
        return false;
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9')
            return false;
        value = value * 10 + (s[i] - '0');
    }
    out = value;
    return true;
}

std::optional<Date> parse_ymd(std::string_view s) {
    int y = 0, m = 0, d = 0;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-' || !read_int(s, 0, 4, y) ||
        !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d))
        return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok())
        return std::nullopt;
    return sys_days{ymd};
}

[[noreturn]] void bad_value(std::string_view what, std::string_view text) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("invalid ") + std::string(what) + " '" + std::string(text) + "'");
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

void require_finite_nonnegative(double v, std::size_t row, const char* field) {
    if (!std::isfinite(v))
        throw ParseError(row, std::string(field) + " is not finite");
    if (v < 0.0)
        throw ParseError(row, std::string(field) + " is negative");
}

} // namespace

HourStamp parse_timestamp(std::string_view text) {
    std::string_view s = detail::trim(text);
    auto date = parse_ymd(s);
    if (!date || s.size() < 13 || (s[10] != 'T' && s[10] != ' '))
        bad_value("timestamp", text);
    int hh = 0, mm = 0, ss = 0;
    if (!read_int(s, 11, 2, hh) || hh > 23)
        bad_value("timestamp", text);
    std::size_t pos = 13;
    if (pos < s.size() && s[pos] == ':') {
        if (!read_int(s, pos + 1, 2, mm) || mm > 59)
            bad_value("timestamp", text);
        pos += 3;
        if (pos < s.size() && s[pos] == ':') {
            if (!read_int(s, pos + 1, 2, ss) || ss > 59)
                bad_value("timestamp", text);
            pos += 3;
            if (pos < s.size() && s[pos] == '.') {
                ++pos;
                while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
                    if (s[pos] != '0')
                        bad_value("timestamp (not on the hour)", text);
                    ++pos;
                }
            }
        }
    }
    int offset_minutes = 0;
    std::string_view zone = s.substr(pos);
    if (zone == "Z" || zone == "z" || zone.empty()) {
        offset_minutes = 0;
    } else if (zone.front() == '+' || zone.front() == '-') {
        int oh = 0, om = 0;
        std::string_view z = zone.substr(1);
        if (z.size() == 5 && z[2] == ':' && read_int(z, 0, 2, oh) && read_int(z, 3, 2, om)) {
        } else if (z.size() == 4 && read_int(z, 0, 2, oh) && read_int(z, 2, 2, om)) {
        } else if (z.size() == 2 && read_int(z, 0, 2, oh)) {
        } else {
            bad_value("timestamp zone", text);
        }
        offset_minutes = (oh * 60 + om) * (zone.front() == '-' ? -1 : 1);
    } else {
        bad_value("timestamp", text);
    }
    if (ss != 0)
        bad_value("timestamp (not on the hour)", text);
    auto local = sys_time<minutes>{*date} + hours{hh} + minutes{mm};
    auto utc = local - minutes{offset_minutes};
    auto floored = floor<hours>(utc);
    if (floored != utc)
        bad_value("timestamp (not on the hour)", text);
    return floored;
}

Date parse_date(std::string_view text) {
    std::string_view s = detail::trim(text);
    auto date = parse_ymd(s);
    if (!date || s.size() != 10)
        bad_value("date", text);
    return *date;
}

std::string format_date(Date d) {
    year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_timestamp(HourStamp t) {
    auto day = floor<days>(t);
    auto hh = (t - day).count();
    char buf[8];
    std::snprintf(buf, sizeof buf, "T%02d", static_cast<int>(hh));
    return format_date(day) + buf + ":00:00Z";
}

std::string format_number(double value) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{})
        throw Error(ErrorCode::NonFinite, "cannot format number");
    return std::string(buf.data(), ptr);
}

double parse_number(std::string_view text) {
    std::string_view s = detail::trim(text);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        bad_value("number", text);
    return value;
}

std::vector<HourlyObservation> parse_hourly_csv(std::istream& in, const ColumnMap& columns) {
    std::string line;
    std::size_t line_no = 0;
    if (!detail::next_record(in, line, line_no))
        throw Error(ErrorCode::EmptyInput, "hourly file has no header row");
    auto header = detail::split_csv(line);
    auto locate = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw Error(ErrorCode::MissingColumn, "column '" + name + "' not in header");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::array<std::size_t, 6> idx{locate(columns.timestamp), locate(columns.price),
                                         locate(columns.load),      locate(columns.wind),
                                         locate(columns.solar),     locate(columns.hydro_ror)};
    const std::size_t needed = *std::max_element(idx.begin(), idx.end()) + 1;

    std::vector<HourlyObservation> out;
    while (detail::next_record(in, line, line_no)) {
        auto fields = detail::split_csv(line);
        if (fields.size() < needed)
            throw ParseError(line_no, "expected at least " + std::to_string(needed) + " fields");
        HourlyObservation obs;
        try {
            obs.timestamp = parse_timestamp(fields[idx[0]]);
            obs.price = parse_number(fields[idx[1]]);
            obs.load = parse_number(fields[idx[2]]);
            obs.wind = parse_number(fields[idx[3]]);
            obs.solar = parse_number(fields[idx[4]]);
            obs.hydro_ror = parse_number(fields[idx[5]]);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
        if (!std::isfinite(obs.price))
            throw ParseError(line_no, "price is not finite");
        require_finite_nonnegative(obs.load, line_no, "load");
        require_finite_nonnegative(obs.wind, line_no, "wind");
        require_finite_nonnegative(obs.solar, line_no, "solar");
        require_finite_nonnegative(obs.hydro_ror, line_no, "hydro_ror");
        if (!out.empty()) {
            if (obs.timestamp == out.back().timestamp)
                throw Error(ErrorCode::DuplicateTimestamp,
                            "row " + std::to_string(line_no) + ": " + format_timestamp(obs.timestamp));
            if (obs.timestamp < out.back().timestamp)
                throw Error(ErrorCode::NonMonotonicTime,
                            "row " + std::to_string(line_no) + ": " + format_timestamp(obs.timestamp) +
                                " precedes " + format_timestamp(out.back().timestamp));
        }
        out.push_back(obs);
    }
    return out;
}

std::vector<HourlyObservation> load_hourly_csv(const std::filesystem::path& path,
                                               const ColumnMap& columns) {
    auto in = open_input(path);
    return parse_hourly_csv(in, columns);
}

void write_hourly_csv(std::ostream& out, std::span<const HourlyObservation> obs,
                      const ColumnMap& columns) {
    out << columns.timestamp << ',' << columns.price << ',' << columns.load << ',' << columns.wind
        << ',' << columns.solar << ',' << columns.hydro_ror << '\n';
    for (const auto& o : obs) {
        out << format_timestamp(o.timestamp) << ',' << format_number(o.price) << ','
            << format_number(o.load) << ',' << format_number(o.wind) << ','
            << format_number(o.solar) << ',' << format_number(o.hydro_ror) << '\n';
    }
}

EquilibriumSeries::EquilibriumSeries(std::vector<Equilibrium> observations, std::vector<Date> dates)
    : observations_(std::move(observations)), dates_(std::move(dates)) {
    offsets_.assign(dates_.size() + 1, 0);
    std::size_t pos = 0;
    for (std::size_t d = 0; d < dates_.size(); ++d) {
        offsets_[d] = pos;
        std::size_t start = pos;
        while (pos < observations_.size() && observations_[pos].day_index == d)
            ++pos;
        if (pos == start)
            throw Error(ErrorCode::InvalidArgument, "day index " + std::to_string(d) + " has no hours");
    }
    if (pos != observations_.size())
        throw Error(ErrorCode::InvalidArgument, "observations not grouped by consecutive day index");
    offsets_[dates_.size()] = pos;
}

std::span<const Equilibrium> EquilibriumSeries::day_range(std::size_t first_day,
                                                          std::size_t last_day) const {
    if (first_day > last_day || last_day >= days())
        throw Error(ErrorCode::OutOfRange, "day range [" + std::to_string(first_day) + ", " +
                                               std::to_string(last_day) + "] outside series");
    return std::span<const Equilibrium>(observations_)
        .subspan(offsets_[first_day], offsets_[last_day + 1] - offsets_[first_day]);
}

std::size_t EquilibriumSeries::hours_in(std::size_t first_day, std::size_t last_day) const {
    return day_range(first_day, last_day).size();
}

void EquilibriumSeries::collect(std::size_t first_day, std::size_t last_day, std::vector<double>& x,
                                std::vector<double>& y) const {
    auto range = day_range(first_day, last_day);
    x.resize(range.size());
    y.resize(range.size());
    for (std::size_t i = 0; i < range.size(); ++i) {
        x[i] = range[i].residual_load;
        y[i] = range[i].price;
    }
}

EquilibriumBuild to_equilibrium_series(std::span<const HourlyObservation> obs, GapPolicy policy,
                                       int max_gap_hours) {
    if (obs.empty())
        throw Error(ErrorCode::EmptyInput, "no hourly observations");
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i].timestamp <= obs[i - 1].timestamp)
            throw Error(ErrorCode::NonMonotonicTime, "observations are not strictly increasing");
    }
    const Date first_day = floor<days>(obs.front().timestamp);
    const Date last_day = floor<days>(obs.back().timestamp);
    const auto n_days = static_cast<std::size_t>((last_day - first_day).count()) + 1;
    const HourStamp origin{first_day};

    // Hour grid covering whole UTC days; slot i holds an index into obs or none.
    std::vector<std::optional<HourlyObservation>> grid(n_days * 24);
    for (const auto& o : obs)
        grid[static_cast<std::size_t>((o.timestamp - origin).count())] = o;

    GapReport report;
    std::vector<bool> day_ok(n_days, true);
    std::size_t i = 0;
    while (i < grid.size()) {
        if (grid[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < grid.size() && !grid[j])
            ++j;
        const std::size_t run = j - i;
        const bool bounded = i > 0 && j < grid.size();
        const std::string where = format_timestamp(origin + hours{static_cast<long>(i)});
        switch (policy) {
        case GapPolicy::Fail:
            throw Error(ErrorCode::GapTooLarge,
                        std::to_string(run) + " missing hour(s) starting " + where);
        case GapPolicy::Interpolate: {
            if (!bounded || run > static_cast<std::size_t>(max_gap_hours))
                throw Error(ErrorCode::GapTooLarge,
                            std::to_string(run) + " missing hour(s) starting " + where);
            const auto& a = *grid[i - 1];
            const auto& b = *grid[j];
            for (std::size_t k = i; k < j; ++k) {
                const double w = static_cast<double>(k - i + 1) / static_cast<double>(run + 1);
                auto lerp = [w](double u, double v) { return u + w * (v - u); };
                HourlyObservation h;
                h.timestamp = origin + hours{static_cast<long>(k)};
                h.price = lerp(a.price, b.price);
                h.load = lerp(a.load, b.load);
                h.wind = lerp(a.wind, b.wind);
                h.solar = lerp(a.solar, b.solar);
                h.hydro_ror = lerp(a.hydro_ror, b.hydro_ror);
                grid[k] = h;
            }
            report.interpolated_hours += run;
            break;
        }
        case GapPolicy::DropDay:
            for (std::size_t k = i; k < j; ++k)
                day_ok[k / 24] = false;
            break;
        }
        i = j;
    }

    std::vector<Equilibrium> eq;
    std::vector<Date> dates;
    eq.reserve(grid.size());
    for (std::size_t d = 0; d < n_days; ++d) {
        const Date date = first_day + days{static_cast<long>(d)};
        if (!day_ok[d]) {
            report.dropped_days.push_back(date);
            continue;
        }
        const std::size_t index = dates.size();
        dates.push_back(date);
        for (int h = 0; h < 24; ++h) {
            const auto& o = *grid[d * 24 + static_cast<std::size_t>(h)];
            eq.push_back(Equilibrium{index, h, o.price, o.residual_load()});
        }
    }
    if (dates.empty())
        throw Error(ErrorCode::EmptyInput, "every day was dropped by the gap policy");
    report.hourly_count = eq.size();
    return EquilibriumBuild{EquilibriumSeries(std::move(eq), std::move(dates)), std::move(report)};
}

double carbon_adjust(double fuel_price, double eua_price, const CarbonIntensity& intensity) {
    if (!std::isfinite(fuel_price) || !std::isfinite(eua_price) || !std::isfinite(intensity.factor))
        throw Error(ErrorCode::NonFinite, "carbon adjustment inputs must be finite");
    if (fuel_price < 0.0 || eua_price < 0.0 || intensity.factor < 0.0)
        throw Error(ErrorCode::NegativeInput, "carbon adjustment inputs must be non-negative");
    return fuel_price + intensity.factor * eua_price;
}

std::vector<DatedValue> parse_daily_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!detail::next_record(in, line, line_no))
        throw Error(ErrorCode::EmptyInput, "daily file has no header row");
    auto header = detail::split_csv(line);
    auto locate = [&](const char* name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw Error(ErrorCode::MissingColumn, std::string("column '") + name + "' not in header");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_col = locate("date");
    const std::size_t value_col = locate("value");
    std::vector<DatedValue> out;
    while (detail::next_record(in, line, line_no)) {
        auto fields = detail::split_csv(line);
        if (fields.size() <= std::max(date_col, value_col))
            throw ParseError(line_no, "missing fields");
        DatedValue v;
        try {
            v.date = parse_date(fields[date_col]);
            v.value = parse_number(fields[value_col]);
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
        if (!std::isfinite(v.value))
            throw ParseError(line_no, "value is not finite");
        out.push_back(v);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const DatedValue& a, const DatedValue& b) { return a.date < b.date; });
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (out[k].date == out[k - 1].date)
            throw Error(ErrorCode::DuplicateTimestamp, "date " + format_date(out[k].date) + " repeated");
    }
    return out;
}

std::vector<DatedValue> load_daily_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_daily_csv(in);
}

void write_daily_csv(std::ostream& out, std::span<const DatedValue> series) {
    out << "date,value\n";
    for (const auto& v : series)
        out << format_date(v.date) << ',' << format_number(v.value) << '\n';
}

AlignedDriver align_daily(std::string name, std::span<const DatedValue> series,
                          std::span<const Date> calendar, FillPolicy policy, std::string units) {
    AlignedDriver out;
    out.driver.name = std::move(name);
    out.driver.units = std::move(units);
    out.driver.values.reserve(calendar.size());
    std::vector<DatedValue> sorted(series.begin(), series.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const DatedValue& a, const DatedValue& b) { return a.date < b.date; });
    std::size_t pos = 0;
    std::optional<double> last;
    for (const Date day : calendar) {
        bool exact = false;
        while (pos < sorted.size() && sorted[pos].date <= day) {
            last = sorted[pos].value;
            exact = sorted[pos].date == day;
            ++pos;
        }
        if (exact) {
            out.driver.values.push_back(*last);
            continue;
        }
        if (policy == FillPolicy::Fail)
            throw Error(ErrorCode::GapFound,
                        out.driver.name + " has no value on " + format_date(day));
        if (!last)
            throw Error(ErrorCode::LeadingGap,
                        out.driver.name + " has no value on or before " + format_date(day));
        out.driver.values.push_back(*last);
        ++out.filled;
    }
    return out;
}

DailyDriver normalize(const DailyDriver& driver) {
    const auto& v = driver.values;
    if (v.empty())
        throw Error(ErrorCode::EmptyInput, driver.name + " is empty");
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 0.0) || sd <= 1e-300)
        throw Error(ErrorCode::ZeroVariance, driver.name + " has zero variance");
    DailyDriver out = driver;
    out.scale = Scale::Normalized;
    for (double& x : out.values)
        x = (x - mean) / sd;
    return out;
}

std::string_view to_string(PanelSpec spec) noexcept {
    switch (spec) {
    case PanelSpec::C1: return "C1";
    case PanelSpec::C2: return "C2";
    case PanelSpec::C3: return "C3";
    case PanelSpec::Custom: return "custom";
    }
    return "custom";
}

std::vector<std::string> required_drivers(PanelSpec spec) {
    using namespace driver_names;
    switch (spec) {
    case PanelSpec::C1: return {std::string(coal), std::string(gas)};
    case PanelSpec::C2: return {std::string(coal), std::string(gas), std::string(capacity_total)};
    case PanelSpec::C3:
        return {std::string(coal), std::string(gas), std::string(capacity_nuclear),
                std::string(capacity_lignite)};
    case PanelSpec::Custom: break;
    }
    throw Error(ErrorCode::InvalidArgument, "custom panels have no fixed driver list");
}

DriverPanel build_panel(PanelSpec spec, const std::map<std::string, DailyDriver>& available) {
    DriverPanel panel;
    panel.spec = spec;
    for (const auto& name : required_drivers(spec)) {
        auto it = available.find(name);
        if (it == available.end())
            throw Error(ErrorCode::MissingDriver, std::string(to_string(spec)) + " needs '" + name + "'");
        panel.drivers.push_back(spec == PanelSpec::C1 ? it->second : normalize(it->second));
    }
    const std::size_t n = panel.drivers.front().values.size();
    for (const auto& d : panel.drivers) {
        if (d.values.size() != n)
            throw Error(ErrorCode::InvalidArgument, "driver '" + d.name + "' has a different length");
        if (spec == PanelSpec::C1 && d.scale != Scale::Levels)
            throw Error(ErrorCode::InvalidArgument, "C1 expects drivers in levels");
    }
    return panel;
}

DriverPanel make_custom_panel(std::vector<DailyDriver> drivers) {
    if (drivers.empty())
        throw Error(ErrorCode::EmptyInput, "panel needs at least one driver");
    const std::size_t n = drivers.front().values.size();
    if (n == 0)
        throw Error(ErrorCode::EmptyInput, "panel drivers are empty");
    for (const auto& d : drivers) {
        if (d.values.size() != n)
            throw Error(ErrorCode::InvalidArgument, "driver '" + d.name + "' has a different length");
        if (d.scale != drivers.front().scale)
            throw Error(ErrorCode::InvalidArgument, "panel drivers must share one scale");
        for (double x : d.values)
            if (!std::isfinite(x))
                throw Error(ErrorCode::NonFinite, "driver '" + d.name + "' has non-finite values");
    }
    return DriverPanel{std::move(drivers), PanelSpec::Custom};
}

} // namespace supreg
