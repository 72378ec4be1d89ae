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
#include <supreg/report.hpp>

#include <supreg/error.hpp>

#include "csv.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

namespace supreg::report {

namespace fs = std::filesystem;

Json to_json(const pwlf::PiecewiseLinearCurve& curve) {
    Json j;
    j["breakpoints"] = curve.breakpoints;
    j["intercept"] = curve.intercept;
    j["slope_increments"] = curve.slope_increments;
    j["segment_slopes"] = curve.segment_slopes();
    return j;
}

pwlf::PiecewiseLinearCurve curve_from_json(const Json& j) {
    try {
        pwlf::PiecewiseLinearCurve c;
        c.breakpoints = j.at("breakpoints").get<std::vector<double>>();
        c.intercept = j.at("intercept").get<double>();
        c.slope_increments = j.at("slope_increments").get<std::vector<double>>();
        if (c.breakpoints.size() < 2 || c.slope_increments.size() + 1 != c.breakpoints.size())
            throw Error(ErrorCode::InvalidArgument, "curve needs K >= 2 breakpoints and K - 1 slopes");
        return c;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed curve JSON: ") + e.what());
    }
}

Json to_json(const pwlf::FitReport& fit) {
    Json j = to_json(fit.curve);
    j["ssr"] = fit.ssr;
    j["r_squared"] = fit.r_squared;
    j["n_points"] = fit.n_points;
    j["k_interior"] = fit.k_interior;
    return j;
}

Json to_json(const pelt::Segmentation& seg, std::span<const Date> dates) {
    const bool dated = dates.size() >= seg.n_days;
    Json j;
    j["n_days"] = seg.n_days;
    j["penalty"] = seg.penalty;
    j["total_cost"] = seg.total_cost;
    j["regime_count"] = seg.regime_count();
    j["changepoint_days"] = seg.changepoints;
    if (dated) {
        Json shifts = Json::array();
        for (std::size_t d : seg.shift_days())
            shifts.push_back(format_date(dates[d]));
        j["changepoint_dates"] = shifts;
    }
    Json regs = Json::array();
    std::size_t id = 0;
    for (auto [a, b] : seg.regimes()) {
        Json r;
        r["regime"] = ++id;
        r["first_day"] = a;
        r["last_day"] = b;
        if (dated) {
            r["first_date"] = format_date(dates[a]);
            r["last_date"] = format_date(dates[b]);
        }
        regs.push_back(r);
    }
    j["regimes"] = regs;
    return j;
}

pelt::Segmentation segmentation_from_json(const Json& j) {
    try {
        const Json& s = j.contains("segmentation") ? j.at("segmentation") : j;
        pelt::Segmentation seg;
        seg.n_days = s.at("n_days").get<std::size_t>();
        seg.penalty = s.value("penalty", 0.0);
        seg.total_cost = s.value("total_cost", 0.0);
        seg.changepoints = s.at("changepoint_days").get<std::vector<std::size_t>>();
        for (std::size_t i = 0; i < seg.changepoints.size(); ++i) {
            if (seg.changepoints[i] + 1 >= seg.n_days ||
                (i > 0 && seg.changepoints[i] <= seg.changepoints[i - 1]))
                throw Error(ErrorCode::InvalidArgument, "changepoints must increase inside the sample");
        }
        return seg;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed segmentation JSON: ") + e.what());
    }
}

Json to_json(const regimes::RegimeCurveSet& set) {
    Json j;
    j["curve_spec"] = std::string(to_string(set.spec.kind));
    j["segmentation"] = to_json(set.segmentation, set.dates);
    Json regs = Json::array();
    std::size_t id = 0;
    for (const auto& r : set.regimes) {
        Json e;
        e["regime"] = ++id;
        e["first_day"] = r.first_day;
        e["last_day"] = r.last_day;
        if (set.dates.size() > r.last_day) {
            e["first_date"] = format_date(set.dates[r.first_day]);
            e["last_date"] = format_date(set.dates[r.last_day]);
        }
        e["hours"] = r.hours;
        e["coverage"] = r.coverage;
        e["r_squared"] = r.fit.r_squared;
        e["ssr"] = r.fit.ssr;
        e["k_interior"] = r.fit.k_interior;
        e["supported_load_mw"] = {r.support.lower, r.support.upper};
        e["curve"] = to_json(r.fit);
        regs.push_back(e);
    }
    j["regimes"] = regs;
    return j;
}

CurveList curves_from_json(const Json& j) {
    try {
        CurveList out;
        for (const auto& r : j.at("regimes")) {
            out.curves.push_back(curve_from_json(r.at("curve")));
            const auto range = r.at("supported_load_mw").get<std::vector<double>>();
            if (range.size() != 2)
                throw Error(ErrorCode::InvalidArgument, "supported_load_mw needs two values");
            out.supports.push_back({range[0], range[1]});
        }
        return out;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed regime report: ") + e.what());
    }
}

namespace {

Json optional_value(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

Json to_json(const regimes::SweepResult& sweep) {
    Json j;
    j["baseline"] = sweep.baseline;
    Json runs = Json::array();
    for (const auto& p : sweep.runs)
        runs.push_back({{"beta", p.penalty},
                        {"regime_count", p.regime_count},
                        {"cost", p.cost},
                        {"unexplained_ratio", p.unexplained_ratio}});
    j["runs"] = runs;
    Json points = Json::array();
    for (const auto& p : sweep.points)
        points.push_back({{"regime_count", p.regime_count},
                          {"beta", p.penalty},
                          {"cost", p.cost},
                          {"unexplained_ratio", p.unexplained_ratio},
                          {"changepoint_days", p.segmentation.changepoints}});
    j["points"] = points;
    Json th = Json::array();
    for (const auto& [t, r] : sweep.thresholds_resolved) {
        Json e{{"threshold", t},
               {"regime_count", r.regime_count},
               {"interpolated", r.interpolated},
               {"interpolated_count", r.interpolated_count}};
        e["nearest_observed"] = r.nearest_observed ? Json(*r.nearest_observed) : Json(nullptr);
        th.push_back(e);
    }
    j["thresholds"] = th;
    return j;
}

Json to_json(const regimes::SimilarityMatrix& m) {
    Json j;
    j["size"] = m.size;
    j["support_policy"] = std::string(to_string(m.policy));
    Json mean_abs = Json::array();
    Json area = Json::array();
    for (std::size_t i = 0; i < m.size; ++i) {
        Json row_m = Json::array();
        Json row_a = Json::array();
        for (std::size_t k = 0; k < m.size; ++k) {
            row_m.push_back(optional_value(m.mean_abs[i * m.size + k]));
            row_a.push_back(optional_value(m.area[i * m.size + k]));
        }
        mean_abs.push_back(row_m);
        area.push_back(row_a);
    }
    j["mean_abs_eur_mwh"] = mean_abs;
    j["area"] = area;
    Json nearest = Json::array();
    for (std::size_t i = 0; i < m.size; ++i) {
        Json e{{"regime", i + 1}};
        if (const auto& n = m.nearest_non_adjacent[i]) {
            e["nearest_non_adjacent"] = *n + 1;
            e["mean_abs_eur_mwh"] = *m.mean_abs[i * m.size + *n];
        } else {
            e["nearest_non_adjacent"] = nullptr;
        }
        nearest.push_back(e);
    }
    j["nearest_non_adjacent"] = nearest;
    return j;
}

Json to_json(const synth::RecoveryScore& score) {
    Json j;
    Json errs = Json::array();
    for (const auto& e : score.shift_date_errors)
        errs.push_back(e ? Json(*e) : Json(nullptr));
    j["shift_date_errors"] = errs;
    j["missed"] = score.missed;
    j["spurious"] = score.spurious;
    j["curve_errors_eur_mwh"] = score.curve_errors;
    return j;
}

void write_sweep_csv(std::ostream& out, const regimes::SweepResult& sweep) {
    out << "beta,regime_count,unexplained_ratio\n";
    for (const auto& p : sweep.runs)
        out << format_number(p.penalty) << ',' << p.regime_count << ','
            << format_number(p.unexplained_ratio) << '\n';
}

void write_threshold_csv(std::ostream& out, std::string_view spec,
                         const regimes::SweepResult& sweep) {
    out << "spec,threshold,regime_count,interpolated,interpolated_count,nearest_observed\n";
    for (const auto& [t, r] : sweep.thresholds_resolved) {
        out << spec << ',' << format_number(t) << ',' << r.regime_count << ','
            << (r.interpolated ? "true" : "false") << ',' << format_number(r.interpolated_count)
            << ',';
        if (r.nearest_observed)
            out << *r.nearest_observed;
        out << '\n';
    }
}

void write_segmentation_csv(std::ostream& out, const pelt::Segmentation& seg,
                            std::span<const Date> dates) {
    const bool dated = dates.size() >= seg.n_days;
    out << "regime,first_day,last_day,days" << (dated ? ",first_date,last_date" : "") << '\n';
    std::size_t id = 0;
    for (auto [a, b] : seg.regimes()) {
        out << ++id << ',' << a << ',' << b << ',' << (b - a + 1);
        if (dated)
            out << ',' << format_date(dates[a]) << ',' << format_date(dates[b]);
        out << '\n';
    }
}

void write_matrix_csv(std::ostream& out, std::size_t size,
                      const std::vector<std::optional<double>>& values) {
    out << "regime";
    for (std::size_t k = 0; k < size; ++k)
        out << ',' << k + 1;
    out << '\n';
    for (std::size_t i = 0; i < size; ++i) {
        out << i + 1;
        for (std::size_t k = 0; k < size; ++k) {
            out << ',';
            if (const auto& v = values[i * size + k])
                out << format_number(*v);
        }
        out << '\n';
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out)
        throw Error(ErrorCode::Io, "failed writing " + path.string());
}

void write_json(const fs::path& path, const Json& j) {
    write_text(path, j.dump(2) + "\n");
}

Json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
    }
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::Io, "SHA-256 unavailable");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[digest[i] >> 4]);
        hex.push_back(kHex[digest[i] & 0xF]);
    }
    return hex;
}

void write_equilibria_csv(std::ostream& out, const EquilibriumSeries& series) {
    out << "date,hour,residual_load_mw,price_eur_mwh\n";
    for (const auto& e : series.observations())
        out << format_date(series.dates()[e.day_index]) << ',' << e.hour_of_day << ','
            << format_number(e.residual_load) << ',' << format_number(e.price) << '\n';
}

EquilibriumSeries parse_equilibria_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!detail::next_record(in, line, line_no))
        throw Error(ErrorCode::EmptyInput, "equilibria file is empty");
    const auto header = detail::split_csv(line);
    const std::vector<std::string> expected{"date", "hour", "residual_load_mw", "price_eur_mwh"};
    for (const auto& name : expected)
        if (std::find(header.begin(), header.end(), name) == header.end())
            throw Error(ErrorCode::MissingColumn, "equilibria file lacks column '" + name + "'");
    auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    const std::size_t c_date = col("date"), c_hour = col("hour"), c_q = col("residual_load_mw"),
                      c_p = col("price_eur_mwh");
    std::vector<Equilibrium> obs;
    std::vector<Date> dates;
    while (detail::next_record(in, line, line_no)) {
        const auto f = detail::split_csv(line);
        if (f.size() != header.size())
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields");
        try {
            const Date d = parse_date(f[c_date]);
            if (dates.empty() || dates.back() != d) {
                if (!dates.empty() && d < dates.back())
                    throw Error(ErrorCode::NonMonotonicTime, "dates must not decrease");
                dates.push_back(d);
            }
            Equilibrium e;
            e.day_index = dates.size() - 1;
            const double hour = parse_number(f[c_hour]);
            if (hour < 0.0 || hour > 23.0 || hour != std::floor(hour))
                throw Error(ErrorCode::InvalidArgument, "hour must be an integer in [0, 23]");
            e.hour_of_day = static_cast<int>(hour);
            e.residual_load = parse_number(f[c_q]);
            e.price = parse_number(f[c_p]);
            obs.push_back(e);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (obs.empty())
        throw Error(ErrorCode::EmptyInput, "equilibria file has no rows");
    return EquilibriumSeries(std::move(obs), std::move(dates));
}

void write_drivers_csv(std::ostream& out, std::span<const Date> dates,
                       const std::map<std::string, DailyDriver>& drivers) {
    out << "date";
    for (const auto& [name, d] : drivers) {
        if (d.values.size() != dates.size())
            throw Error(ErrorCode::InvalidArgument, "driver '" + name + "' does not match the calendar");
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t t = 0; t < dates.size(); ++t) {
        out << format_date(dates[t]);
        for (const auto& [name, d] : drivers)
            out << ',' << format_number(d.values[t]);
        out << '\n';
    }
}

std::map<std::string, DailyDriver> parse_drivers_csv(std::istream& in, std::span<const Date> dates) {
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, DailyDriver> out;
    if (!detail::next_record(in, line, line_no))
        return out;
    const auto header = detail::split_csv(line);
    if (header.empty() || header[0] != "date")
        throw Error(ErrorCode::MissingColumn, "drivers file must start with a 'date' column");
    for (std::size_t c = 1; c < header.size(); ++c)
        out[header[c]] = DailyDriver{header[c], {}, {}, Scale::Levels};
    std::size_t t = 0;
    while (detail::next_record(in, line, line_no)) {
        const auto f = detail::split_csv(line);
        if (f.size() != header.size())
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields");
        try {
            const Date d = parse_date(f[0]);
            if (t >= dates.size() || d != dates[t])
                throw Error(ErrorCode::InvalidArgument, "date " + f[0] + " does not match the equilibria calendar");
            for (std::size_t c = 1; c < header.size(); ++c)
                out[header[c]].values.push_back(parse_number(f[c]));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
        ++t;
    }
    if (header.size() > 1 && t != dates.size())
        throw Error(ErrorCode::InvalidArgument, "drivers cover " + std::to_string(t) + " of " +
                                                    std::to_string(dates.size()) + " days");
    return out;
}

void write_bundle(const fs::path& dir, const Bundle& bundle) {
    std::ostringstream eq, dr;
    write_equilibria_csv(eq, bundle.equilibria);
    write_drivers_csv(dr, bundle.equilibria.dates(), bundle.drivers);
    write_text(dir / kEquilibriaFile, eq.str());
    write_text(dir / kDriversFile, dr.str());
}

Bundle load_bundle(const fs::path& dir) {
    Bundle b;
    {
        std::ifstream in(dir / kEquilibriaFile, std::ios::binary);
        if (!in)
            throw Error(ErrorCode::Io, "cannot read " + (dir / kEquilibriaFile).string());
        b.equilibria = parse_equilibria_csv(in);
    }
    std::ifstream in(dir / kDriversFile, std::ios::binary);
    if (in)
        b.drivers = parse_drivers_csv(in, b.equilibria.dates());
    return b;
}

} // namespace supreg::report
