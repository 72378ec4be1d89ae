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
#include "helpers.hpp"

#include <supreg/cost.hpp>
#include <supreg/error.hpp>
#include <supreg/report.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace supreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("supreg_report_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<Date> calendar(std::size_t n) {
    std::vector<Date> d;
    const Date start{std::chrono::year{2022} / 12 / 30};
    for (std::size_t i = 0; i < n; ++i)
        d.push_back(start + std::chrono::days{static_cast<long>(i)});
    return d;
}

} // namespace

TEST_CASE("curve JSON round trip") {
    const auto c = pwlf::PiecewiseLinearCurve::from_slopes({1.5, 10.0, 40.25}, -3.125, std::vector<double>{0.1, 2.7});
    const auto j = report::to_json(c);
    CHECK(j.at("segment_slopes").size() == 2);
    const auto back = report::curve_from_json(report::Json::parse(j.dump()));
    CHECK(back.breakpoints == c.breakpoints);
    CHECK(back.intercept == c.intercept);
    CHECK(back.slope_increments == c.slope_increments);

    auto broken = j;
    broken["slope_increments"] = {1.0};
    CHECK_THROWS_AS(report::curve_from_json(broken), Error);
    CHECK_THROWS_AS(report::curve_from_json(report::Json{{"intercept", 1.0}}), Error);
}

TEST_CASE("segmentation JSON carries dates of each shift") {
    pelt::Segmentation seg;
    seg.n_days = 6;
    seg.penalty = 2.5;
    seg.total_cost = 11.0;
    seg.changepoints = {1, 3};
    const auto dates = calendar(6);
    const auto j = report::to_json(seg, dates);
    CHECK(j.at("regime_count") == 3);
    CHECK(j.at("changepoint_days") == report::Json::array({1, 3}));
    CHECK(j.at("changepoint_dates") == report::Json::array({"2023-01-01", "2023-01-03"}));
    CHECK(j.at("regimes")[0].at("first_date") == "2022-12-30");
    CHECK(j.at("regimes")[2].at("last_day") == 5);

    const auto back = report::segmentation_from_json(j);
    CHECK(back.n_days == 6);
    CHECK(back.changepoints == seg.changepoints);
    CHECK(back.penalty == 2.5);
    CHECK(back.total_cost == 11.0);

    const auto nested = report::segmentation_from_json(report::Json{{"segmentation", j}});
    CHECK(nested.changepoints == seg.changepoints);

    CHECK_FALSE(report::to_json(seg).contains("changepoint_dates"));

    auto bad = j;
    bad["changepoint_days"] = {3, 1};
    CHECK_THROWS_AS(report::segmentation_from_json(bad), Error);
    bad["changepoint_days"] = {5};
    CHECK_THROWS_AS(report::segmentation_from_json(bad), Error);
    CHECK_THROWS_AS(report::segmentation_from_json(report::Json::object()), Error);
}

TEST_CASE("regime report round trips curves and supports") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> load(20000.0, 70000.0);
    const auto series = testing::make_series(8, 24, [&](std::size_t d, int) {
        const double q = load(rng);
        return std::pair{q, (d < 4 ? 10.0 : 40.0) + 0.001 * q};
    });
    pelt::Segmentation seg;
    seg.n_days = 8;
    seg.changepoints = {3};
    const auto set = regimes::fit_regime_curves(series, seg, CurveSpec::e2());
    const auto j = report::Json::parse(report::to_json(set).dump());
    CHECK(j.at("curve_spec") == "E2");
    CHECK(j.at("segmentation").at("changepoint_days") == report::Json::array({3}));
    REQUIRE(j.at("regimes").size() == 2);
    CHECK(j.at("regimes")[1].at("hours") == 96);

    const auto list = report::curves_from_json(j);
    REQUIRE(list.curves.size() == 2);
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(list.curves[r].breakpoints == set.regimes[r].fit.curve.breakpoints);
        CHECK(list.supports[r].lower == set.regimes[r].support.lower);
        CHECK(list.supports[r].upper == set.regimes[r].support.upper);
    }
    CHECK(report::segmentation_from_json(j).changepoints == seg.changepoints);
    CHECK_THROWS_AS(report::curves_from_json(report::Json{{"regimes", {{{"curve", 1}}}}}), Error);
}

TEST_CASE("sweep and threshold tables") {
    regimes::SweepResult sweep;
    sweep.baseline = 100.0;
    regimes::SweepPoint a;
    a.penalty = 1e3;
    a.regime_count = 1;
    a.cost = 100.0;
    a.unexplained_ratio = 1.0;
    regimes::SweepPoint b;
    b.penalty = 0.5;
    b.regime_count = 3;
    b.cost = 25.0;
    b.unexplained_ratio = 0.25;
    sweep.runs = {a, b};
    sweep.points = {a, b};
    regimes::ThresholdResolution r;
    r.regime_count = 3;
    r.interpolated = true;
    r.interpolated_count = 2.5;
    r.nearest_observed = 3;
    sweep.thresholds_resolved[0.7] = r;

    std::ostringstream runs;
    report::write_sweep_csv(runs, sweep);
    CHECK(runs.str() == "beta,regime_count,unexplained_ratio\n1000,1,1\n0.5,3,0.25\n");

    std::ostringstream th;
    report::write_threshold_csv(th, "C1", sweep);
    CHECK(th.str() ==
          "spec,threshold,regime_count,interpolated,interpolated_count,nearest_observed\n"
          "C1,0.7,3,true,2.5,3\n");

    const auto j = report::to_json(sweep);
    CHECK(j.at("baseline") == 100.0);
    CHECK(j.at("runs").size() == 2);
    CHECK(j.at("thresholds")[0].at("nearest_observed") == 3);
}

TEST_CASE("segmentation and matrix CSV") {
    pelt::Segmentation seg;
    seg.n_days = 4;
    seg.changepoints = {0};
    std::ostringstream out;
    report::write_segmentation_csv(out, seg, calendar(4));
    CHECK(out.str() == "regime,first_day,last_day,days,first_date,last_date\n"
                       "1,0,0,1,2022-12-30,2022-12-30\n"
                       "2,1,3,3,2022-12-31,2023-01-02\n");
    std::ostringstream undated;
    report::write_segmentation_csv(undated, seg, {});
    CHECK(undated.str() == "regime,first_day,last_day,days\n1,0,0,1\n2,1,3,3\n");

    std::ostringstream m;
    report::write_matrix_csv(m, 2, {0.0, std::nullopt, std::nullopt, 0.0});
    CHECK(m.str() == "regime,1,2\n1,0,\n2,,0\n");
}

TEST_CASE("similarity and recovery JSON") {
    regimes::SimilarityMatrix m;
    m.size = 3;
    m.mean_abs = {0.0, 2.0, 5.0, 2.0, 0.0, std::nullopt, 5.0, std::nullopt, 0.0};
    m.area = m.mean_abs;
    m.nearest_non_adjacent = {2, std::nullopt, 0};
    const auto j = report::to_json(m);
    CHECK(j.at("support_policy") == "intersection");
    CHECK(j.at("mean_abs_eur_mwh")[1][2].is_null());
    CHECK(j.at("nearest_non_adjacent")[0].at("nearest_non_adjacent") == 3);
    CHECK(j.at("nearest_non_adjacent")[0].at("mean_abs_eur_mwh") == 5.0);
    CHECK(j.at("nearest_non_adjacent")[1].at("nearest_non_adjacent").is_null());

    synth::RecoveryScore score;
    score.shift_date_errors = {1L, std::nullopt};
    score.missed = 1;
    const auto s = report::to_json(score);
    CHECK(s.at("shift_date_errors")[0] == 1);
    CHECK(s.at("shift_date_errors")[1].is_null());
    CHECK(s.at("missed") == 1);
}

TEST_CASE("SHA-256 of files") {
    const auto dir = scratch("sha");
    report::write_text(dir / "abc.txt", "abc");
    CHECK(report::sha256_file(dir / "abc.txt") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    report::write_text(dir / "empty.txt", "");
    CHECK(report::sha256_file(dir / "empty.txt") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK_THROWS_AS(report::sha256_file(dir / "missing"), Error);
}

TEST_CASE("JSON files") {
    const auto dir = scratch("json");
    report::write_json(dir / "nested" / "a.json", report::Json{{"x", 1.5}});
    CHECK(report::read_json(dir / "nested" / "a.json").at("x") == 1.5);
    report::write_text(dir / "bad.json", "{");
    CHECK_THROWS_AS(report::read_json(dir / "bad.json"), Error);
    CHECK_THROWS_AS(report::read_json(dir / "none.json"), Error);
}

TEST_CASE("bundle round trip") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 7.0);
    const auto series = testing::make_series(3, 24, [&](std::size_t, int h) {
        return std::pair{30000.0 + 1234.567 * h, 50.0 + noise(rng)};
    });
    report::Bundle b;
    b.equilibria = series;
    DailyDriver gas;
    gas.name = "gas";
    gas.values = {20.1, 22.0 / 3.0, -1.0};
    b.drivers["gas"] = gas;
    const auto dir = scratch("bundle");
    report::write_bundle(dir, b);
    const auto back = report::load_bundle(dir);
    REQUIRE(back.equilibria.days() == 3);
    REQUIRE(back.equilibria.observations().size() == 72);
    for (std::size_t i = 0; i < 72; ++i) {
        const auto& x = series.observations()[i];
        const auto& y = back.equilibria.observations()[i];
        CHECK(x.price == y.price);
        CHECK(x.residual_load == y.residual_load);
        CHECK(x.hour_of_day == y.hour_of_day);
        CHECK(x.day_index == y.day_index);
    }
    CHECK(back.equilibria.dates() == series.dates());
    CHECK(back.drivers.at("gas").values == gas.values);

    fs::remove(dir / report::kDriversFile);
    CHECK(report::load_bundle(dir).drivers.empty());
}

TEST_CASE("bundle parse errors") {
    std::istringstream missing("date,hour,price_eur_mwh\n");
    CHECK_THROWS_AS(report::parse_equilibria_csv(missing), Error);
    std::istringstream bad_hour(
        "date,hour,residual_load_mw,price_eur_mwh\n2020-01-01,0,1,2\n2020-01-01,24,1,2\n");
    try {
        report::parse_equilibria_csv(bad_hour);
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
    }
    std::istringstream backwards(
        "date,hour,residual_load_mw,price_eur_mwh\n2020-01-02,0,1,2\n2020-01-01,0,1,2\n");
    CHECK_THROWS_AS(report::parse_equilibria_csv(backwards), ParseError);

    const auto dates = calendar(2);
    std::istringstream wrong("date,gas\n2022-12-30,1\n2022-12-30,2\n");
    CHECK_THROWS_AS(report::parse_drivers_csv(wrong, dates), ParseError);
    std::istringstream short_file("date,gas\n2022-12-30,1\n");
    CHECK_THROWS_AS(report::parse_drivers_csv(short_file, dates), Error);
    std::istringstream no_date("gas\n1\n");
    CHECK_THROWS_AS(report::parse_drivers_csv(no_date, dates), Error);
}
