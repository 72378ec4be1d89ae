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
#include <supreg/regimes.hpp>

#include <doctest.h>

using namespace supreg;
using namespace supreg::regimes;
using pwlf::PiecewiseLinearCurve;

namespace {

SweepResult ratios(std::initializer_list<std::pair<std::size_t, double>> pts) {
    SweepResult s;
    s.baseline = 1.0;
    for (auto [m, r] : pts) {
        SweepPoint p;
        p.regime_count = m;
        p.unexplained_ratio = r;
        p.cost = r;
        s.points.push_back(p);
    }
    return s;
}

CauseCost blocks_cost(std::uint64_t seed, std::size_t n = 90, double jump = 4.0) {
    DailyDriver d;
    d.name = "x";
    d.values = testing::gaussian(n, seed);
    for (std::size_t t = 0; t < n; ++t)
        d.values[t] += jump * static_cast<double>((t / 30) % 2) + 0.5 * static_cast<double>(t / 45);
    DailyDriver e = d;
    e.name = "y";
    e.values = testing::gaussian(n, seed + 1000);
    return CauseCost(make_custom_panel({d, e}));
}

PiecewiseLinearCurve line(double intercept, double slope, double lo = 0.0, double hi = 100.0) {
    const std::vector<double> s{slope};
    return PiecewiseLinearCurve::from_slopes({lo, hi}, intercept, s);
}

} // namespace

TEST_CASE("thresholds on hand-made ratio curves") {
    auto s = ratios({{1, 1.0}, {2, 0.4}, {3, 0.1}});
    const auto zero = resolve_threshold(s, 0.0);
    CHECK(zero.regime_count == 1);
    CHECK_FALSE(zero.interpolated);

    // 80% needs a ratio of at most 0.2; two regimes leave 0.4 unexplained
    const auto r80 = resolve_threshold(s, 0.8);
    CHECK(r80.regime_count == 3);
    CHECK_FALSE(r80.interpolated);
    CHECK_FALSE(r80.nearest_observed.has_value());

    const auto r60 = resolve_threshold(s, 0.6);
    CHECK(r60.regime_count == 2);
    CHECK_THROWS_AS(resolve_threshold(s, 0.95), Error);
    try {
        resolve_threshold(s, 0.95);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Unreachable);
    }

    auto gap = ratios({{1, 1.0}, {5, 0.06}});
    const auto r90 = resolve_threshold(gap, 0.9);
    CHECK(r90.interpolated);
    // 1 + (1 - 0.1) / (1 - 0.06) * 4
    CHECK(r90.interpolated_count == doctest::Approx(1.0 + 0.9 / 0.94 * 4.0));
    CHECK(r90.regime_count == 5);
    CHECK(r90.nearest_observed == std::optional<std::size_t>{5});

    // an unobserved count between two swept ones
    auto wide = ratios({{1, 1.0}, {2, 0.5}, {10, 0.1}});
    const auto r80w = resolve_threshold(wide, 0.8);
    // 2 + (0.5 - 0.2) / (0.5 - 0.1) * 8 = 8
    CHECK(r80w.interpolated_count == doctest::Approx(8.0));
    CHECK(r80w.regime_count == 8);
    CHECK(r80w.nearest_observed == std::optional<std::size_t>{10});

    // the m = 1 point is implicit when the grid never reached it
    auto no_one = ratios({{3, 0.3}});
    const auto implicit = resolve_threshold(no_one, 0.7);
    CHECK(implicit.interpolated);
    CHECK(implicit.regime_count == 3);
    CHECK(implicit.interpolated_count == doctest::Approx(3.0));

    CHECK_THROWS_AS(resolve_threshold(s, 1.0), Error);
    resolve_thresholds(s, std::vector<double>{0.0, 0.6});
    CHECK(s.thresholds_resolved.size() == 2);
    CHECK(s.thresholds_resolved.at(0.6).regime_count == 2);
}

TEST_CASE("default penalty grid") {
    const auto g = default_beta_grid(500.0);
    REQUIRE(g.size() == 60);
    CHECK(g.front() == doctest::Approx(500.0 * 1e-6));
    CHECK(g.back() == 500.0);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] > g[i - 1]);
        CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-9));
    }
    CHECK(default_beta_grid(0.0, 3).back() == 1.0);
    CHECK(default_beta_grid(7.0, 1) == std::vector<double>{7.0});
    CHECK_THROWS_AS(default_beta_grid(1.0, 0), Error);
}

TEST_CASE("a single huge penalty gives one point at ratio 1") {
    const auto cost = blocks_cost(1);
    const std::vector<double> grid{1e12};
    const auto s = sweep_penalty(cost, 90, grid);
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0].regime_count == 1);
    CHECK(s.points[0].unexplained_ratio == 1.0);
    CHECK(s.baseline == doctest::Approx(cost.cost(0, 89)));
    const std::vector<double> unsorted{2.0, 1.0};
    CHECK_THROWS_AS(sweep_penalty(cost, 90, unsorted), Error);
}

TEST_CASE("sweeps are monotone") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto cost = blocks_cost(10 + seed);
        const auto grid = default_beta_grid(baseline_cost(cost, 90));
        pelt::CostCache cache;
        const auto s = sweep_penalty(cost, 90, grid, cache);
        REQUIRE(s.runs.size() == grid.size());
        for (std::size_t i = 1; i < s.runs.size(); ++i)
            CHECK(s.runs[i].regime_count <= s.runs[i - 1].regime_count);
        CHECK(s.points.front().regime_count < s.points.back().regime_count);
        for (std::size_t i = 1; i < s.points.size(); ++i) {
            CHECK(s.points[i].regime_count > s.points[i - 1].regime_count);
            CHECK(s.points[i].unexplained_ratio <= s.points[i - 1].unexplained_ratio);
        }
        for (const auto& p : s.points) {
            CHECK(p.unexplained_ratio >= 0.0);
            CHECK(p.unexplained_ratio <= 1.0);
            if (p.regime_count == 1)
                CHECK(p.unexplained_ratio == 1.0);
        }

        const auto plain = sweep_penalty(cost, 90, grid);
        for (std::size_t i = 0; i < s.runs.size(); ++i)
            CHECK(plain.runs[i].segmentation.changepoints == s.runs[i].segmentation.changepoints);
    }
}

TEST_CASE("targeting a regime count agrees with the sweep") {
    const auto cost = blocks_cost(20);
    const auto grid = default_beta_grid(baseline_cost(cost, 90), 40);
    pelt::CostCache cache;
    const auto s = sweep_penalty(cost, 90, grid, cache);
    for (const auto& p : s.points) {
        const auto t = segment_to_count(cost, 90, p.regime_count, cache);
        CHECK(t.exact);
        CHECK(t.segmentation.regime_count() == p.regime_count);
        CHECK(pelt::segments_cost(cost, t.segmentation) == doctest::Approx(p.cost).epsilon(1e-9));
    }
    const auto one = segment_to_count(cost, 90, 1, cache);
    CHECK(one.exact);
    CHECK(one.segmentation.regime_count() == 1);
    const auto all = segment_to_count(cost, 90, 90, cache);
    CHECK(all.segmentation.regime_count() == 90);
    CHECK_THROWS_AS(segment_to_count(cost, 90, 0, cache), Error);
}

TEST_CASE("an unattainable count reports its neighbours") {
    // a shift of exactly twice the noise-free size: m = 2 and m = 3 tie
    DailyDriver d;
    d.name = "x";
    d.values = {0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0};
    const CauseCost cost(make_custom_panel({d}));
    pelt::CostCache cache;
    const auto r = segment_to_count(cost, 12, 2, cache);
    CHECK_FALSE(r.exact);
    REQUIRE(r.below.has_value());
    REQUIRE(r.above.has_value());
    CHECK(r.below->regime_count() < 2);
    CHECK(r.above->regime_count() > 2);
    const auto three = segment_to_count(cost, 12, 3, cache);
    CHECK(three.exact);
    CHECK(three.segmentation.changepoints == std::vector<std::size_t>{3, 7});
}

TEST_CASE("noise penalty") {
    DailyDriver d;
    d.name = "x";
    d.values = testing::gaussian(200, 30, 2.0, 10.0);
    const CauseCost noise(make_custom_panel({d}));
    const double beta = noise_penalty(noise, 200);
    // factor 2, one driver: 2 * 2 * sigma^2 * log(200) with sigma^2 near 4
    CHECK(beta > 2 * 2 * 2.0 * std::log(200.0));
    CHECK(beta < 2 * 2 * 8.0 * std::log(200.0));
    CHECK(pelt::segment(noise, 200, beta).regime_count() == 1);

    for (std::size_t t = 120; t < 200; ++t)
        d.values[t] += 10.0;
    const CauseCost step(make_custom_panel({d}));
    const auto seg = pelt::segment(step, 200, noise_penalty(step, 200));
    CHECK(seg.changepoints == std::vector<std::size_t>{119});

    CHECK_THROWS_AS(noise_penalty(step, 200, 1), Error);
    CHECK_THROWS_AS(noise_penalty(step, 3, 5), Error);
}

TEST_CASE("regime curves cover the sample") {
    std::mt19937_64 rng(40);
    std::uniform_real_distribution<double> load(30000.0, 70000.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto series = testing::make_series(20, 24, [&](std::size_t d, int) {
        const double q = load(rng);
        return std::pair{q, (d < 8 ? 20.0 : 60.0) + 0.001 * q + noise(rng)};
    });
    pelt::Segmentation seg;
    seg.n_days = 20;
    seg.changepoints = {7, 14};
    const auto set = fit_regime_curves(series, seg, CurveSpec::e3());
    REQUIRE(set.regimes.size() == 3);
    double coverage = 0.0;
    std::size_t hours = 0;
    for (const auto& r : set.regimes) {
        coverage += r.coverage;
        hours += r.hours;
        CHECK(r.support.lower >= 30000.0);
        CHECK(r.support.upper <= 70000.0);
        CHECK(r.fit.r_squared > 0.9);
        CHECK(r.fit.n_points == r.hours);
    }
    CHECK(coverage == doctest::Approx(1.0));
    CHECK(hours == series.hours());
    CHECK(set.regimes[1].first_day == 8);
    CHECK(set.regimes[1].last_day == 14);
    CHECK(set.dates.size() == 20);

    pelt::Segmentation whole;
    whole.n_days = 20;
    const auto single = fit_regime_curves(series, whole, CurveSpec::e1());
    REQUIRE(single.regimes.size() == 1);
    CHECK(single.regimes[0].hours == 480);
    CHECK(single.regimes[0].coverage == 1.0);

    const EffectCost cost(series, CurveSpec::e3());
    const auto reused = fit_regime_curves(cost, seg);
    CHECK(cost.cached_fits() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(reused.regimes[i].fit.ssr == doctest::Approx(set.regimes[i].fit.ssr).epsilon(1e-9));

    pelt::Segmentation wrong;
    wrong.n_days = 19;
    CHECK_THROWS_AS(fit_regime_curves(series, wrong, CurveSpec::e1()), Error);
}

TEST_CASE("curve distance") {
    const auto a = line(10.0, 0.5);
    const Support s{0.0, 100.0};
    CHECK(curve_distance(a, a, s, s).area == 0.0);
    const auto b = line(15.0, 0.5);
    const auto d = curve_distance(a, b, s, s);
    CHECK(d.mean_abs == doctest::Approx(5.0));
    CHECK(d.area == doctest::Approx(500.0));

    // crossing lines: |x - 50| over [0, 100] has area 2500
    const auto c = line(-50.0, 1.0);
    const auto flat = line(0.0, 0.0);
    CHECK(curve_distance(c, flat, s, s).area == doctest::Approx(2500.0));

    // intersection versus union of supports
    const Support left{0.0, 60.0}, right{40.0, 100.0};
    const auto inter = curve_distance(a, b, left, right);
    CHECK(inter.support.lower == 40.0);
    CHECK(inter.support.upper == 60.0);
    CHECK(inter.area == doctest::Approx(100.0));
    const auto uni = curve_distance(a, b, left, right, SupportPolicy::Union);
    CHECK(uni.area == doctest::Approx(500.0));

    try {
        curve_distance(a, b, Support{0, 10}, Support{20, 30});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyOverlap);
    }
    CHECK(parse_support_policy(to_string(SupportPolicy::Union)) == SupportPolicy::Union);
}

TEST_CASE("curve distance matches dense trapezoid sampling") {
    std::mt19937_64 rng(50);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = testing::random_curve(rng, 0.0, 100.0, 1 + trial % 3);
        const auto b = testing::random_curve(rng, 0.0, 100.0, 1 + (trial + 1) % 3);
        const Support s{0.0, 100.0};
        const double exact = curve_distance(a, b, s, s).area;
        const double dense = testing::trapezoid(
            [&](double q) { return std::fabs(pwlf::evaluate(a, q) - pwlf::evaluate(b, q)); }, 0.0,
            100.0, 10000);
        CHECK(std::fabs(exact - dense) <= 1e-4 * dense);
    }
}

TEST_CASE("curve distance is a pseudometric") {
    std::mt19937_64 rng(60);
    const Support s{10.0, 90.0};
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = testing::random_curve(rng, 0.0, 100.0, 2);
        const auto b = testing::random_curve(rng, 0.0, 100.0, 1);
        const auto c = testing::random_curve(rng, 0.0, 100.0, 3);
        const double ab = curve_distance(a, b, s, s).area;
        const double ba = curve_distance(b, a, s, s).area;
        const double bc = curve_distance(b, c, s, s).area;
        const double ac = curve_distance(a, c, s, s).area;
        CHECK(ab >= 0.0);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ac <= ab + bc + 1e-9 * (ab + bc));
    }
}

TEST_CASE("similarity matrices") {
    const Support s{0.0, 100.0};
    const std::vector<PiecewiseLinearCurve> curves{line(10, 1), line(15, 1), line(19, 1)};
    const std::vector<Support> supports(3, s);
    const auto m = similarity_matrix(curves, supports);
    CHECK(*m.at(0, 1) == doctest::Approx(5.0));
    CHECK(*m.at(0, 2) == doctest::Approx(9.0));
    CHECK(*m.at(1, 2) == doctest::Approx(4.0));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(*m.at(i, i) == 0.0);
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(*m.at(i, j) == *m.at(j, i));
    }
    CHECK(m.nearest_non_adjacent[0] == std::optional<std::size_t>{2});
    CHECK(m.nearest_non_adjacent[2] == std::optional<std::size_t>{0});
    CHECK_FALSE(m.nearest_non_adjacent[1].has_value());

    const std::vector<PiecewiseLinearCurve> same(4, line(3, 2));
    const auto zero = similarity_matrix(same, std::vector<Support>(4, s));
    for (const auto& v : zero.mean_abs)
        CHECK(*v == 0.0);

    const std::vector<Support> apart{{0, 10}, {20, 30}};
    const std::vector<PiecewiseLinearCurve> two{line(1, 1), line(2, 1)};
    const auto sparse = similarity_matrix(two, apart);
    CHECK_FALSE(sparse.at(0, 1).has_value());
    CHECK(sparse.at(0, 0).has_value());

    const std::vector<PiecewiseLinearCurve> lone{line(1, 1)};
    CHECK_THROWS_AS(similarity_matrix(lone, std::vector<Support>{s}), Error);
}
