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
#include <supreg/pelt.hpp>

#include <doctest.h>

using namespace supreg;

namespace {

CauseCost series_cost(std::vector<double> values, std::size_t min_len = 1) {
    DailyDriver d;
    d.name = "x";
    d.values = std::move(values);
    return CauseCost(make_custom_panel({d}), min_len);
}

std::vector<double> step_series(std::uint64_t seed) {
    auto v = testing::gaussian(200, seed);
    for (std::size_t t = 100; t < 200; ++t)
        v[t] += 10.0;
    return v;
}

} // namespace

TEST_CASE("segmentation bookkeeping") {
    pelt::Segmentation seg;
    seg.n_days = 10;
    seg.changepoints = {2, 6};
    CHECK(seg.regime_count() == 3);
    const auto r = seg.regimes();
    REQUIRE(r.size() == 3);
    CHECK(r[0] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(r[1] == std::pair<std::size_t, std::size_t>{3, 6});
    CHECK(r[2] == std::pair<std::size_t, std::size_t>{7, 9});
    CHECK(seg.shift_days() == std::vector<std::size_t>{3, 7});
}

TEST_CASE("a level step is found at the 99/100 boundary") {
    const auto v = step_series(1);
    const auto cost = series_cost(v);
    const double beta = 3.0 * std::log(200.0);
    const auto seg = pelt::segment(cost, 200, beta);
    REQUIRE(seg.changepoints.size() == 1);
    CHECK(seg.changepoints[0] == 99);
    const auto oracle = testing::optimal_partition(cost, 200, beta);
    CHECK(oracle.changepoints == seg.changepoints);
    CHECK(seg.total_cost == doctest::Approx(oracle.objective).epsilon(1e-12));
}

TEST_CASE("constant panels and huge penalties give one regime") {
    const auto flat = series_cost(std::vector<double>(30, 4.0));
    for (double beta : {1e-9, 1.0, 100.0}) {
        const auto seg = pelt::segment(flat, 30, beta);
        CHECK(seg.regime_count() == 1);
        CHECK(seg.total_cost == doctest::Approx(beta));
    }
    const auto cost = series_cost(step_series(2));
    CHECK(pelt::segment(cost, 200, 1e12).regime_count() == 1);
}

TEST_CASE("matches unpruned optimal partitioning on random series") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = 20 + seed % 25;
        auto v = testing::gaussian(n, 300 + seed);
        for (std::size_t t = n / 3; t < n; ++t)
            v[t] += (seed % 3) * 2.0;
        const std::size_t min_len = 1 + seed % 4;
        const auto cost = series_cost(v, min_len);
        const double beta = 0.5 + static_cast<double>(seed % 7);
        const auto seg = pelt::segment(cost, n, beta);
        const auto oracle = testing::optimal_partition(cost, n, beta);
        CHECK(seg.changepoints == oracle.changepoints);
        CHECK(seg.total_cost == doctest::Approx(oracle.objective).epsilon(1e-10));
        for (auto [a, b] : seg.regimes())
            CHECK(b - a + 1 >= min_len);
    }
}

TEST_CASE("pruning never changes the answer") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 60;
        auto v = testing::gaussian(n, 900 + seed, 1.0);
        for (std::size_t t = 0; t < n; ++t)
            v[t] += (t / 15) % 2 == 0 ? 0.0 : 1.5;
        const auto cost = series_cost(v, 1 + seed % 3);
        const double beta = 1.0 + static_cast<double>(seed % 5);
        pelt::Options pruned, full;
        full.prune = false;
        const auto a = pelt::segment(cost, n, beta, pruned);
        const auto b = pelt::segment(cost, n, beta, full);
        CHECK(a.changepoints == b.changepoints);
        CHECK(a.total_cost == b.total_cost);
    }
}

TEST_CASE("pruning saves cost evaluations on long series") {
    auto v = testing::gaussian(400, 5);
    for (std::size_t t = 0; t < 400; ++t)
        v[t] += static_cast<double>((t / 50) % 2) * 5.0;
    const auto base = series_cost(v);
    testing::FunctionCost counted(400, 1, [&](std::size_t a, std::size_t b) { return base.cost(a, b); });
    pelt::segment(counted, 400, 20.0);
    const std::size_t pruned_calls = counted.calls;
    counted.calls = 0;
    pelt::Options full;
    full.prune = false;
    pelt::segment(counted, 400, 20.0, full);
    CHECK(pruned_calls * 5 < counted.calls);
}

TEST_CASE("total cost is segment costs plus penalty per regime") {
    const auto v = step_series(3);
    const auto cost = series_cost(v, 2);
    for (double beta : {0.5, 5.0, 50.0}) {
        const auto seg = pelt::segment(cost, 200, beta);
        CHECK(seg.total_cost ==
              doctest::Approx(pelt::segments_cost(cost, seg) +
                              beta * static_cast<double>(seg.regime_count()))
                  .epsilon(1e-12));
        CHECK(seg.penalty == beta);
        CHECK(seg.n_days == 200);
    }
}

TEST_CASE("thread count does not change the result") {
    const auto v = step_series(4);
    const auto cost = series_cost(v, 3);
    pelt::Options one, four;
    four.jobs = 4;
    for (double beta : {0.1, 2.0, 30.0}) {
        const auto a = pelt::segment(cost, 200, beta, one);
        const auto b = pelt::segment(cost, 200, beta, four);
        CHECK(a.changepoints == b.changepoints);
        CHECK(a.total_cost == b.total_cost);
    }
}

TEST_CASE("cost cache is transparent") {
    auto v = testing::gaussian(50, 6);
    for (std::size_t t = 25; t < 50; ++t)
        v[t] += 3.0;
    const auto cost = series_cost(v);
    pelt::CostCache cache;
    const auto first = pelt::segment_with_cache(cost, 50, 4.0, cache);
    const std::size_t evaluations = cache.evaluations();
    CHECK(evaluations > 0);
    const auto second = pelt::segment_with_cache(cost, 50, 4.0, cache);
    CHECK(cache.evaluations() == evaluations);
    CHECK(second.changepoints == first.changepoints);

    for (int i = 0; i < 10; ++i) {
        const double beta = 0.2 * std::pow(2.0, i);
        const auto cached = pelt::segment_with_cache(cost, 50, beta, cache);
        const auto plain = pelt::segment(cost, 50, beta);
        CHECK(cached.changepoints == plain.changepoints);
        CHECK(cached.total_cost == plain.total_cost);
    }
    cache.clear();
    CHECK(cache.size() == 0);
    CHECK(pelt::segment_with_cache(cost, 50, 4.0, cache).changepoints == first.changepoints);

    const auto other = series_cost(v);
    CHECK_THROWS_AS(cache.get(other, 0, 3), Error);
}

TEST_CASE("first pruning step keeps both candidates") {
    pelt::PeltState state;
    state.best = {-1.0, 0.5, 0.0};
    state.previous = {0, 0, 0};
    state.retire_after = {pelt::PeltState::kAlive, pelt::PeltState::kAlive,
                          pelt::PeltState::kAlive};
    state.candidates = {0};
    state.min_segment_length = 1;
    state.penalty = 1.0;
    pelt::prune_candidates(state, 1, [](std::size_t) { return 0.5; });
    CHECK(state.candidates == std::vector<std::size_t>{0, 1});
}

TEST_CASE("equal costs sit on the pruning boundary and survive") {
    pelt::PeltState state;
    state.best = {-1.0, 0.0, 0.0};
    state.previous = {0, 0, 0};
    state.retire_after.assign(3, pelt::PeltState::kAlive);
    state.candidates = {0};
    state.min_segment_length = 1;
    // F(0) + C = F(1) exactly: kept
    pelt::prune_candidates(state, 1, [](std::size_t) { return 1.0; });
    CHECK(state.candidates == std::vector<std::size_t>{0, 1});
    // F(0) + C > F(1): retired
    pelt::PeltState again = state;
    again.candidates = {0};
    again.retire_after.assign(3, pelt::PeltState::kAlive);
    pelt::prune_candidates(again, 1, [](std::size_t) { return 1.0 + 1e-9; });
    CHECK(again.candidates == std::vector<std::size_t>{1});
}

TEST_CASE("minimum segment length defers retirement") {
    pelt::PeltState state;
    state.best = {-1.0, INFINITY, 0.0, 0.0};
    state.previous.assign(4, 0);
    state.retire_after.assign(4, pelt::PeltState::kAlive);
    state.candidates = {0};
    state.min_segment_length = 2;
    pelt::prune_candidates(state, 2, [](std::size_t) { return 5.0; });
    // 0 fails the test but stays usable until day 2 + 2
    CHECK(state.retire_after[0] == 4);
    CHECK(state.candidates == std::vector<std::size_t>{0, 2});
}

TEST_CASE("invalid requests") {
    const auto cost = series_cost({1, 2, 3, 4}, 3);
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    CHECK(code([&] { pelt::segment(cost, 2, 1.0); }) == ErrorCode::TooShort);
    CHECK(code([&] { pelt::segment(cost, 4, -1.0); }) == ErrorCode::InvalidArgument);
    CHECK(code([&] { pelt::segment(cost, 5, 1.0); }) == ErrorCode::OutOfRange);

    testing::FunctionCost failing(6, 1, [](std::size_t a, std::size_t b) -> double {
        if (b - a > 2)
            throw Error(ErrorCode::TooFewPoints, "too few");
        return 1.0;
    });
    CHECK(code([&] { pelt::segment(failing, 6, 1.0); }) == ErrorCode::CostEvaluationFailure);
    testing::FunctionCost nan(6, 1, [](std::size_t, std::size_t) { return std::nan(""); });
    CHECK(code([&] { pelt::segment(nan, 6, 1.0); }) == ErrorCode::CostEvaluationFailure);
}
