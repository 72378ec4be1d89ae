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
#include <supreg/pelt.hpp>

#include <supreg/error.hpp>
#include <supreg/worker_pool.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

namespace supreg::pelt {

std::vector<std::pair<std::size_t, std::size_t>> Segmentation::regimes() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t first = 0;
    for (std::size_t cp : changepoints) {
        out.emplace_back(first, cp);
        first = cp + 1;
    }
    if (n_days > 0)
        out.emplace_back(first, n_days - 1);
    return out;
}

std::vector<std::size_t> Segmentation::shift_days() const {
    std::vector<std::size_t> out;
    out.reserve(changepoints.size());
    for (std::size_t cp : changepoints)
        out.push_back(cp + 1);
    return out;
}

double CostCache::get(const SegmentCost& cost, std::size_t first_day, std::size_t last_day) {
    const auto k = key(first_day, last_day);
    {
        std::shared_lock lock(mutex_);
        if (owner_ != nullptr && owner_ != &cost)
            throw Error(ErrorCode::InvalidArgument, "cost cache is bound to another cost object");
        auto it = values_.find(k);
        if (it != values_.end())
            return it->second;
    }
    const double value = cost.cost(first_day, last_day);
    evaluations_.fetch_add(1);
    std::unique_lock lock(mutex_);
    if (owner_ == nullptr)
        owner_ = &cost;
    values_.emplace(k, value);
    return value;
}

void CostCache::clear() {
    std::unique_lock lock(mutex_);
    values_.clear();
    owner_ = nullptr;
    evaluations_.store(0);
}

std::size_t CostCache::size() const {
    std::shared_lock lock(mutex_);
    return values_.size();
}

void prune_candidates(PeltState& state, std::size_t tau_star,
                      const std::function<double(std::size_t)>& segment_cost) {
    const double f_star = state.best[tau_star];
    if (std::isfinite(f_star)) {
        for (std::size_t tau : state.candidates) {
            if (tau_star - tau < state.min_segment_length ||
                state.retire_after[tau] != PeltState::kAlive)
                continue;
            if (state.best[tau] + segment_cost(tau) + state.margin > f_star)
                state.retire_after[tau] = tau_star + state.min_segment_length;
        }
    }
    // keep candidates still usable at the next step
    std::erase_if(state.candidates, [&](std::size_t tau) {
        return state.retire_after[tau] <= tau_star + 1 || !std::isfinite(state.best[tau]);
    });
    if (std::isfinite(f_star))
        state.candidates.push_back(tau_star);
}

namespace {

Segmentation run(const SegmentCost& cost, std::size_t n_days, double penalty,
                 const Options& options,
                 const std::function<double(std::size_t, std::size_t)>& evaluate) {
    const std::size_t min_len = std::max<std::size_t>(cost.min_segment_length(), 1);
    if (!(penalty >= 0.0) || !std::isfinite(penalty))
        throw Error(ErrorCode::InvalidArgument, "penalty must be finite and >= 0");
    if (n_days == 0 || n_days < min_len)
        throw Error(ErrorCode::TooShort, std::to_string(n_days) + " days, minimum segment " +
                                             std::to_string(min_len));
    if (n_days > cost.days())
        throw Error(ErrorCode::OutOfRange, "cost covers only " + std::to_string(cost.days()) + " days");

    PeltState state;
    state.best.assign(n_days + 1, std::numeric_limits<double>::infinity());
    state.previous.assign(n_days + 1, 0);
    state.retire_after.assign(n_days + 1, PeltState::kAlive);
    state.best[0] = -penalty;
    state.candidates = {0};
    state.min_segment_length = min_len;
    state.penalty = penalty;
    state.margin = options.pruning_margin;

    WorkerPool pool(options.jobs);
    std::vector<std::size_t> eligible;
    std::vector<double> costs(n_days + 1, 0.0);

    for (std::size_t t = 1; t <= n_days; ++t) {
        eligible.clear();
        for (std::size_t tau : state.candidates)
            if (t - tau >= min_len)
                eligible.push_back(tau);

        pool.parallel_for(eligible.size(), [&](std::size_t i) {
            const std::size_t tau = eligible[i];
            try {
                costs[tau] = evaluate(tau, t - 1);
            } catch (const Error& e) {
                throw Error(ErrorCode::CostEvaluationFailure,
                            "segment [" + std::to_string(tau) + ", " + std::to_string(t - 1) +
                                "]: " + e.what());
            }
            if (!std::isfinite(costs[tau]) || costs[tau] < 0.0)
                throw Error(ErrorCode::CostEvaluationFailure,
                            "segment [" + std::to_string(tau) + ", " + std::to_string(t - 1) +
                                "] has invalid cost");
        });

        // ties go to the larger tau (shorter final segment)
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t tau : eligible) {
            const double value = state.best[tau] + costs[tau] + penalty;
            if (value <= best) {
                best = value;
                arg = tau;
            }
        }
        state.best[t] = best;
        state.previous[t] = arg;

        if (options.prune) {
            prune_candidates(state, t, [&](std::size_t tau) { return costs[tau]; });
        } else if (std::isfinite(best)) {
            state.candidates.push_back(t);
        }
    }

    if (!std::isfinite(state.best[n_days]))
        throw Error(ErrorCode::TooShort, "no admissible segmentation");

    Segmentation seg;
    seg.penalty = penalty;
    seg.n_days = n_days;
    seg.total_cost = state.best[n_days] + penalty;
    for (std::size_t t = n_days; t > 0;) {
        const std::size_t tau = state.previous[t];
        if (tau > 0)
            seg.changepoints.push_back(tau - 1);
        t = tau;
    }
    std::reverse(seg.changepoints.begin(), seg.changepoints.end());
    return seg;
}

} // namespace

Segmentation segment(const SegmentCost& cost, std::size_t n_days, double penalty,
                     const Options& options) {
    return run(cost, n_days, penalty, options,
               [&](std::size_t a, std::size_t b) { return cost.cost(a, b); });
}

Segmentation segment_with_cache(const SegmentCost& cost, std::size_t n_days, double penalty,
                                CostCache& cache, const Options& options) {
    return run(cost, n_days, penalty, options,
               [&](std::size_t a, std::size_t b) { return cache.get(cost, a, b); });
}

double segments_cost(const SegmentCost& cost, const Segmentation& seg) {
    double total = 0.0;
    for (auto [a, b] : seg.regimes())
        total += cost.cost(a, b);
    return total;
}

double segments_cost(const SegmentCost& cost, const Segmentation& seg, CostCache& cache) {
    double total = 0.0;
    for (auto [a, b] : seg.regimes())
        total += cache.get(cost, a, b);
    return total;
}

} // namespace supreg::pelt
