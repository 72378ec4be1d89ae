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

// Exact penalized segmentation of day-indexed data with the PELT recursion.
//
// A segmentation of days [0, n) into contiguous regimes minimises
//
//     sum of segment costs + penalty * regime_count.
//
// Pruning is exact (constant K = 0) for segment costs that are subadditive:
// cost(s, t) + cost(t + 1, u) <= cost(s, u).

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

namespace supreg {

/// Cost of one candidate regime covering days [first_day, last_day].
class SegmentCost {
public:
    virtual ~SegmentCost() = default;

    virtual double cost(std::size_t first_day, std::size_t last_day) const = 0;
    virtual std::size_t min_segment_length() const = 0;
    virtual std::size_t days() const = 0;
};

namespace pelt {

struct Segmentation {
    /// Last day of every regime except the final one, strictly increasing.
    std::vector<std::size_t> changepoints;
    double penalty = 0.0;
    /// Sum of segment costs plus penalty * regime_count.
    double total_cost = 0.0;
    std::size_t n_days = 0;

    std::size_t regime_count() const noexcept { return changepoints.size() + 1; }
    /// Inclusive [first, last] day ranges of every regime.
    std::vector<std::pair<std::size_t, std::size_t>> regimes() const;
    /// First day of every regime after the first.
    std::vector<std::size_t> shift_days() const;
};

/// Memo of segment costs keyed by (first_day, last_day). Safe for
/// concurrent use; bound to the first cost object it serves.
class CostCache {
public:
    double get(const SegmentCost& cost, std::size_t first_day, std::size_t last_day);
    void clear();
    std::size_t size() const;
    /// Cost evaluations performed because of a miss.
    std::size_t evaluations() const noexcept { return evaluations_.load(); }

private:
    static std::uint64_t key(std::size_t first_day, std::size_t last_day) {
        return (static_cast<std::uint64_t>(first_day) << 32) | static_cast<std::uint64_t>(last_day);
    }

    mutable std::shared_mutex mutex_;
    std::unordered_map<std::uint64_t, double> values_;
    const SegmentCost* owner_ = nullptr;
    std::atomic<std::size_t> evaluations_{0};
};

struct Options {
    bool prune = true;
    /// Pruning constant K; candidates with F(tau) + C + K > F(t) are dropped.
    double pruning_margin = 0.0;
    /// Worker threads for the candidate evaluations of one step.
    std::size_t jobs = 1;
};

/// Working state of the recursion over partition boundaries 0..n.
struct PeltState {
    std::vector<double> best;               // F(t), F(0) = -penalty
    std::vector<std::size_t> previous;      // argmin boundary for F(t)
    std::vector<std::size_t> candidates;    // R, ascending
    std::vector<std::size_t> retire_after;  // step from which a candidate is dead
    std::size_t min_segment_length = 1;
    double penalty = 0.0;
    double margin = 0.0;

    static constexpr std::size_t kAlive = std::numeric_limits<std::size_t>::max();
};

/// Candidate update after F(tau_star) is known. `segment_cost(tau)` returns
/// the cost of days [tau, tau_star - 1]. A candidate failing the test is
/// retired from step tau_star + min_segment_length on; expired candidates are
/// removed and tau_star is appended when reachable.
void prune_candidates(PeltState& state, std::size_t tau_star,
                      const std::function<double(std::size_t)>& segment_cost);

Segmentation segment(const SegmentCost& cost, std::size_t n_days, double penalty,
                     const Options& options = {});

Segmentation segment_with_cache(const SegmentCost& cost, std::size_t n_days, double penalty,
                                CostCache& cache, const Options& options = {});

/// Sum of segment costs of a segmentation, recomputed from scratch.
double segments_cost(const SegmentCost& cost, const Segmentation& seg);
double segments_cost(const SegmentCost& cost, const Segmentation& seg, CostCache& cache);

} // namespace pelt
} // namespace supreg
