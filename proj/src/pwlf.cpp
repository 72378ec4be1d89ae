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
#include <supreg/pwlf.hpp>

#include <supreg/error.hpp>

#include "pwlf_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace supreg::pwlf {

// ---------------------------------------------------------------------------
// Curves

PiecewiseLinearCurve PiecewiseLinearCurve::from_slopes(std::vector<double> breakpoints,
                                                       double intercept,
                                                       std::span<const double> slopes) {
    if (breakpoints.size() < 2 || slopes.size() + 1 != breakpoints.size())
        throw Error(ErrorCode::InvalidArgument, "need K >= 2 breakpoints and K - 1 slopes");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw Error(ErrorCode::InvalidArgument, "breakpoints must be sorted");
    PiecewiseLinearCurve c;
    c.breakpoints = std::move(breakpoints);
    c.intercept = intercept;
    c.slope_increments.resize(slopes.size());
    double prev = 0.0;
    for (std::size_t j = 0; j < slopes.size(); ++j) {
        c.slope_increments[j] = slopes[j] - prev;
        prev = slopes[j];
    }
    return c;
}

std::vector<double> PiecewiseLinearCurve::segment_slopes() const {
    std::vector<double> s(slope_increments.size());
    std::partial_sum(slope_increments.begin(), slope_increments.end(), s.begin());
    return s;
}

std::size_t PiecewiseLinearCurve::interior_count() const noexcept {
    return breakpoints.size() < 2 ? 0 : breakpoints.size() - 2;
}

double evaluate(const PiecewiseLinearCurve& curve, double q) {
    const auto& b = curve.breakpoints;
    if (curve.slope_increments.empty())
        return curve.intercept;
    if (q < b.front())
        return curve.intercept + curve.slope_increments.front() * (q - b.front());
    double value = curve.intercept;
    for (std::size_t j = 0; j < curve.slope_increments.size(); ++j) {
        if (q <= b[j])
            break;
        value += curve.slope_increments[j] * (q - b[j]);
    }
    return value;
}

PiecewiseLinearCurve collapse(const PiecewiseLinearCurve& curve) {
    const auto slopes = curve.segment_slopes();
    std::vector<double> bps{curve.breakpoints.front()};
    std::vector<double> kept;
    for (std::size_t j = 0; j < slopes.size(); ++j) {
        if (curve.breakpoints[j + 1] > bps.back()) {
            bps.push_back(curve.breakpoints[j + 1]);
            kept.push_back(slopes[j]);
        }
    }
    if (kept.empty()) {
        // zero-width curve: keep a single segment so evaluation stays defined
        bps.push_back(curve.breakpoints.back());
        kept.push_back(slopes.empty() ? 0.0 : slopes.back());
    }
    return PiecewiseLinearCurve::from_slopes(std::move(bps), curve.intercept, kept);
}

double sum_of_squares(std::span<const double> y) {
    double s = 0.0;
    for (double v : y)
        s += v * v;
    return s;
}

// ---------------------------------------------------------------------------
// Inner constrained solver

namespace detail {

namespace {

/// Column subset of at most kMaxColumns indices, kept off the heap.
struct ColumnSet {
    int size = 0;
    int index[kMaxColumns];
};

SmallVector solve_on(const SmallMatrix& gram, const SmallVector& rhs, const ColumnSet& set) {
    const int m = set.size;
    SmallMatrix g(m, m);
    SmallVector h(m);
    for (int a = 0; a < m; ++a) {
        h(a) = rhs(set.index[a]);
        for (int b = 0; b < m; ++b)
            g(a, b) = gram(set.index[a], set.index[b]);
    }
    SmallVector z = g.ldlt().solve(h);
    SmallVector out = SmallVector::Zero(gram.rows());
    for (int a = 0; a < m; ++a)
        out(set.index[a]) = std::isfinite(z(a)) ? z(a) : 0.0;
    return out;
}

} // namespace

double quadratic_ssr(const SmallMatrix& gram, const SmallVector& rhs, double yy,
                     const SmallVector& coef) {
    const double v = yy - 2.0 * coef.dot(rhs) + coef.dot(gram * coef);
    return v > 0.0 ? v : 0.0;
}

Solution solve_nonnegative(const SmallMatrix& gram, const SmallVector& rhs, double yy) {
    const int k = static_cast<int>(gram.rows());
    const double diag_scale = std::max(gram.diagonal().cwiseAbs().maxCoeff(), 1e-300);

    // Columns with (numerically) zero norm belong to zero-width segments and
    // stay pinned at zero.
    bool usable[kMaxColumns];
    bool passive[kMaxColumns];
    ColumnSet all;
    for (int j = 0; j < k; ++j) {
        usable[j] = j == 0 || gram(j, j) > 1e-14 * diag_scale;
        passive[j] = j == 0;
        if (usable[j])
            all.index[all.size++] = j;
    }
    SmallVector z = solve_on(gram, rhs, all);
    if ((z.tail(k - 1).array() >= 0.0).all())
        return {z, quadratic_ssr(gram, rhs, yy, z)};

    ColumnSet intercept;
    intercept.index[intercept.size++] = 0;
    SmallVector beta = solve_on(gram, rhs, intercept);
    const double tol = 1e-12 * (rhs.cwiseAbs().maxCoeff() + diag_scale);
    const int max_iter = 4 * k + 8;

    auto passive_set = [&] {
        ColumnSet p;
        for (int j = 0; j < k; ++j)
            if (passive[j])
                p.index[p.size++] = j;
        return p;
    };

    for (int outer = 0; outer < max_iter; ++outer) {
        SmallVector w = rhs - gram * beta;
        int entering = -1;
        double best = tol;
        for (int j = 1; j < k; ++j) {
            if (!passive[j] && usable[j] && w(j) > best) {
                best = w(j);
                entering = j;
            }
        }
        if (entering < 0)
            break;
        passive[entering] = true;

        bool stalled = false;
        for (int inner = 0; inner < max_iter; ++inner) {
            z = solve_on(gram, rhs, passive_set());
            bool feasible = true;
            for (int j = 1; j < k; ++j)
                if (passive[j] && z(j) <= 0.0)
                    feasible = false;
            if (feasible) {
                beta = z;
                break;
            }
            if (inner == 0 && z(entering) <= 0.0) {
                // entering column cannot improve at working precision
                passive[entering] = false;
                stalled = true;
                break;
            }
            double alpha = 1.0;
            for (int j = 1; j < k; ++j) {
                if (passive[j] && z(j) <= 0.0) {
                    const double denom = beta(j) - z(j);
                    if (denom > 0.0)
                        alpha = std::min(alpha, beta(j) / denom);
                }
            }
            beta += alpha * (z - beta);
            for (int j = 1; j < k; ++j) {
                if (passive[j] && beta(j) <= 1e-15 * (1.0 + std::abs(beta(0)))) {
                    passive[j] = false;
                    beta(j) = 0.0;
                }
            }
        }
        if (stalled)
            break;
    }
    for (int j = 1; j < k; ++j)
        beta(j) = std::max(beta(j), 0.0);
    return {beta, quadratic_ssr(gram, rhs, yy, beta)};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Breakpoint search

namespace {

using detail::SmallMatrix;
using detail::SmallVector;

void validate(std::span<const double> x, std::span<const double> y, std::size_t k_interior) {
    if (x.size() != y.size())
        throw Error(ErrorCode::InvalidArgument, "x and y differ in length");
    if (k_interior > kMaxInterior)
        throw Error(ErrorCode::InvalidArgument,
                    "at most " + std::to_string(kMaxInterior) + " interior breakpoints supported");
    if (x.size() < 2 * (k_interior + 2))
        throw Error(ErrorCode::TooFewPoints, std::to_string(x.size()) + " points for " +
                                                 std::to_string(k_interior) +
                                                 " interior breakpoints");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw Error(ErrorCode::NonFinite, "non-finite input at index " + std::to_string(i));
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (!(*hi > *lo))
        throw Error(ErrorCode::DegenerateRange, "x has zero range");
}

/// Data mapped to u = (x - min) / range in [0, 1] and v = (y - mean) / scale,
/// sorted by u, with suffix sums that give the hinge Gram matrix of any
/// breakpoint configuration in O(K^2 + K log n).
class SsrModel {
public:
    SsrModel(std::span<const double> x, std::span<const double> y) {
        const std::size_t n = x.size();
        auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        xmin_ = *lo;
        xmax_ = *hi;
        range_ = xmax_ - xmin_;
        ymean_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
        double dev = 0.0;
        for (double v : y)
            dev = std::max(dev, std::abs(v - ymean_));
        yscale_ = dev > 0.0 ? dev : 1.0;

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
        u_.resize(n);
        v_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = x[order[i]];
            u_[i] = xi == xmax_ ? 1.0 : (xi - xmin_) / range_;
            v_[i] = (y[order[i]] - ymean_) / yscale_;
        }

        su_.assign(n + 1, 0.0);
        suu_.assign(n + 1, 0.0);
        sv_.assign(n + 1, 0.0);
        suv_.assign(n + 1, 0.0);
        long double a = 0, b = 0, c = 0, d = 0, e = 0;
        for (std::size_t i = n; i-- > 0;) {
            a += u_[i];
            b += static_cast<long double>(u_[i]) * u_[i];
            c += v_[i];
            d += static_cast<long double>(u_[i]) * v_[i];
            e += static_cast<long double>(v_[i]) * v_[i];
            su_[i] = static_cast<double>(a);
            suu_[i] = static_cast<double>(b);
            sv_[i] = static_cast<double>(c);
            suv_[i] = static_cast<double>(d);
        }
        vv_ = static_cast<double>(e);

        for (double value : u_)
            if (distinct_.empty() || value > distinct_.back())
                distinct_.push_back(value);
    }

    std::size_t size() const { return u_.size(); }
    const std::vector<double>& distinct() const { return distinct_; }
    double xmin() const { return xmin_; }
    double xmax() const { return xmax_; }
    double range() const { return range_; }
    double ymean() const { return ymean_; }
    double yscale() const { return yscale_; }

    /// SSR in normalized units for sorted interior positions in [0, 1].
    double score(std::span<const double> interior, detail::Solution* out = nullptr) const {
        const int k = static_cast<int>(interior.size()) + 2; // intercept + k+1 segments
        const int hinges = k - 1;
        double pos[detail::kMaxColumns];
        std::size_t idx[detail::kMaxColumns];
        pos[0] = 0.0;
        for (int j = 1; j < hinges; ++j)
            pos[j] = interior[static_cast<std::size_t>(j - 1)];
        for (int j = 0; j < hinges; ++j)
            idx[j] = static_cast<std::size_t>(
                std::upper_bound(u_.begin(), u_.end(), pos[j]) - u_.begin());

        const double n = static_cast<double>(u_.size());
        SmallMatrix gh(k, k);
        SmallVector hh(k);
        gh(0, 0) = n;
        hh(0) = sv_[0];
        for (int j = 0; j < hinges; ++j) {
            const std::size_t i = idx[j];
            const double cnt = static_cast<double>(u_.size() - i);
            const double p = pos[j];
            gh(0, j + 1) = gh(j + 1, 0) = su_[i] - p * cnt;
            hh(j + 1) = suv_[i] - p * sv_[i];
            for (int l = j; l < hinges; ++l) {
                const std::size_t il = idx[l];
                const double cl = static_cast<double>(u_.size() - il);
                const double q = pos[l];
                const double g = suu_[il] - (p + q) * su_[il] + p * q * cl;
                gh(j + 1, l + 1) = gh(l + 1, j + 1) = g;
            }
        }
        // segment basis: column l = hinge_l - hinge_{l+1}
        SmallMatrix d = SmallMatrix::Zero(k, k);
        d(0, 0) = 1.0;
        for (int l = 1; l < k; ++l) {
            d(l, l) = 1.0;
            if (l + 1 < k)
                d(l + 1, l) = -1.0;
        }
        SmallMatrix gs = d.transpose() * gh * d;
        SmallVector hs = d.transpose() * hh;
        detail::Solution sol = detail::solve_nonnegative(gs, hs, vv_);
        if (out)
            *out = sol;
        return sol.ssr;
    }

private:
    std::vector<double> u_, v_, distinct_;
    std::vector<double> su_, suu_, sv_, suv_;
    double vv_ = 0.0;
    double xmin_ = 0.0, xmax_ = 0.0, range_ = 1.0, ymean_ = 0.0, yscale_ = 1.0;
};

struct Candidate {
    std::vector<double> t; // interior positions, normalized and sorted
    double ssr = std::numeric_limits<double>::infinity();
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.ssr != b.ssr)
        return a.ssr < b.ssr;
    return a.t < b.t;
}

double radical_inverse(std::size_t index, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

/// Number of non-decreasing k-tuples over g symbols, saturating at limit + 1.
std::size_t multiset_count(std::size_t g, std::size_t k, std::size_t limit) {
    // C(g + k - 1, k)
    long double c = 1.0L;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * static_cast<long double>(g + k - i) / static_cast<long double>(i);
        if (c > static_cast<long double>(limit))
            return limit + 1;
    }
    return static_cast<std::size_t>(c + 0.5L);
}

class BreakpointSearch {
public:
    BreakpointSearch(const SsrModel& model, std::size_t k, const SearchConfig& cfg)
        : model_(model), k_(k), cfg_(cfg) {
        const auto& d = model_.distinct();
        for (std::size_t i = 0; i + 1 < d.size(); ++i)
            mids_.push_back(0.5 * (d[i] + d[i + 1]));
    }

    Candidate run() {
        const std::size_t p = mids_.size();
        const std::size_t budget = std::max<std::size_t>(cfg_.grid_budget, 1);
        std::size_t g = p;
        if (multiset_count(p, k_, budget) > budget) {
            g = 1;
            while (g < p && multiset_count(g + 1, k_, budget) <= budget)
                ++g;
        }
        std::vector<std::size_t> grid(g);
        for (std::size_t i = 0; i < g; ++i)
            grid[i] = g == p ? i : std::min(p - 1, static_cast<std::size_t>(
                                                       (static_cast<double>(i) + 0.5) *
                                                       static_cast<double>(p) / static_cast<double>(g)));

        // start stage: every non-decreasing tuple over the grid
        std::vector<std::vector<std::size_t>> starts;
        std::vector<Candidate> top;
        std::vector<std::size_t> slot(k_, 0);
        const std::size_t keep = std::max<std::size_t>(cfg_.refine_starts, 1);
        std::vector<std::vector<std::size_t>> top_idx;
        while (true) {
            std::vector<std::size_t> config(k_);
            for (std::size_t j = 0; j < k_; ++j)
                config[j] = grid[slot[j]];
            Candidate c = score(config);
            insert_top(top, top_idx, c, config, keep);
            // odometer over non-decreasing slots
            std::size_t j = k_;
            while (j > 0 && slot[j - 1] == g - 1)
                --j;
            if (j == 0)
                break;
            ++slot[j - 1];
            for (std::size_t l = j; l < k_; ++l)
                slot[l] = slot[j - 1];
        }
        starts = top_idx;

        std::mt19937_64 rng(cfg_.seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> rotation(k_);
        for (auto& r : rotation)
            r = unif(rng);
        for (std::size_t s = 0; s < cfg_.halton_starts; ++s) {
            std::vector<std::size_t> config(k_);
            for (std::size_t j = 0; j < k_; ++j) {
                double h = radical_inverse(s + 1, kPrimes[j % std::size(kPrimes)]) + rotation[j];
                h -= std::floor(h);
                config[j] = std::min(p - 1, static_cast<std::size_t>(h * static_cast<double>(p)));
            }
            std::sort(config.begin(), config.end());
            starts.push_back(std::move(config));
        }

        const std::size_t initial_step = std::max<std::size_t>(1, p / std::max<std::size_t>(g, 1));
        std::vector<Candidate> refined;
        std::vector<std::vector<std::size_t>> refined_idx;
        for (const auto& s : starts) {
            auto idx = s;
            Candidate c = descend(idx, initial_step);
            insert_top(refined, refined_idx, c, idx, 2);
        }

        Candidate best;
        for (std::size_t r = 0; r < refined.size(); ++r) {
            Candidate c = polish(refined[r], refined_idx[r]);
            if (better(c, best))
                best = std::move(c);
        }
        return best;
    }

private:
    Candidate score(const std::vector<std::size_t>& config) const {
        Candidate c;
        c.t.resize(config.size());
        for (std::size_t j = 0; j < config.size(); ++j)
            c.t[j] = mids_[config[j]];
        c.ssr = model_.score(c.t);
        return c;
    }

    static void insert_top(std::vector<Candidate>& top, std::vector<std::vector<std::size_t>>& idx,
                           const Candidate& c, const std::vector<std::size_t>& config,
                           std::size_t keep) {
        for (const auto& existing : top)
            if (existing.t == c.t)
                return;
        auto it = std::find_if(top.begin(), top.end(),
                               [&](const Candidate& e) { return better(c, e); });
        const auto pos = static_cast<std::size_t>(it - top.begin());
        if (pos >= keep)
            return;
        top.insert(it, c);
        idx.insert(idx.begin() + static_cast<std::ptrdiff_t>(pos), config);
        if (top.size() > keep) {
            top.pop_back();
            idx.pop_back();
        }
    }

    /// Coordinate descent over midpoint indices with a shrinking step.
    Candidate descend(std::vector<std::size_t>& idx, std::size_t step) const {
        const std::size_t p = mids_.size();
        Candidate current = score(idx);
        std::size_t sweeps = 0;
        while (step >= 1 && sweeps < cfg_.max_sweeps) {
            ++sweeps;
            bool improved = false;
            for (std::size_t j = 0; j < k_; ++j) {
                const std::size_t lo = j == 0 ? 0 : idx[j - 1];
                const std::size_t hi = j + 1 == k_ ? p - 1 : idx[j + 1];
                for (int dir : {-1, 1}) {
                    while (true) {
                        std::size_t next;
                        if (dir < 0) {
                            if (idx[j] <= lo)
                                break;
                            next = idx[j] >= lo + step ? idx[j] - step : lo;
                        } else {
                            if (idx[j] >= hi)
                                break;
                            next = std::min(hi, idx[j] + step);
                        }
                        auto trial = idx;
                        trial[j] = next;
                        Candidate c = score(trial);
                        if (!better(c, current))
                            break;
                        idx = std::move(trial);
                        current = std::move(c);
                        improved = true;
                    }
                }
            }
            if (!improved)
                step /= 2;
        }
        return current;
    }

    /// Continuous golden-section refinement of each breakpoint inside the gap
    /// between the data values that bracket it. Once no breakpoint moves, the
    /// gaps on either side are tried as well.
    Candidate polish(Candidate c, const std::vector<std::size_t>& idx) const {
        std::vector<std::size_t> cell = idx; // t_j lies in [d[cell], d[cell + 1]]
        for (int round = 0; round < 64; ++round) {
            c = polish_cells(std::move(c), cell);
            bool moved = false;
            for (std::size_t j = 0; j < k_; ++j) {
                const std::size_t here = cell[j];
                for (std::size_t g : {here - 1, here + 1}) {
                    if (here == 0 && g > here + 1)
                        continue;
                    if (g + 2 > model_.distinct().size())
                        continue;
                    if (auto trial = golden_in(c, j, g); trial && better(*trial, c)) {
                        c = std::move(*trial);
                        cell[j] = g;
                        moved = true;
                    }
                }
            }
            if (!moved)
                break;
        }
        return c;
    }

    Candidate polish_cells(Candidate c, std::vector<std::size_t>& cell) const {
        const auto& d = model_.distinct();
        for (int sweep = 0; sweep < 64; ++sweep) {
            const double before = c.ssr;
            for (std::size_t j = 0; j < k_; ++j) {
                for (int extend = 0; extend < 3; ++extend) {
                    const double lo = std::max(d[cell[j]], j == 0 ? 0.0 : c.t[j - 1]);
                    const double hi = std::min(d[cell[j] + 1], j + 1 == k_ ? 1.0 : c.t[j + 1]);
                    if (!(hi > lo))
                        break;
                    Candidate trial = golden(c, j, lo, hi);
                    if (!better(trial, c))
                        break;
                    c = std::move(trial);
                    // optimum on a cell edge: try the neighbouring cell too
                    if (c.t[j] <= lo + 1e-12 && cell[j] > 0 && lo == d[cell[j]])
                        --cell[j];
                    else if (c.t[j] >= hi - 1e-12 && cell[j] + 2 < d.size() && hi == d[cell[j] + 1])
                        ++cell[j];
                    else
                        break;
                }
            }
            if (!(c.ssr < before - 1e-15 * std::max(before, 1e-300)))
                break;
        }
        return c;
    }

    std::optional<Candidate> golden_in(const Candidate& c, std::size_t j, std::size_t g) const {
        const auto& d = model_.distinct();
        const double lo = std::max(d[g], j == 0 ? 0.0 : c.t[j - 1]);
        const double hi = std::min(d[g + 1], j + 1 == k_ ? 1.0 : c.t[j + 1]);
        if (!(hi > lo))
            return std::nullopt;
        return golden(c, j, lo, hi);
    }

    Candidate golden(const Candidate& base, std::size_t j, double lo, double hi) const {
        constexpr double inv_phi = 0.6180339887498949;
        std::vector<double> t = base.t;
        auto eval = [&](double v) {
            t[j] = v;
            return model_.score(t);
        };
        double a = lo, b = hi;
        double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
        double f1 = eval(x1), f2 = eval(x2);
        for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = eval(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = eval(x2);
            }
        }
        Candidate best = base;
        auto offer = [&](double v, double f) {
            Candidate c;
            c.t = base.t;
            c.t[j] = v;
            c.ssr = f;
            if (better(c, best))
                best = std::move(c);
        };
        offer(x1, f1);
        offer(x2, f2);
        offer(lo, eval(lo));
        offer(hi, eval(hi));
        return best;
    }

    const SsrModel& model_;
    std::size_t k_;
    const SearchConfig& cfg_;
    std::vector<double> mids_;
};

double explicit_ssr(const PiecewiseLinearCurve& curve, std::span<const double> x,
                    std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - evaluate(curve, x[i]);
        s += r * r;
    }
    return s;
}

FitReport make_report(PiecewiseLinearCurve curve, std::span<const double> x,
                      std::span<const double> y) {
    FitReport report;
    report.curve = std::move(curve);
    report.ssr = explicit_ssr(report.curve, x, y);
    report.n_points = x.size();
    report.k_interior = report.curve.interior_count();
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sst = 0.0;
    for (double v : y)
        sst += (v - mean) * (v - mean);
    report.r_squared = sst > 0.0 ? std::clamp(1.0 - report.ssr / sst, 0.0, 1.0) : 1.0;
    return report;
}

/// Curve in data units from a normalized-basis solution.
PiecewiseLinearCurve to_curve(double xmin, double xmax, double ymean, double yscale,
                              std::span<const double> interior, const SmallVector& coef) {
    const double range = xmax - xmin;
    std::vector<double> bps{xmin};
    for (double t : interior)
        bps.push_back(std::clamp(xmin + t * range, xmin, xmax));
    bps.push_back(xmax);
    std::vector<double> slopes(bps.size() - 1);
    for (std::size_t l = 0; l < slopes.size(); ++l)
        slopes[l] = coef(static_cast<int>(l) + 1) * yscale / range;
    return PiecewiseLinearCurve::from_slopes(std::move(bps), ymean + yscale * coef(0), slopes);
}

} // namespace

SearchConfig SearchConfig::fast() {
    SearchConfig c;
    c.grid_budget = 96;
    c.halton_starts = 2;
    c.refine_starts = 2;
    c.max_sweeps = 24;
    return c;
}

FitReport fit_fixed(std::span<const double> x, std::span<const double> y, std::size_t k_interior,
                    const SearchConfig& search) {
    validate(x, y, k_interior);
    SsrModel model(x, y);
    std::vector<double> interior;
    if (k_interior > 0)
        interior = BreakpointSearch(model, k_interior, search).run().t;
    detail::Solution sol;
    model.score(interior, &sol);
    auto curve = to_curve(model.xmin(), model.xmax(), model.ymean(), model.yscale(), interior, sol.coef);
    return make_report(collapse(curve), x, y);
}

FitReport fit_adaptive(std::span<const double> x, std::span<const double> y, std::size_t k_max,
                       double min_rel_improvement, const SearchConfig& search) {
    if (!(min_rel_improvement > 0.0 && min_rel_improvement < 1.0))
        throw Error(ErrorCode::InvalidArgument, "min_rel_improvement must lie in (0, 1)");
    FitReport current = fit_fixed(x, y, 0, search);
    for (std::size_t k = 1; k <= k_max; ++k) {
        if (current.ssr <= 0.0 || x.size() < 2 * (k + 2))
            break;
        FitReport richer = fit_fixed(x, y, k, search);
        if ((current.ssr - richer.ssr) / current.ssr < min_rel_improvement)
            break;
        current = std::move(richer);
    }
    return current;
}

FitReport solve_fixed_breakpoints(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> breakpoints) {
    validate(x, y, 0);
    if (breakpoints.size() < 2 || breakpoints.size() - 2 > kMaxInterior)
        throw Error(ErrorCode::InvalidArgument, "unsupported breakpoint count");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw Error(ErrorCode::InvalidArgument, "breakpoints must be sorted");
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double b0 = breakpoints.front(), b1 = breakpoints.back();
    if (b0 > *lo || b1 < *hi || !(b1 > b0))
        throw Error(ErrorCode::InvalidArgument, "breakpoints must span the data");

    const std::size_t n = x.size();
    const double range = b1 - b0;
    const double ymean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double dev = 0.0;
    for (double v : y)
        dev = std::max(dev, std::abs(v - ymean));
    const double yscale = dev > 0.0 ? dev : 1.0;

    std::vector<double> pos(breakpoints.size());
    for (std::size_t j = 0; j < pos.size(); ++j)
        pos[j] = (breakpoints[j] - b0) / range;
    pos.front() = 0.0;
    pos.back() = 1.0;

    const int k = static_cast<int>(breakpoints.size());
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), k);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double u = (x[i] - b0) / range;
        design(r, 0) = 1.0;
        for (int l = 1; l < k; ++l) {
            const double a = pos[static_cast<std::size_t>(l - 1)];
            const double b = pos[static_cast<std::size_t>(l)];
            design(r, l) = std::clamp(u - a, 0.0, b - a);
        }
        v(r) = (y[i] - ymean) / yscale;
    }
    SmallMatrix gram = design.transpose() * design;
    SmallVector rhs = design.transpose() * v;
    detail::Solution sol = detail::solve_nonnegative(gram, rhs, v.squaredNorm());

    std::vector<double> interior(pos.begin() + 1, pos.end() - 1);
    auto curve = to_curve(b0, b1, ymean, yscale, interior, sol.coef);
    curve.breakpoints = std::vector<double>(breakpoints.begin(), breakpoints.end());
    return make_report(std::move(curve), x, y);
}

} // namespace supreg::pwlf
