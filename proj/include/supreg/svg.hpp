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

// Static SVG figures. Output depends only on the inputs (no clocks, no
// randomness), so equal results give byte-identical files.

#include <supreg/market_data.hpp>
#include <supreg/regimes.hpp>

#include <span>
#include <string>
#include <string_view>

namespace supreg::svg {

/// Unexplained ratio against regime count, with one guide line per
/// threshold at 1 - threshold.
std::string sweep_plot(const regimes::SweepResult& sweep, std::span<const double> thresholds,
                       std::string_view title);

/// One panel per regime: hourly equilibria (thinned to at most
/// `max_points` per panel by even stride) and the fitted curve.
std::string curves_plot(const regimes::RegimeCurveSet& set, const EquilibriumSeries& equilibria,
                        std::size_t max_points = 1500);

/// Mean absolute curve distance per regime pair; absent entries grey.
std::string similarity_heatmap(const regimes::SimilarityMatrix& matrix);

} // namespace supreg::svg
