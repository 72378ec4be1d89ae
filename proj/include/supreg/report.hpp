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

// JSON and CSV forms of results, and the on-disk dataset bundle.

#include <supreg/market_data.hpp>
#include <supreg/pelt.hpp>
#include <supreg/pwlf.hpp>
#include <supreg/regimes.hpp>
#include <supreg/synth.hpp>

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace supreg::report {

using Json = nlohmann::ordered_json;

Json to_json(const pwlf::PiecewiseLinearCurve& curve);
pwlf::PiecewiseLinearCurve curve_from_json(const Json& j);

/// Curve fields plus ssr, r_squared, n_points and k_interior in one object.
Json to_json(const pwlf::FitReport& fit);

/// changepoint_days holds the last day of each regime but the final one;
/// changepoint_dates (when `dates` covers the sample) the first date of each
/// new regime.
Json to_json(const pelt::Segmentation& seg, std::span<const Date> dates = {});
pelt::Segmentation segmentation_from_json(const Json& j);

Json to_json(const regimes::RegimeCurveSet& set);
/// Curves and supports of a regime report, enough for similarity.
struct CurveList {
    std::vector<pwlf::PiecewiseLinearCurve> curves;
    std::vector<regimes::Support> supports;
};
CurveList curves_from_json(const Json& j);

Json to_json(const regimes::SweepResult& sweep);
Json to_json(const regimes::SimilarityMatrix& m);
Json to_json(const synth::RecoveryScore& score);

void write_sweep_csv(std::ostream& out, const regimes::SweepResult& sweep);
/// spec,threshold,regime_count,interpolated,interpolated_count,nearest_observed
void write_threshold_csv(std::ostream& out, std::string_view spec,
                         const regimes::SweepResult& sweep);
void write_segmentation_csv(std::ostream& out, const pelt::Segmentation& seg,
                            std::span<const Date> dates);
/// Square matrix with 1-based regime ids as header row and column; absent
/// entries are empty.
void write_matrix_csv(std::ostream& out, std::size_t size,
                      const std::vector<std::optional<double>>& values);

/// Writes text files with '\n' line endings; creates parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Normalized dataset bundle:
///   equilibria.csv  date,hour,residual_load_mw,price_eur_mwh
///   drivers.csv     date,<driver>...
struct Bundle {
    EquilibriumSeries equilibria;
    std::map<std::string, DailyDriver> drivers;
};

inline constexpr const char* kEquilibriaFile = "equilibria.csv";
inline constexpr const char* kDriversFile = "drivers.csv";

void write_equilibria_csv(std::ostream& out, const EquilibriumSeries& series);
EquilibriumSeries parse_equilibria_csv(std::istream& in);
void write_drivers_csv(std::ostream& out, std::span<const Date> dates,
                       const std::map<std::string, DailyDriver>& drivers);
/// Drivers must list exactly the given dates, in order.
std::map<std::string, DailyDriver> parse_drivers_csv(std::istream& in, std::span<const Date> dates);

void write_bundle(const std::filesystem::path& dir, const Bundle& bundle);
Bundle load_bundle(const std::filesystem::path& dir);

} // namespace supreg::report
