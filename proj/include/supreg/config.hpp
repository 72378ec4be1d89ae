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

// Key-value configuration files.
//
//   # comment
//   carbon.gas = 0.201
//   gap_policy = interpolate
//
// Every key can be overridden from the environment: `carbon.gas` is read
// from SUPREG_CARBON_GAS when that variable is set.

#include <supreg/market_data.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace supreg {

class Config {
public:
    static Config parse(std::istream& in);
    static Config load(const std::filesystem::path& path);

    /// SUPREG_ + key upper-cased with '.' and '-' mapped to '_'.
    static std::string env_name(std::string_view key);

    void set(std::string key, std::string value);
    void use_environment(bool enabled) { use_env_ = enabled; }

    std::optional<std::string> get(std::string_view key) const;
    std::string get_string(std::string_view key, std::string_view fallback) const;
    double get_double(std::string_view key, double fallback) const;
    long get_int(std::string_view key, long fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;
    std::optional<std::vector<double>> get_doubles(std::string_view key) const;

    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, std::string, std::less<>> entries_;
    bool use_env_ = true;
};

std::vector<double> parse_double_list(std::string_view text);

GapPolicy parse_gap_policy(std::string_view text);
FillPolicy parse_fill_policy(std::string_view text);
std::string_view to_string(GapPolicy policy) noexcept;
std::string_view to_string(FillPolicy policy) noexcept;

struct MarketDataSettings {
    ColumnMap columns;
    GapPolicy gap_policy = GapPolicy::Interpolate;
    int max_gap_hours = 2;
    FillPolicy fill_policy = FillPolicy::ForwardFill;
    CarbonIntensity gas{"gas", kDefaultGasIntensity};
    CarbonIntensity coal{"coal", kDefaultCoalIntensity};
};

/// Keys: column.<field>, gap_policy, max_gap_hours, fill_policy,
/// carbon.gas, carbon.coal.
MarketDataSettings market_settings(const Config& config);

} // namespace supreg
