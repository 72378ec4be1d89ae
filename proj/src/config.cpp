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
#include <supreg/config.hpp>

#include <supreg/error.hpp>

#include "csv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>

namespace supreg {

Config Config::parse(std::istream& in) {
    Config config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = detail::trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, "expected 'key = value'");
        auto key = detail::trim(s.substr(0, eq));
        auto value = detail::trim(s.substr(eq + 1));
        if (key.empty())
            throw ParseError(line_no, "empty key");
        config.set(std::string(key), std::string(value));
    }
    return config;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open config " + path.string());
    return parse(in);
}

std::string Config::env_name(std::string_view key) {
    std::string name = "SUPREG_";
    for (char c : key) {
        if (c == '.' || c == '-')
            name.push_back('_');
        else
            name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return name;
}

void Config::set(std::string key, std::string value) {
    entries_.insert_or_assign(std::move(key), std::move(value));
}

std::optional<std::string> Config::get(std::string_view key) const {
    if (use_env_) {
        if (const char* env = std::getenv(env_name(key).c_str()))
            return std::string(env);
    }
    auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

std::string Config::get_string(std::string_view key, std::string_view fallback) const {
    auto v = get(key);
    return v ? *v : std::string(fallback);
}

double Config::get_double(std::string_view key, double fallback) const {
    auto v = get(key);
    if (!v)
        return fallback;
    try {
        return parse_number(*v);
    } catch (const Error&) {
        throw Error(ErrorCode::InvalidArgument, "config key '" + std::string(key) + "' is not a number");
    }
}

long Config::get_int(std::string_view key, long fallback) const {
    auto v = get(key);
    if (!v)
        return fallback;
    char* end = nullptr;
    long out = std::strtol(v->c_str(), &end, 10);
    if (v->empty() || *end != '\0')
        throw Error(ErrorCode::InvalidArgument, "config key '" + std::string(key) + "' is not an integer");
    return out;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
    auto v = get(key);
    if (!v)
        return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on")
        return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off")
        return false;
    throw Error(ErrorCode::InvalidArgument, "config key '" + std::string(key) + "' is not a boolean");
}

std::optional<std::vector<double>> Config::get_doubles(std::string_view key) const {
    auto v = get(key);
    if (!v)
        return std::nullopt;
    return parse_double_list(*v);
}

std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> out;
    if (detail::trim(text).empty())
        return out;
    for (const auto& field : detail::split_csv(text))
        out.push_back(parse_number(field));
    return out;
}

GapPolicy parse_gap_policy(std::string_view text) {
    if (text == "fail")
        return GapPolicy::Fail;
    if (text == "interpolate")
        return GapPolicy::Interpolate;
    if (text == "drop_day")
        return GapPolicy::DropDay;
    throw Error(ErrorCode::InvalidArgument, "unknown gap policy '" + std::string(text) + "'");
}

FillPolicy parse_fill_policy(std::string_view text) {
    if (text == "forward_fill")
        return FillPolicy::ForwardFill;
    if (text == "fail")
        return FillPolicy::Fail;
    throw Error(ErrorCode::InvalidArgument, "unknown fill policy '" + std::string(text) + "'");
}

std::string_view to_string(GapPolicy policy) noexcept {
    switch (policy) {
    case GapPolicy::Fail: return "fail";
    case GapPolicy::Interpolate: return "interpolate";
    case GapPolicy::DropDay: return "drop_day";
    }
    return "fail";
}

std::string_view to_string(FillPolicy policy) noexcept {
    return policy == FillPolicy::ForwardFill ? "forward_fill" : "fail";
}

MarketDataSettings market_settings(const Config& config) {
    MarketDataSettings s;
    s.columns.timestamp = config.get_string("column.timestamp", s.columns.timestamp);
    s.columns.price = config.get_string("column.price", s.columns.price);
    s.columns.load = config.get_string("column.load", s.columns.load);
    s.columns.wind = config.get_string("column.wind", s.columns.wind);
    s.columns.solar = config.get_string("column.solar", s.columns.solar);
    s.columns.hydro_ror = config.get_string("column.hydro_ror", s.columns.hydro_ror);
    s.gap_policy = parse_gap_policy(config.get_string("gap_policy", "interpolate"));
    s.max_gap_hours = static_cast<int>(config.get_int("max_gap_hours", 2));
    if (s.max_gap_hours < 0)
        throw Error(ErrorCode::InvalidArgument, "max_gap_hours must be >= 0");
    s.fill_policy = parse_fill_policy(config.get_string("fill_policy", "forward_fill"));
    s.gas.factor = config.get_double("carbon.gas", kDefaultGasIntensity);
    s.coal.factor = config.get_double("carbon.coal", kDefaultCoalIntensity);
    if (s.gas.factor < 0.0 || s.coal.factor < 0.0)
        throw Error(ErrorCode::NegativeInput, "carbon intensity factors must be >= 0");
    return s;
}

} // namespace supreg
