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
#include <supreg/cli.hpp>

#include <supreg/config.hpp>
#include <supreg/cost.hpp>
#include <supreg/error.hpp>
#include <supreg/market_data.hpp>
#include <supreg/pelt.hpp>
#include <supreg/regimes.hpp>
#include <supreg/report.hpp>
#include <supreg/svg.hpp>
#include <supreg/synth.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef SUPREG_VERSION
#define SUPREG_VERSION "0.0.0"
#endif

namespace supreg::cli {

namespace fs = std::filesystem;
using report::Json;

int exit_code(const std::exception& e) noexcept {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (classify(err->code())) {
        case ErrorClass::Input: return kExitInput;
        case ErrorClass::Infeasible: return kExitInfeasible;
        case ErrorClass::Numerical: return kExitNumerical;
        }
    }
    if (dynamic_cast<const fs::filesystem_error*>(&e))
        return kExitInput;
    return kExitNumerical;
}

namespace {

struct Common {
    std::string config_path;
    std::string format = "json";
    std::string out_dir;
    bool fast = false;
    std::size_t jobs = 1;
};

/// Run record written next to every set of outputs.
class Manifest {
public:
    explicit Manifest(std::string command) : command_(std::move(command)) {}

    void input(const fs::path& path) {
        inputs_.push_back({{"path", path.generic_string()}, {"sha256", report::sha256_file(path)}});
    }
    void set(const std::string& key, Json value) { config_[key] = std::move(value); }
    void spec(std::string id) { spec_ = std::move(id); }

    /// Writes the manifest listing the digest of every other file in `dir`.
    void write(const fs::path& dir) const {
        Json j;
        j["tool"] = "supreg";
        j["version"] = SUPREG_VERSION;
        j["command"] = command_;
        j["spec"] = spec_.empty() ? Json(nullptr) : Json(spec_);
        j["inputs"] = inputs_;
        j["config"] = config_;
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
                files.push_back(fs::relative(entry.path(), dir));
        std::sort(files.begin(), files.end());
        Json outputs = Json::array();
        for (const auto& f : files)
            outputs.push_back({{"file", f.generic_string()}, {"sha256", report::sha256_file(dir / f)}});
        j["outputs"] = outputs;
        report::write_json(dir / "manifest.json", j);
    }

private:
    std::string command_;
    std::string spec_;
    Json inputs_ = Json::array();
    Json config_ = Json::object();
};

Config load_config(const Common& c, Manifest* manifest) {
    if (c.config_path.empty())
        return Config{};
    if (manifest)
        manifest->input(c.config_path);
    return Config::load(c.config_path);
}

pwlf::SearchConfig search_config(const Config& cfg, bool fast, Manifest& m) {
    pwlf::SearchConfig s = fast ? pwlf::SearchConfig::fast() : pwlf::SearchConfig{};
    auto count = [&](const char* key, std::size_t fallback) {
        const long v = cfg.get_int(key, static_cast<long>(fallback));
        if (v < 0)
            throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be >= 0");
        return static_cast<std::size_t>(v);
    };
    s.grid_budget = count("search.grid_budget", s.grid_budget);
    s.halton_starts = count("search.halton_starts", s.halton_starts);
    s.refine_starts = count("search.refine_starts", s.refine_starts);
    s.max_sweeps = count("search.max_sweeps", s.max_sweeps);
    s.seed = static_cast<std::uint64_t>(cfg.get_int("search.seed", static_cast<long>(s.seed)));
    m.set("search.profile", fast ? "fast" : "default");
    m.set("search.grid_budget", s.grid_budget);
    m.set("search.halton_starts", s.halton_starts);
    m.set("search.refine_starts", s.refine_starts);
    m.set("search.max_sweeps", s.max_sweeps);
    m.set("search.seed", s.seed);
    return s;
}

CurveSpec curve_spec(SpecId id, const Config& cfg, Manifest& m) {
    CurveSpec spec = curve_spec_for(id);
    if (id == SpecId::E3) {
        spec = CurveSpec::e3(cfg.get_double("e3.threshold", spec.min_rel_improvement));
        m.set("e3.threshold", spec.min_rel_improvement);
    }
    return spec;
}

report::Bundle read_bundle(const fs::path& dir, Manifest& m) {
    m.input(dir / report::kEquilibriaFile);
    if (fs::exists(dir / report::kDriversFile))
        m.input(dir / report::kDriversFile);
    return report::load_bundle(dir);
}

std::unique_ptr<SegmentCost> make_cost(const report::Bundle& bundle, SpecId id, const Config& cfg,
                                       bool fast, Manifest& m) {
    m.spec(std::string(to_string(id)));
    if (is_cause_driven(id))
        return std::make_unique<CauseCost>(build_panel(panel_spec(id), bundle.drivers));
    return std::make_unique<EffectCost>(bundle.equilibria, curve_spec(id, cfg, m),
                                        search_config(cfg, fast, m));
}

double resolve_penalty(const std::string& text, const SegmentCost& cost, std::size_t n_days,
                       const Config& cfg, Manifest& m) {
    if (text != "auto") {
        const double beta = parse_number(text);
        m.set("penalty", beta);
        return beta;
    }
    const auto window = static_cast<std::size_t>(cfg.get_int("penalty.window_days", 5));
    const double factor = cfg.get_double("penalty.factor", 2.0);
    m.set("penalty.window_days", window);
    m.set("penalty.factor", factor);
    double beta;
    if (const auto* c = dynamic_cast<const CauseCost*>(&cost))
        beta = regimes::noise_penalty(*c, n_days, window, factor);
    else
        beta = regimes::noise_penalty(dynamic_cast<const EffectCost&>(cost), n_days, window, factor);
    m.set("penalty", beta);
    return beta;
}

std::string to_text(const Json& j) { return j.dump(2) + "\n"; }

template <class Fn>
std::string csv_text(Fn&& fn) {
    std::ostringstream s;
    fn(s);
    return s.str();
}

fs::path prepare_out(const std::string& dir) {
    if (dir.empty())
        return {};
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

void emit(std::ostream& out, const std::string& format, const std::string& json_text,
          const std::string& csv) {
    out << (format == "csv" ? csv : json_text);
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    Common common;
    std::string hourly;
    std::vector<std::string> daily;
    bool carbon_adjust = false;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
    Manifest m("ingest");
    const Config cfg = load_config(a.common, &m);
    const MarketDataSettings s = market_settings(cfg);
    m.input(a.hourly);
    m.set("gap_policy", std::string(to_string(s.gap_policy)));
    m.set("max_gap_hours", s.max_gap_hours);
    m.set("fill_policy", std::string(to_string(s.fill_policy)));

    const auto obs = load_hourly_csv(a.hourly, s.columns);
    auto build = to_equilibrium_series(obs, s.gap_policy, s.max_gap_hours);
    const auto& dates = build.series.dates();

    std::map<std::string, DailyDriver> drivers;
    Json driver_report = Json::object();
    for (const auto& spec : a.daily) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
            throw Error(ErrorCode::InvalidArgument, "--daily expects NAME=PATH, got '" + spec + "'");
        const std::string name = spec.substr(0, eq);
        const fs::path path = spec.substr(eq + 1);
        m.input(path);
        const auto series = load_daily_csv(path);
        auto aligned = align_daily(name, series, dates, s.fill_policy,
                                   cfg.get_string("units." + name, ""));
        driver_report[name] = {{"filled_days", aligned.filled}, {"units", aligned.driver.units}};
        drivers[name] = std::move(aligned.driver);
    }

    const bool adjust = a.carbon_adjust || cfg.get_bool("carbon_adjust", false);
    m.set("carbon_adjust", adjust);
    if (adjust) {
        m.set("carbon.gas", s.gas.factor);
        m.set("carbon.coal", s.coal.factor);
        auto eua = drivers.find(std::string(driver_names::eua));
        if (eua == drivers.end())
            throw Error(ErrorCode::MissingDriver, "carbon adjustment needs an 'eua' series");
        for (const auto* intensity : {&s.coal, &s.gas}) {
            auto it = drivers.find(intensity->fuel);
            if (it == drivers.end())
                continue;
            for (std::size_t t = 0; t < dates.size(); ++t)
                it->second.values[t] = carbon_adjust(it->second.values[t], eua->second.values[t], *intensity);
        }
    }

    Json validation;
    validation["hourly_rows"] = obs.size();
    validation["hours"] = build.series.hours();
    validation["days"] = build.series.days();
    validation["first_date"] = format_date(dates.front());
    validation["last_date"] = format_date(dates.back());
    validation["interpolated_hours"] = build.report.interpolated_hours;
    Json dropped = Json::array();
    for (Date d : build.report.dropped_days)
        dropped.push_back(format_date(d));
    validation["dropped_days"] = dropped;
    validation["drivers"] = driver_report;

    const fs::path dir = prepare_out(a.common.out_dir);
    report::write_bundle(dir, {build.series, drivers});
    report::write_json(dir / "validation.json", validation);
    m.write(dir);

    emit(out, a.common.format, to_text(validation), csv_text([&](std::ostream& o) {
             o << "key,value\n"
               << "days," << build.series.days() << '\n'
               << "hours," << build.series.hours() << '\n'
               << "interpolated_hours," << build.report.interpolated_hours << '\n'
               << "dropped_days," << build.report.dropped_days.size() << '\n';
         }));
    return kExitOk;
}

// ---------------------------------------------------------------- segment

struct SegmentArgs {
    Common common;
    std::string bundle;
    std::string spec;
    std::string penalty;
    std::size_t target = 0;
    bool nearest = false;
};

int cmd_segment(const SegmentArgs& a, std::ostream& out, std::ostream& err) {
    Manifest m("segment");
    const Config cfg = load_config(a.common, &m);
    const auto bundle = read_bundle(a.bundle, m);
    const SpecId id = parse_spec_id(a.spec);
    const auto cost = make_cost(bundle, id, cfg, a.common.fast, m);
    const std::size_t n = bundle.equilibria.days();
    pelt::Options opt;
    opt.jobs = a.common.jobs;

    if (a.penalty.empty() == (a.target == 0))
        throw Error(ErrorCode::InvalidArgument, "give exactly one of --penalty and --target-regimes");

    pelt::CostCache cache;
    pelt::Segmentation seg;
    Json extra = Json::object();
    if (a.target > 0) {
        m.set("target_regimes", a.target);
        m.set("nearest", a.nearest);
        auto res = regimes::segment_to_count(*cost, n, a.target, cache, opt);
        seg = res.segmentation;
        extra["exact"] = res.exact;
        if (!res.exact) {
            const auto below = res.below ? Json(res.below->regime_count()) : Json(nullptr);
            const auto above = res.above ? Json(res.above->regime_count()) : Json(nullptr);
            extra["bracket_below"] = below;
            extra["bracket_above"] = above;
            if (!a.nearest) {
                err << "target of " << a.target << " regimes is unattainable; bracketing counts "
                    << below.dump() << " and " << above.dump() << " (use --nearest to accept)\n";
                throw Error(ErrorCode::Unattainable, "no penalty yields " + std::to_string(a.target) + " regimes");
            }
        }
    } else {
        seg = pelt::segment_with_cache(*cost, n, resolve_penalty(a.penalty, *cost, n, cfg, m), cache, opt);
    }

    Json j = report::to_json(seg, bundle.equilibria.dates());
    j["spec"] = a.spec;
    for (auto& [k, v] : extra.items())
        j[k] = v;
    const std::string csv = csv_text([&](std::ostream& o) {
        report::write_segmentation_csv(o, seg, bundle.equilibria.dates());
    });
    if (const fs::path dir = prepare_out(a.common.out_dir); !dir.empty()) {
        report::write_json(dir / "segmentation.json", j);
        report::write_text(dir / "segmentation.csv", csv);
        m.write(dir);
    }
    emit(out, a.common.format, to_text(j), csv);
    return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    Common common;
    std::string bundle;
    std::string spec;
    std::size_t grid_points = 60;
    double grid_low = 1e-6;
    std::string penalties;
    std::string thresholds = "0.7,0.8,0.9,0.95";
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    Manifest m("sweep");
    const Config cfg = load_config(a.common, &m);
    const auto bundle = read_bundle(a.bundle, m);
    const SpecId id = parse_spec_id(a.spec);
    const auto cost = make_cost(bundle, id, cfg, a.common.fast, m);
    const std::size_t n = bundle.equilibria.days();
    pelt::Options opt;
    opt.jobs = a.common.jobs;
    pelt::CostCache cache;

    std::vector<double> grid;
    if (!a.penalties.empty()) {
        grid = parse_double_list(a.penalties);
        m.set("penalties", grid);
    } else {
        grid = regimes::default_beta_grid(baseline_cost(*cost, n), a.grid_points, a.grid_low);
        m.set("grid_points", a.grid_points);
        m.set("grid_low_fraction", a.grid_low);
    }
    const auto thresholds = parse_double_list(a.thresholds);
    m.set("thresholds", thresholds);

    auto sweep = regimes::sweep_penalty(*cost, n, grid, cache, opt);
    std::vector<std::string> unreachable;
    for (double t : thresholds) {
        try {
            sweep.thresholds_resolved[t] = regimes::resolve_threshold(sweep, t);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Unreachable)
                throw;
            unreachable.push_back(format_number(t));
        }
    }

    Json j = report::to_json(sweep);
    j["spec"] = a.spec;
    const std::string table = csv_text([&](std::ostream& o) { report::write_threshold_csv(o, a.spec, sweep); });
    if (const fs::path dir = prepare_out(a.common.out_dir); !dir.empty()) {
        report::write_text(dir / "sweep.csv", csv_text([&](std::ostream& o) { report::write_sweep_csv(o, sweep); }));
        report::write_text(dir / "thresholds.csv", table);
        report::write_json(dir / "sweep.json", j);
        report::write_text(dir / "sweep.svg", svg::sweep_plot(sweep, thresholds, "specification " + a.spec));
        m.write(dir);
    }
    emit(out, a.common.format, to_text(j), table);
    if (!unreachable.empty()) {
        std::string list;
        for (const auto& t : unreachable)
            list += (list.empty() ? "" : ", ") + t;
        throw Error(ErrorCode::Unreachable, "thresholds not reached on the grid: " + list);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- curves

struct CurvesArgs {
    Common common;
    std::string bundle;
    std::string segmentation;
    std::string curve = "E3";
};

int cmd_curves(const CurvesArgs& a, std::ostream& out) {
    Manifest m("curves");
    const Config cfg = load_config(a.common, &m);
    const auto bundle = read_bundle(a.bundle, m);
    m.input(a.segmentation);
    const auto seg = report::segmentation_from_json(report::read_json(a.segmentation));
    const SpecId id = parse_spec_id(a.curve);
    if (is_cause_driven(id))
        throw Error(ErrorCode::InvalidArgument, "--curve must be one of E1, E2, E3");
    m.spec(a.curve);
    const CurveSpec spec = curve_spec(id, cfg, m);
    const auto search = search_config(cfg, a.common.fast, m);
    const auto set = regimes::fit_regime_curves(bundle.equilibria, seg, spec, search);

    const Json j = report::to_json(set);
    const std::string csv = csv_text([&](std::ostream& o) {
        o << "regime,first_date,last_date,hours,coverage,r_squared,k_interior,load_min_mw,load_max_mw\n";
        std::size_t k = 0;
        for (const auto& r : set.regimes)
            o << ++k << ',' << format_date(set.dates[r.first_day]) << ','
              << format_date(set.dates[r.last_day]) << ',' << r.hours << ','
              << format_number(r.coverage) << ',' << format_number(r.fit.r_squared) << ','
              << r.fit.k_interior << ',' << format_number(r.support.lower) << ','
              << format_number(r.support.upper) << '\n';
    });
    if (const fs::path dir = prepare_out(a.common.out_dir); !dir.empty()) {
        report::write_json(dir / "regimes.json", j);
        report::write_text(dir / "regimes.csv", csv);
        report::write_text(dir / "curves.svg", svg::curves_plot(set, bundle.equilibria));
        m.write(dir);
    }
    emit(out, a.common.format, to_text(j), csv);
    return kExitOk;
}

// ---------------------------------------------------------------- similarity

struct SimilarityArgs {
    Common common;
    std::string curves;
    std::string policy = "intersection";
};

int cmd_similarity(const SimilarityArgs& a, std::ostream& out) {
    Manifest m("similarity");
    m.input(a.curves);
    const auto policy = regimes::parse_support_policy(a.policy);
    m.set("support_policy", a.policy);
    const auto list = report::curves_from_json(report::read_json(a.curves));
    const auto matrix = regimes::similarity_matrix(list.curves, list.supports, policy);

    const Json j = report::to_json(matrix);
    const std::string csv = csv_text([&](std::ostream& o) { report::write_matrix_csv(o, matrix.size, matrix.mean_abs); });
    if (const fs::path dir = prepare_out(a.common.out_dir); !dir.empty()) {
        report::write_json(dir / "similarity.json", j);
        report::write_text(dir / "similarity.csv", csv);
        report::write_text(dir / "similarity_area.csv",
                           csv_text([&](std::ostream& o) { report::write_matrix_csv(o, matrix.size, matrix.area); }));
        report::write_text(dir / "similarity.svg", svg::similarity_heatmap(matrix));
        m.write(dir);
    }
    emit(out, a.common.format, to_text(j), csv);
    return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    Common common;
    std::string scenario;
    bool score = false;
    std::string spec = "E1";
    std::string penalty = "auto";
    std::size_t tolerance = 2;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    Manifest m("synth");
    const Config cfg = load_config(a.common, &m);
    m.input(a.scenario);
    Config scenario_cfg = Config::load(a.scenario);
    const auto scenario = synth::scenario_from_config(scenario_cfg);
    m.set("seed", scenario.seed);
    const auto market = synth::generate(scenario);
    const fs::path dir = prepare_out(a.common.out_dir);
    if (dir.empty())
        throw Error(ErrorCode::InvalidArgument, "synth needs --out");

    {
        std::ostringstream h;
        write_hourly_csv(h, market.hourly);
        report::write_text(dir / "raw" / "hourly.csv", h.str());
        for (const auto& [name, series] : market.dated_drivers) {
            std::ostringstream d;
            write_daily_csv(d, series);
            report::write_text(dir / "raw" / (name + ".csv"), d.str());
        }
    }
    const report::Bundle bundle{market.equilibria, market.drivers};
    report::write_bundle(dir, bundle);

    Json truth;
    truth["days"] = market.equilibria.days();
    truth["changepoint_days"] = market.changepoints;
    Json shift_dates = Json::array();
    for (std::size_t cp : market.changepoints)
        shift_dates.push_back(format_date(market.equilibria.dates()[cp + 1]));
    truth["changepoint_dates"] = shift_dates;
    Json curves = Json::array();
    for (const auto& r : scenario.regimes)
        curves.push_back({{"days", r.days}, {"curve", report::to_json(r.curve)}});
    truth["regimes"] = curves;
    report::write_json(dir / "truth.json", truth);

    Json result = truth;
    if (a.score) {
        const SpecId id = parse_spec_id(a.spec);
        const auto cost = make_cost(bundle, id, cfg, a.common.fast, m);
        const std::size_t n = market.equilibria.days();
        pelt::Options opt;
        opt.jobs = a.common.jobs;
        const double beta = resolve_penalty(a.penalty, *cost, n, cfg, m);
        const auto seg = pelt::segment(*cost, n, beta, opt);
        auto score = synth::score_recovery(seg, market.changepoints, a.tolerance);
        m.set("tolerance_days", a.tolerance);
        const auto& spec_tag = a.spec;
        std::optional<regimes::RegimeCurveSet> set;
        try {
            CurveSpec cs = is_cause_driven(id) ? CurveSpec::e3() : curve_spec(id, cfg, m);
            set = regimes::fit_regime_curves(market.equilibria, seg, cs, search_config(cfg, a.common.fast, m));
            score.curve_errors = synth::curve_errors(*set, scenario, market);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TooFewPoints)
                throw;
        }
        Json s = report::to_json(score);
        s["spec"] = spec_tag;
        s["segmentation"] = report::to_json(seg, market.equilibria.dates());
        report::write_json(dir / "score.json", s);
        result["score"] = s;
    }
    m.write(dir);
    emit(out, a.common.format, to_text(result), csv_text([&](std::ostream& o) {
             o << "changepoint,shift_date\n";
             for (std::size_t i = 0; i < market.changepoints.size(); ++i)
                 o << market.changepoints[i] << ',' << shift_dates[i].get<std::string>() << '\n';
         }));
    return kExitOk;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::string& dir_text, const std::string& format, std::ostream& out) {
    const fs::path dir(dir_text);
    if (!fs::exists(dir / "manifest.json"))
        throw Error(ErrorCode::Io, "no manifest.json in " + dir.string());
    Json j;
    j["manifest"] = report::read_json(dir / "manifest.json");
    for (const char* name : {"validation", "segmentation", "sweep", "regimes", "similarity", "truth", "score"}) {
        const fs::path p = dir / (std::string(name) + ".json");
        if (fs::exists(p))
            j[name] = report::read_json(p);
    }
    std::ostringstream csv;
    csv << "key,value\n";
    const auto& man = j["manifest"];
    csv << "command," << man.value("command", "") << '\n';
    if (man.contains("spec") && man["spec"].is_string())
        csv << "spec," << man["spec"].get<std::string>() << '\n';
    if (j.contains("validation"))
        csv << "days," << j["validation"]["days"].dump() << '\n';
    if (j.contains("segmentation"))
        csv << "regime_count," << j["segmentation"]["regime_count"].dump() << '\n';
    if (j.contains("regimes"))
        csv << "curve_regimes," << j["regimes"]["regimes"].size() << '\n';
    if (j.contains("sweep"))
        for (const auto& t : j["sweep"]["thresholds"])
            csv << "threshold_" << format_number(t["threshold"].get<double>()) << ','
                << t["regime_count"].dump() << '\n';
    if (j.contains("similarity"))
        csv << "similarity_size," << j["similarity"]["size"].dump() << '\n';
    if (j.contains("score"))
        csv << "missed," << j["score"]["missed"].dump() << "\nspurious," << j["score"]["spurious"].dump() << '\n';
    emit(out, format, to_text(j), csv.str());
    return kExitOk;
}

void add_common(CLI::App* sub, Common& c, bool with_out_required, bool with_search) {
    sub->add_option("--config", c.config_path, "Key-value config file (SUPREG_* variables override keys)")
        ->check(CLI::ExistingFile);
    sub->add_option("--format", c.format, "Stdout format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    auto* o = sub->add_option("--out", c.out_dir, "Output directory");
    if (with_out_required)
        o->required();
    if (with_search) {
        sub->add_flag("--fast", c.fast, "Cheaper curve-fitting search profile");
        sub->add_option("--jobs", c.jobs, "Worker threads for segmentation")
            ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
            ->capture_default_str();
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Supply-regime detection for electricity markets", "supreg"};
    app.set_version_flag("--version", SUPREG_VERSION);
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* s_ingest = app.add_subcommand("ingest", "Validate raw hourly and daily inputs into a dataset bundle");
    add_common(s_ingest, ingest.common, true, false);
    s_ingest->add_option("--hourly", ingest.hourly, "Hourly market CSV")->required()->check(CLI::ExistingFile);
    s_ingest->add_option("--daily", ingest.daily, "Daily driver series as NAME=PATH (repeatable)");
    s_ingest->add_flag("--carbon-adjust", ingest.carbon_adjust, "Add EUA cost to coal and gas prices");

    SegmentArgs segment;
    auto* s_segment = app.add_subcommand("segment", "Segment a bundle into supply regimes");
    add_common(s_segment, segment.common, false, true);
    s_segment->add_option("--bundle", segment.bundle, "Dataset bundle directory")->required()->check(CLI::ExistingDirectory);
    s_segment->add_option("--spec", segment.spec, "C1, C2, C3, E1, E2 or E3")->required();
    s_segment->add_option("--penalty", segment.penalty, "Penalty per regime, or 'auto'");
    s_segment->add_option("--target-regimes", segment.target, "Search the penalty for this regime count");
    s_segment->add_flag("--nearest", segment.nearest, "Accept the closest count when the target is unattainable");

    SweepArgs sweep;
    auto* s_sweep = app.add_subcommand("sweep", "Penalty sweep and explained-variance thresholds");
    add_common(s_sweep, sweep.common, false, true);
    s_sweep->add_option("--bundle", sweep.bundle, "Dataset bundle directory")->required()->check(CLI::ExistingDirectory);
    s_sweep->add_option("--spec", sweep.spec, "C1, C2, C3, E1, E2 or E3")->required();
    s_sweep->add_option("--grid-points", sweep.grid_points, "Log-spaced penalties")->capture_default_str();
    s_sweep->add_option("--grid-low", sweep.grid_low, "Smallest penalty as a fraction of the baseline cost")
        ->capture_default_str();
    s_sweep->add_option("--penalties", sweep.penalties, "Explicit ascending comma list of penalties");
    s_sweep->add_option("--thresholds", sweep.thresholds, "Explained-variance fractions")->capture_default_str();

    CurvesArgs curves;
    auto* s_curves = app.add_subcommand("curves", "Fit one supply curve per regime");
    add_common(s_curves, curves.common, false, true);
    s_curves->add_option("--bundle", curves.bundle, "Dataset bundle directory")->required()->check(CLI::ExistingDirectory);
    s_curves->add_option("--segmentation", curves.segmentation, "segmentation.json from 'segment'")
        ->required()
        ->check(CLI::ExistingFile);
    s_curves->add_option("--curve", curves.curve, "E1, E2 or E3")->capture_default_str();

    SimilarityArgs sim;
    auto* s_sim = app.add_subcommand("similarity", "Pairwise distance between regime curves");
    add_common(s_sim, sim.common, false, false);
    s_sim->add_option("--curves", sim.curves, "regimes.json from 'curves'")->required()->check(CLI::ExistingFile);
    s_sim->add_option("--policy", sim.policy, "Support: intersection or union")
        ->check(CLI::IsMember({"intersection", "union"}))
        ->capture_default_str();

    SynthArgs syn;
    auto* s_synth = app.add_subcommand("synth", "Generate a synthetic market with known regimes");
    add_common(s_synth, syn.common, true, true);
    s_synth->add_option("--scenario", syn.scenario, "Scenario config file")->required()->check(CLI::ExistingFile);
    s_synth->add_flag("--score", syn.score, "Segment the generated data and score recovery");
    s_synth->add_option("--spec", syn.spec, "Specification used with --score")->capture_default_str();
    s_synth->add_option("--penalty", syn.penalty, "Penalty used with --score, or 'auto'")->capture_default_str();
    s_synth->add_option("--tolerance", syn.tolerance, "Shift matching tolerance in days")->capture_default_str();

    std::string report_dir;
    std::string report_format = "json";
    auto* s_report = app.add_subcommand("report", "Summarize an output directory");
    s_report->add_option("--dir", report_dir, "Directory holding a manifest.json")->required()->check(CLI::ExistingDirectory);
    s_report->add_option("--format", report_format, "Stdout format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (s_ingest->parsed())
            return cmd_ingest(ingest, out);
        if (s_segment->parsed())
            return cmd_segment(segment, out, err);
        if (s_sweep->parsed())
            return cmd_sweep(sweep, out);
        if (s_curves->parsed())
            return cmd_curves(curves, out);
        if (s_sim->parsed())
            return cmd_similarity(sim, out);
        if (s_synth->parsed())
            return cmd_synth(syn, out);
        if (s_report->parsed())
            return cmd_report(report_dir, report_format, out);
    } catch (const std::exception& e) {
        err << "supreg: " << e.what() << '\n';
        return exit_code(e);
    }
    return kExitInput;
}

} // namespace supreg::cli
