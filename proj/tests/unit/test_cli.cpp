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

#include <supreg/cli.hpp>
#include <supreg/report.hpp>

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace supreg;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("supreg_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string kScenario = std::string(SUPREG_TEST_DATA) + "/three_regimes.cfg";

/// Synthetic run followed by ingest of its raw files.
fs::path synth_and_ingest(const std::string& name) {
    const auto dir = scratch(name);
    REQUIRE(run({"synth", "--scenario", kScenario, "--out", (dir / "synth").string()}).code == 0);
    const auto raw = dir / "synth" / "raw";
    const auto r = run({"ingest", "--hourly", (raw / "hourly.csv").string(), "--daily",
                        "gas=" + (raw / "gas.csv").string(), "--daily",
                        "coal=" + (raw / "coal.csv").string(), "--out", (dir / "bundle").string()});
    REQUIRE(r.code == 0);
    return dir;
}

/// Bundle whose C1 panel is 0000 1111 0000: two regimes cannot be reached.
fs::path plateau_bundle() {
    const auto dir = scratch("plateau");
    report::Bundle b;
    b.equilibria = testing::make_series(12, 24, [](std::size_t d, int h) {
        return std::pair{30000.0 + 500.0 * h, 40.0 + static_cast<double>(d)};
    });
    for (const char* name : {"coal", "gas"}) {
        DailyDriver d;
        d.name = name;
        for (std::size_t t = 0; t < 12; ++t)
            d.values.push_back(t >= 4 && t < 8 ? 1.0 : 0.0);
        b.drivers[name] = d;
    }
    report::write_bundle(dir, b);
    return dir;
}

} // namespace

TEST_CASE("usage errors exit with the input code") {
    CHECK(run({}).code == cli::kExitInput);
    CHECK(run({"bogus"}).code == cli::kExitInput);
    CHECK(run({"segment", "--spec", "C1"}).code == cli::kExitInput);
    CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("synthetic pipeline end to end") {
    const auto dir = synth_and_ingest("pipeline");
    const auto bundle = (dir / "bundle").string();
    const auto truth = report::read_json(dir / "synth" / "truth.json");
    CHECK(truth.at("changepoint_days") == report::Json::array({19, 39}));
    CHECK(truth.at("changepoint_dates")[0] == "2021-03-21");

    const auto validation = report::read_json(dir / "bundle" / "validation.json");
    CHECK(validation.at("days") == 60);

    auto seg = run({"segment", "--bundle", bundle, "--spec", "C1", "--penalty", "auto", "--out",
                    (dir / "seg").string()});
    REQUIRE(seg.code == 0);
    const auto sj = report::Json::parse(seg.out);
    CHECK(sj.at("changepoint_days") == truth.at("changepoint_days"));
    CHECK(sj.at("changepoint_dates") == truth.at("changepoint_dates"));
    CHECK(fs::exists(dir / "seg" / "manifest.json"));

    const auto one = run({"segment", "--bundle", bundle, "--spec", "C1", "--penalty", "1e12"});
    REQUIRE(one.code == 0);
    CHECK(report::Json::parse(one.out).at("regime_count") == 1);

    const auto target = run({"segment", "--bundle", bundle, "--spec", "C1", "--target-regimes", "3"});
    REQUIRE(target.code == 0);
    CHECK(report::Json::parse(target.out).at("changepoint_days") == truth.at("changepoint_days"));

    const auto curves = run({"curves", "--bundle", bundle, "--segmentation",
                             (dir / "seg" / "segmentation.json").string(), "--curve", "E2", "--fast",
                             "--out", (dir / "curves").string()});
    REQUIRE(curves.code == 0);
    CHECK(report::read_json(dir / "curves" / "regimes.json").at("regimes").size() == 3);

    const auto sim = run({"similarity", "--curves", (dir / "curves" / "regimes.json").string(),
                          "--out", (dir / "sim").string()});
    REQUIRE(sim.code == 0);
    const auto mj = report::Json::parse(sim.out);
    CHECK(mj.at("size") == 3);
    // regimes 1 and 3 share a curve in the scenario
    CHECK(mj.at("nearest_non_adjacent")[0].at("nearest_non_adjacent") == 3);

    const auto sweep = run({"sweep", "--bundle", bundle, "--spec", "C1", "--grid-points", "20",
                            "--format", "csv", "--out", (dir / "sweep").string()});
    REQUIRE(sweep.code == 0);
    CHECK(sweep.out.rfind("spec,threshold,regime_count,", 0) == 0);
    CHECK(slurp(dir / "sweep" / "thresholds.csv") == sweep.out);
    CHECK(slurp(dir / "sweep" / "sweep.csv").rfind("beta,regime_count,unexplained_ratio\n", 0) == 0);

    const auto rep = run({"report", "--dir", (dir / "seg").string()});
    CHECK(rep.code == 0);
}

TEST_CASE("reruns are byte identical") {
    const auto a = synth_and_ingest("rerun_a");
    const auto b = synth_and_ingest("rerun_b");
    for (const char* f : {"equilibria.csv", "drivers.csv", "validation.json"})
        CHECK(slurp(a / "bundle" / f) == slurp(b / "bundle" / f));
    CHECK(slurp(a / "synth" / "raw" / "hourly.csv") == slurp(b / "synth" / "raw" / "hourly.csv"));
    const auto s1 = run({"segment", "--bundle", (a / "bundle").string(), "--spec", "E1", "--penalty",
                         "auto", "--fast", "--format", "csv"});
    const auto s2 = run({"segment", "--bundle", (b / "bundle").string(), "--spec", "E1", "--penalty",
                         "auto", "--fast", "--format", "csv"});
    REQUIRE(s1.code == 0);
    CHECK(s1.out == s2.out);
}

TEST_CASE("malformed input exits with the input code") {
    const auto dir = scratch("malformed");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "hourly.csv");
        f << "timestamp,price_eur_mwh,load_mw,wind_mw,solar_mw,hydro_ror_mw\n"
          << "2020-01-01T00:00Z,1,2,0,0,0\n"
          << "not-a-time,1,2,0,0,0\n";
    }
    const auto r = run({"ingest", "--hourly", (dir / "hourly.csv").string(), "--out",
                        (dir / "out").string()});
    CHECK(r.code == cli::kExitInput);
    CHECK(r.err.find("row 3") != std::string::npos);
}

TEST_CASE("unattainable regime targets exit with the infeasible code") {
    const auto bundle = plateau_bundle().string();
    const auto r = run({"segment", "--bundle", bundle, "--spec", "C1", "--target-regimes", "2"});
    CHECK(r.code == cli::kExitInfeasible);
    CHECK(r.err.find("unattainable") != std::string::npos);
    const auto near = run({"segment", "--bundle", bundle, "--spec", "C1", "--target-regimes", "2",
                           "--nearest"});
    REQUIRE(near.code == 0);
    CHECK(report::Json::parse(near.out).at("exact") == false);
    const auto three = run({"segment", "--bundle", bundle, "--spec", "C1", "--target-regimes", "3"});
    REQUIRE(three.code == 0);
    CHECK(report::Json::parse(three.out).at("changepoint_days") == report::Json::array({3, 7}));
    CHECK(run({"segment", "--bundle", bundle, "--spec", "C3", "--penalty", "1"}).code ==
          cli::kExitInput);
}

TEST_CASE("installed binary reports exit codes") {
    const auto dir = scratch("binary");
    const std::string cmd = std::string("\"") + SUPREG_CLI_PATH + "\" synth --scenario \"" + kScenario +
                            "\" --out \"" + dir.string() + "\" > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    status = std::system((std::string("\"") + SUPREG_CLI_PATH + "\" segment > /dev/null 2>&1").c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 2);
}
