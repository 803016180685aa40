// Copyright 2026 The collspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "collspin/semiclassics.hpp"
#include "doctest.h"
#include "json.hpp"

using collspin::cli::run;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result call(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    Result r;
    r.code = run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

struct Csv {
    std::vector<std::string> meta;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        FAIL("missing column " << name);
        return 0;
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
    return out;
}

Csv parse(const std::string& text) {
    Csv c;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) {
        if (line.rfind("# ", 0) == 0) c.meta.push_back(line);
        else if (c.header.empty()) c.header = split(line);
        else c.rows.push_back(split(line));
    }
    return c;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "collspin_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    using collspin::cli::format_number;
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(0.28284271247461906) == "0.28284271247461906");
    CHECK(format_number(3.0) == "3");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_number(NAN) == "nan");
}

TEST_CASE("critical subcommand") {
    const auto second = call({"critical", "--h", "0.2", "--lambda", "0.3"});
    REQUIRE(second.code == 0);
    const auto j = nlohmann::json::parse(second.out);
    CHECK(j["order"] == "second");
    CHECK(j["gamma_b_crit"].get<double>() == doctest::Approx(0.282842712474619).epsilon(1e-15));
    CHECK(j["gamma_b_dd"].get<double>() == doctest::Approx(0.247076634997105).epsilon(1e-15));
    CHECK(j["bistable_window"].is_null());

    const auto first = nlohmann::json::parse(call({"critical", "--h", "0.2", "--lambda", "0.75"}).out);
    CHECK(first["order"] == "first");
    CHECK(first["bistable_window"][0].get<double>() == doctest::Approx(0.663324958071080));
    CHECK(first["bistable_window"][1].get<double>() == 0.75);

    const auto none = nlohmann::json::parse(call({"critical", "--h", "0.2", "--lambda", "0.1"}).out);
    CHECK(none["order"] == "none");
    CHECK_FALSE(none.contains("gamma_b_crit"));

    CHECK(call({"critical", "--h", "abc", "--lambda", "0.3"}).code == 2);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(call({}).code == 2);
    CHECK(call({"bogus"}).code == 2);
    CHECK(call({"sweep", "--model", "xyz"}).code == 2);
    CHECK(call({"sweep", "--sweep", "gamma:0.1:0.2"}).code == 2);
    CHECK(call({"sweep", "--sweep", "gamma:0.1:0.2:0"}).code == 2);
    CHECK(call({"sweep", "--sweep", "h:0.1:0.2:3"}).code == 2);
    CHECK(call({"sweep", "--sweep", "gamma:0.1:inf:3"}).code == 2);
    CHECK(call({"sweep", "--observables", "nonsense"}).code == 2);
    CHECK(call({"sweep", "--model", "crf", "--observables", "basins"}).code == 2);
    CHECK(call({"basins", "--model", "crf"}).code == 2);
    CHECK(call({"qfunction", "--n", "4,5"}).code == 2);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("single-step sweep") {
    const auto r = call({"sweep", "--model", "crf", "--n", "6", "--sweep", "gamma:0.3:0.9:1",
                         "--observables", "moments,c_r"});
    REQUIRE(r.code == 0);
    const auto csv = parse(r.out);
    CHECK(csv.rows.size() == 1);
    CHECK(csv.rows[0][csv.col("gamma")] == "0.3");
    CHECK(csv.rows[0][csv.col("status")] == "ok");
    CHECK(csv.rows[0][csv.col("method")] == "exact");
}

TEST_CASE("sweep rows are sweep-major and N-minor") {
    const auto r = call({"sweep", "--model", "lmg", "--h", "0.2", "--lambda", "0.3", "--n", "4,6",
                         "--sweep", "gamma-b:0.1:0.5:3", "--observables",
                         "moments,c_r,c_phi_grid,fixed_points,eigenvalues,critical_points",
                         "--phi-grid", "8"});
    REQUIRE(r.code == 0);
    const auto csv = parse(r.out);
    REQUIRE(csv.rows.size() == 6);
    const std::vector<std::string> values{"0.1", "0.1", "0.30000000000000004", "0.30000000000000004", "0.5", "0.5"};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(csv.rows[i][csv.col("gamma-b")] == values[i]);
        CHECK(csv.rows[i][csv.col("n")] == (i % 2 ? "6" : "4"));
        CHECK(csv.rows[i].size() == csv.header.size());
    }
    CHECK(csv.col("c_phi_7") > csv.col("c_phi_max"));
    CHECK(csv.rows[0][csv.col("order")] == "second");
    bool has_gamma_a = false;
    for (const auto& m : csv.meta) has_gamma_a |= m == "# gamma_a = 0";
    CHECK(has_gamma_a);
}

TEST_CASE("first-order runs default to a small dephasing rate") {
    const auto r = call({"sweep", "--model", "lmg", "--h", "0.2", "--lambda", "0.75", "--n", "4"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# gamma_a = 0.01\n") != std::string::npos);
    const auto e = call({"sweep", "--model", "lmg", "--h", "0.2", "--lambda", "0.75", "--gamma-a", "0", "--n", "4"});
    CHECK(e.out.find("# gamma_a = 0\n") != std::string::npos);
}

TEST_CASE("output is identical for any worker count") {
    const std::vector<std::string> base{"sweep", "--model", "crf", "--n", "5,9", "--sweep", "gamma:0.1:0.6:6",
                                        "--observables", "moments,c_r,c_phi_grid"};
    auto one = base;
    one.insert(one.end(), {"--workers", "1"});
    auto four = base;
    four.insert(four.end(), {"--workers", "4"});
    const auto a = call(one);
    const auto b = call(four);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == call(one).out);
}

TEST_CASE("json format") {
    const auto r = call({"sweep", "--model", "crf", "--n", "4", "--sweep", "gamma:0.1:0.2:2",
                         "--format", "json", "--observables", "c_r"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["metadata"]["model"] == "crf");
    CHECK(j["rows"].size() == 2);
    CHECK(j["columns"][0] == "model");
}

TEST_CASE("file output and unwritable paths") {
    const fs::path path = scratch("sweep.csv");
    fs::remove(path);
    const auto ok = call({"sweep", "--n", "4", "--out", path.string()});
    CHECK(ok.code == 0);
    CHECK(ok.out.empty());
    CHECK(fs::exists(path));
    CHECK_FALSE(fs::exists(path.string() + ".partial"));

    const fs::path bad = scratch("missing_dir") / "nested" / "x.csv";
    const auto fail = call({"sweep", "--n", "4", "--out", bad.string()});
    CHECK(fail.code == 2);
    CHECK_FALSE(fs::exists(bad));
    CHECK_FALSE(fs::exists(bad.string() + ".partial"));
}

TEST_CASE("config file with flag precedence") {
    const fs::path cfg = scratch("run.toml");
    {
        std::ofstream f(cfg);
        f << "model = \"lmg\"\nh = 0.2\nlambda = 0.3\ngamma-b = 0.45\nn = [4]\n";
    }
    const auto from_file = call({"sweep", "--config", cfg.string()});
    REQUIRE(from_file.code == 0);
    CHECK(from_file.out.find("# model = lmg\n") != std::string::npos);
    CHECK(from_file.out.find("# gamma_b = 0.45\n") != std::string::npos);
    const auto override_flag = call({"sweep", "--config", cfg.string(), "--gamma-b", "0.5"});
    CHECK(override_flag.out.find("# gamma_b = 0.5\n") != std::string::npos);
}

TEST_CASE("failed rows are marked and the run continues") {
    // Zero field and coupling: every diagonal state is stationary.
    const auto r = call({"sweep", "--model", "lmg", "--h", "0", "--lambda", "0", "--gamma-b", "0", "--n", "3",
                         "--sweep", "gamma-b:0:0.5:2", "--observables", "moments"});
    CHECK(r.code == 3);
    const auto csv = parse(r.out);
    REQUIRE(csv.rows.size() == 2);
    CHECK(csv.rows[0][csv.col("status")] == "degenerate-steady-state");
    CHECK(csv.rows[0][csv.col("jz")] == "nan");
    CHECK(csv.rows[1][csv.col("status")] == "ok");
}

TEST_CASE("trajectories terminate on the projected fixed points") {
    const auto r = call({"trajectories", "--model", "lmg", "--h", "0.2", "--lambda", "0.75", "--gamma-b", "0.7",
                         "--count", "64", "--terminal-only", "--seed", "7"});
    REQUIRE(r.code == 0);
    const auto csv = parse(r.out);
    REQUIRE(csv.rows.size() == 64);
    CHECK(csv.header == std::vector<std::string>{"trajectory", "t", "X", "Y", "Z", "U", "V"});
    namespace sc = collspin::semiclassics;
    std::vector<sc::ProjectedPoint> targets;
    for (const auto& fp : sc::lmg_fixed_points({0.2, 0.75, 0.0, 0.7, 1}))
        if (fp.stability == sc::Stability::stable_focus || fp.stability == sc::Stability::stable_node)
            targets.push_back(sc::project(fp.state));
    REQUIRE(targets.size() == 3);
    std::set<std::size_t> hit;
    for (const auto& row : csv.rows) {
        const double u = std::stod(row[csv.col("U")]);
        const double v = std::stod(row[csv.col("V")]);
        bool matched = false;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            if (std::abs(u - targets[k].u) <= 1e-4 && std::abs(v - targets[k].v) <= 1e-4) {
                hit.insert(k);
                matched = true;
            }
        }
        CHECK(matched);
    }
    CHECK(hit.size() == 3);
    CHECK(r.out.find("# seed = 7\n") != std::string::npos);
}

TEST_CASE("full trajectories start at t = 0") {
    const auto r = call({"trajectories", "--model", "crf", "--omega", "0.2", "--gamma", "0.4", "--count", "2",
                         "--t-final", "5"});
    REQUIRE(r.code == 0);
    const auto csv = parse(r.out);
    CHECK(csv.rows.front()[csv.col("t")] == "0");
    CHECK(csv.rows.back()[csv.col("t")] == "5");
}

TEST_CASE("basins subcommand") {
    const auto r = call({"basins", "--model", "lmg", "--h", "0.2", "--lambda", "0.3", "--gamma-b", "0.15",
                         "--grid", "6"});
    REQUIRE(r.code == 0);
    const auto csv = parse(r.out);
    CHECK(csv.rows.size() == 72);
    std::map<std::string, int> counts;
    for (const auto& row : csv.rows) counts[row[csv.col("attractor")]]++;
    CHECK(counts["trivial"] == 0);
    CHECK(counts["broken-plus"] > 0);
    CHECK(counts["broken-minus"] > 0);
}

TEST_CASE("qfunction subcommand") {
    const auto r = call({"qfunction", "--model", "crf", "--omega", "0", "--gamma", "1", "--n", "6",
                         "--theta-res", "8", "--phi-res", "8"});
    REQUIRE(r.code == 0);
    const auto csv = parse(r.out);
    CHECK(csv.header == std::vector<std::string>{"theta", "phi", "value"});
    CHECK(csv.rows.size() == 64);
    // Undriven decay ends in the lowest state, which peaks at the south pole row.
    double best = 0.0;
    std::string best_theta;
    for (const auto& row : csv.rows) {
        const double v = std::stod(row[2]);
        if (v > best) {
            best = v;
            best_theta = row[0];
        }
    }
    CHECK(best_theta == csv.rows.back()[0]);
    CHECK(call({"qfunction", "--n", "6", "--theta-res", "4"}).code == 2);
}
