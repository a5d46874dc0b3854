// Copyright 2026 The qembed Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qembed/cli.hpp"

using namespace qembed;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = QEMBED_FIXTURE_DIR;

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("qembed_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-1.5e-300) == "-1.5e-300");
    const double third = 1.0 / 3.0;
    CHECK(std::stod(format_number(third)) == third);
}

TEST_CASE("validate") {
    auto ok = cli({"validate", "--config", kFixtures + "/random_model.json"});
    CHECK(ok.code == kExitOk);
    CHECK(ok.out.find("principal 2, 2 auxiliaries") != std::string::npos);

    const auto dir = scratch("validate");
    const auto bad = dir / "bad.json";
    std::ofstream(bad) << R"({"model": {"dims": {"principal": 2}, "H_s": [[0, 1], [0, 0]]}, "initial": {"principal": "plus"}})";
    auto fail = cli({"validate", "--config", bad.string()});
    CHECK(fail.code == kExitCheckFailed);
    CHECK(fail.err.find("model.H_s: hermiticity") != std::string::npos);

    const auto norm = dir / "normalized.json";
    CHECK(cli({"validate", "--config", kFixtures + "/cascade_decay.json", "--emit-normalized", norm.string()}).code ==
          kExitOk);
    const auto again = dir / "again.json";
    CHECK(cli({"validate", "--config", norm.string(), "--emit-normalized", again.string()}).code == kExitOk);
    CHECK(slurp(norm) == slurp(again));

    CHECK(cli({"validate"}).code == kExitRuntime);
    CHECK(cli({"frobnicate", "--config", kFixtures + "/random_model.json"}).code == kExitRuntime);
    CHECK(cli({"validate", "--config", "/nonexistent.json"}).code == kExitRuntime);
}

TEST_CASE("crosscheck on the random fixture") {
    const auto dir = scratch("crosscheck");
    auto r = cli({"crosscheck", "--config", kFixtures + "/random_model.json", "--out", dir.string()});
    CHECK(r.code == kExitOk);
    const auto report = lines(slurp(dir / "crosscheck.txt"));
    REQUIRE(report.size() == 3);
    CHECK(report[0].rfind("PASS shared_path_deviation", 0) == 0);
    CHECK(report[1].rfind("PASS mutation_deviation", 0) == 0);
    const double dev = std::stod(report[0].substr(report[0].find(' ', 5) + 1));
    CHECK(dev <= 1e-10);

    auto closed = cli({"crosscheck", "--config", kFixtures + "/closed_exchange.json", "--out", dir.string(), "--quiet"});
    CHECK(closed.code == kExitOk);
    CHECK(closed.out.empty());
    CHECK(slurp(dir / "crosscheck.txt").find("PASS closed_system_oracle") != std::string::npos);
}

TEST_CASE("qme output") {
    const auto dir = scratch("qme");
    CHECK(cli({"qme", "--config", kFixtures + "/closed_exchange.json", "--out", dir.string()}).code == kExitOk);
    const auto rows = lines(slurp(dir / "qme.csv"));
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == "t,sz,p0");
    CHECK(rows[1] == "0,1,1");

    // t_end = 0: header plus the initial observables.
    const auto cfg = dir / "zero.json";
    std::ofstream(cfg) << R"({"model": {"dims": {"principal": 2}, "H_s": [[1, 0], [0, -1]]},
                             "initial": {"principal": "excited"}, "sim": {"dt": 0.01, "t_end": 0}})";
    CHECK(cli({"qme", "--config", cfg.string(), "--out", dir.string()}).code == kExitOk);
    const auto single = lines(slurp(dir / "qme.csv"));
    REQUIRE(single.size() == 2);
    CHECK(single[0] == "t,sx,sy,sz");
    CHECK(single[1] == "0,0,0,1");
}

TEST_CASE("sme output is byte-identical across runs and follows --seed") {
    const auto a = scratch("sme_a"), b = scratch("sme_b"), c = scratch("sme_c");
    const std::string cfg = kFixtures + "/random_model.json";
    CHECK(cli({"sme", "--config", cfg, "--out", a.string()}).code == kExitOk);
    CHECK(cli({"sme", "--config", cfg, "--out", b.string()}).code == kExitOk);
    CHECK(cli({"sme", "--config", cfg, "--out", c.string(), "--seed", "99"}).code == kExitOk);
    const auto sa = slurp(a / "sme.csv");
    CHECK(sa == slurp(b / "sme.csv"));
    CHECK(slurp(a / "sme_states.csv") == slurp(b / "sme_states.csv"));
    CHECK(sa != slurp(c / "sme.csv"));
    const auto rows = lines(sa);
    REQUIRE(rows.size() == 1001);
    CHECK(rows[0] == "t,dY,dI,mval");
    CHECK(rows[1].rfind("0,", 0) == 0);
}

TEST_CASE("ensemble output") {
    const auto dir = scratch("ensemble");
    const auto cfg = dir / "small.json";
    std::ofstream(cfg) << R"({"model": {"cascade": {"H_s": [[0, 0], [0, 0]], "L_s": [[0, 0], [1, 0]],
                                                    "H_a": [[0, 0], [0, 0]], "L_a": [[0, 0], [1, 0]]},
                                        "probe": [[0, 0], [1, 0]]},
                             "initial": {"principal": "plus", "aux": ["excited"]},
                             "sim": {"dt": 0.01, "t_end": 0.5, "seed": 3},
                             "run": {"N": 200, "observables": ["sz"], "checkpoints": 5}})";
    const auto r = cli({"ensemble", "--config", cfg.string(), "--out", dir.string()});
    CHECK(r.code == kExitOk);
    const auto rows = lines(slurp(dir / "ensemble.csv"));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "t,sz,sz_stderr,sz_qme");
    CHECK(slurp(dir / "ensemble_summary.txt").find("PASS innovation_mean_abs") != std::string::npos);
    const auto first = slurp(dir / "ensemble.csv");
    CHECK(cli({"ensemble", "--config", cfg.string(), "--out", dir.string(), "--quiet"}).code == kExitOk);
    CHECK(slurp(dir / "ensemble.csv") == first);
}

TEST_CASE("runtime failures exit with 2") {
    const auto dir = scratch("runtime");
    const auto cfg = dir / "blowup.json";
    std::ofstream(cfg) << R"({"model": {"dims": {"principal": 2}, "H_s": [[0, 0], [0, 0]], "probe": [[0, 0], [10, 0]]},
                             "initial": {"principal": "excited"},
                             "sim": {"dt": 1, "t_end": 1000, "measurement": "none"}})";
    const auto r = cli({"sme", "--config", cfg.string(), "--out", dir.string()});
    CHECK(r.code == kExitRuntime);
    CHECK(r.err.find("qembed sme: step") != std::string::npos);
}
