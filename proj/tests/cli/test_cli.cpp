// Copyright 2026 The gqcr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gqcr/json_io.hpp"
#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gqcr::cli;

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / "gqcr_cli_tests" / info->name();
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    int exec(const std::string &command, const json &config, const std::string &sub = "out") {
        out_.str("");
        err_.str("");
        Invocation inv{.command = command, .config = "inline.json", .out = dir_ / sub};
        return execute(inv, config, out_, err_);
    }

    json read_json(const std::string &rel) const { return json::parse(gqcr::read_text_file(dir_ / rel)); }
    std::string read(const std::string &rel) const { return gqcr::read_text_file(dir_ / rel); }

    fs::path dir_;
    std::ostringstream out_, err_;
};

TEST_F(CliTest, BoundPhaseExample) {
    ASSERT_EQ(exec("bound", {{"version", 1}, {"model", "phase"}, {"params", {{"N", 100}}},
                             {"derivatives", "analytic"}}),
              kExitSuccess)
        << err_.str();
    const json report = read_json("out/bound.json")["report"];
    EXPECT_NEAR(report["delta_theta_min"].get<double>(), 0.05, 1e-9);
    EXPECT_NEAR(report["factors"]["mode_shape_term"].get<double>(), 4.0, 1e-9);
    EXPECT_NE(read("out/bound.txt").find("factor 4|u'|^2"), std::string::npos);
    EXPECT_EQ(out_.str(), read("out/bound.txt"));
}

TEST_F(CliTest, BoundSqueezedDisplacementRatio) {
    ASSERT_EQ(exec("bound", {{"version", 1}, {"model", "displacement"}, {"params", {{"N", 1e6}}}}, "a"), 0);
    ASSERT_EQ(exec("bound", {{"version", 1}, {"model", "displacement"}, {"params", {{"N", 1e6}, {"squeeze_db", 6}}}},
                   "b"),
              0);
    const double plain = read_json("a/bound.json")["report"]["delta_theta_min"].get<double>();
    const double squeezed = read_json("b/bound.json")["report"]["delta_theta_min"].get<double>();
    EXPECT_NEAR(squeezed / plain, std::pow(10.0, -6.0 / 20.0), 1e-9);
}

TEST_F(CliTest, VersionIsRequired) {
    EXPECT_EQ(exec("bound", {{"model", "phase"}}), kExitConfig);
    EXPECT_NE(err_.str().find("version"), std::string::npos);
    EXPECT_EQ(exec("bound", {{"version", 2}, {"model", "phase"}}), kExitConfig);
}

TEST_F(CliTest, UnknownKeysAreNamed) {
    EXPECT_EQ(exec("bound", {{"version", 1}, {"model", "phase"}, {"sigma", 1}}), kExitConfig);
    EXPECT_NE(err_.str().find("'sigma'"), std::string::npos);
    EXPECT_EQ(exec("bound", {{"version", 1}, {"model", "phase"}, {"params", {{"NN", 1}}}}), kExitConfig);
    EXPECT_NE(err_.str().find("NN"), std::string::npos);
    EXPECT_EQ(exec("simulate", {{"version", 1}, {"model", "phase"}, {"params", {{"N", 10}}}, {"lo", {{"colour", 1}}}}), kExitConfig);
    EXPECT_NE(err_.str().find("colour"), std::string::npos);
    EXPECT_EQ(exec("bound", {{"version", 1}, {"model", "no-such-model"}}), kExitConfig);
}

TEST_F(CliTest, DomainAndTypeErrorsAreConfigErrors) {
    EXPECT_EQ(exec("bound", {{"version", 1}, {"model", "phase"}, {"params", {{"N", -1}}}}), kExitConfig);
    EXPECT_EQ(exec("bound", {{"version", 1}, {"model", "phase"}, {"step", "small"}}), kExitConfig);
    EXPECT_EQ(exec("bound", {{"version", 1}, {"model", "phase"}, {"derivatives", "symbolic"}}), kExitConfig);
    EXPECT_EQ(exec("allocate", {{"version", 1}, {"bank_db", {6, 3}}, {"bank_sigma2", {1, 1}}}), kExitConfig);
    EXPECT_EQ(exec("allocate", {{"version", 1}, {"bank_sigma2", {0.5, -1}}}), kExitConfig);
}

TEST_F(CliTest, DegenerateModelExitsThree) {
    EXPECT_EQ(exec("bound", {{"version", 1}, {"model", "vacuum"}}), kExitDegenerate);
    EXPECT_NE(err_.str().find("NoInformation"), std::string::npos);
    EXPECT_EQ(exec("modes", {{"version", 1}, {"model", "squeeze-param"}}), kExitDegenerate);
}

TEST_F(CliTest, OracleCheckBuiltinsAndRandom) {
    ASSERT_EQ(exec("oracle-check", {{"version", 1}, {"random_families", 50}, {"grid_pairs", 200}}), kExitSuccess)
        << err_.str();
    const json summary = read_json("out/oracle_summary.json");
    EXPECT_TRUE(summary["passed"].get<bool>());
    EXPECT_LT(summary["worst_rel_err"].get<double>(), 1e-4);
    EXPECT_LT(summary["worst_grid_abs_err"].get<double>(), 1e-6);
    EXPECT_GE(summary["cases"].get<int>(), 58);
    EXPECT_NE(read("out/oracle.csv").find("vacuum,skipped,skipped,skipped"), std::string::npos);
}

TEST_F(CliTest, OracleCheckSingleModel) {
    ASSERT_EQ(exec("oracle-check", {{"version", 1}, {"model", "amplitude"}, {"params", {{"N", 50}, {"m", 1}}},
                                    {"grid_pairs", 0}}),
              kExitSuccess);
    const std::string csv = read("out/oracle.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_FALSE(fs::exists(dir_ / "out/overlap_grid.csv"));
}

TEST_F(CliTest, SimulateSaturatesBound) {
    ASSERT_EQ(exec("simulate", {{"version", 1}, {"model", "phase"}, {"params", {{"N", 1e5}}},
                                {"repetitions", 20000}, {"seed", 5}}),
              kExitSuccess)
        << err_.str();
    const json report = read_json("out/summary.json")["report"];
    EXPECT_NEAR(report["ratio"].get<double>(), 1.0, 0.02);
    const std::string csv = read("out/repetitions.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 20001);
}

TEST_F(CliTest, SimulateNSweepSlope) {
    ASSERT_EQ(exec("simulate", {{"version", 1}, {"model", "displacement"}, {"repetitions", 4000},
                                {"sweep", {{"parameter", "N"}, {"values", {1e2, 1e3, 1e4, 1e5, 1e6}}}}}),
              kExitSuccess)
        << err_.str();
    const json summary = read_json("out/summary.json");
    EXPECT_NEAR(summary["log_log_slope_empirical"].get<double>(), -0.5, 0.005);
    EXPECT_NEAR(summary["log_log_slope_qcr"].get<double>(), -0.5, 1e-9);
    EXPECT_NE(read("out/sweep.svg").find("<svg"), std::string::npos);
}

TEST_F(CliTest, SimulateDivergentLoFlagged) {
    ASSERT_EQ(exec("simulate", {{"version", 1}, {"model", "phase"}, {"params", {{"N", 1e3}}},
                                {"lo", {{"mode", {{"hg", 2}}}}}, {"repetitions", 100}}),
              kExitSuccess);
    EXPECT_TRUE(read_json("out/summary.json")["report"]["divergent"].get<bool>());
    EXPECT_NE(out_.str().find("diverges"), std::string::npos);
}

TEST_F(CliTest, AllocateDefaultBank) {
    ASSERT_EQ(exec("allocate", {{"version", 1}, {"bank_db", {6, 3, 0, 0}}}), kExitSuccess) << err_.str();
    const json j = read_json("out/allocation.json");
    EXPECT_TRUE(j["audit"]["passed"].get<bool>());
    EXPECT_EQ(j["audit"]["trials"].get<int>(), 1000);
    EXPECT_EQ(j["audit"]["bound_violations"].get<int>(), 0);
    EXPECT_NEAR(j["optimal"]["report"]["gamma_inv_11"].get<double>(), std::pow(10.0, 0.6), 1e-12);
    const std::string csv = read("out/audit.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1001);
}

TEST_F(CliTest, SweepWritesTableAndPlot) {
    ASSERT_EQ(exec("sweep", {{"version", 1}, {"model", "phase"}, {"params", {{"N", 10}}},
                             {"sweep", {{"parameter", "squeeze_db"}, {"values", {0, 3, 6, 10}}}}}),
              kExitSuccess)
        << err_.str();
    const std::string csv = read("out/sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_NE(csv.find("phase,N=10;squeeze_db=6,"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "out/sweep.svg"));
    EXPECT_EQ(exec("sweep", {{"version", 1}, {"model", "phase"}}), kExitConfig);
    EXPECT_EQ(exec("sweep", {{"version", 1}, {"model", "phase"},
                             {"sweep", {{"parameter", "banana"}, {"values", {1}}}}}),
              kExitConfig);
}

TEST_F(CliTest, SweepNSlope) {
    ASSERT_EQ(exec("sweep", {{"version", 1}, {"model", "displacement"}, {"params", {{"squeeze_db", 3}}},
                             {"sweep", {{"parameter", "N"}, {"values", {1, 10, 100, 1000}}}}}),
              kExitSuccess);
    EXPECT_NEAR(read_json("out/sweep.json")["log_log_slope"].get<double>(), -0.5, 1e-9);
}

TEST_F(CliTest, ModesWritesBasis) {
    ASSERT_EQ(exec("modes", {{"version", 1}, {"model", "displacement"}, {"params", {{"N", 100}}}}), kExitSuccess);
    const json basis = read_json("out/basis.json");
    EXPECT_LT(basis["gram_defect"].get<double>(), 1e-8);
    EXPECT_EQ(basis["detection_basis"].size(), 6u);
    EXPECT_TRUE(fs::exists(dir_ / "out/detection_05.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out/mean_field_mode.csv"));
}

TEST_F(CliTest, RerunsAreByteIdentical) {
    const json sim{{"version", 1}, {"model", "displacement"}, {"params", {{"N", 1e4}, {"squeeze_db", 3}}},
                   {"repetitions", 500}, {"samples", 4}};
    const json alloc{{"version", 1}, {"bank_db", {6, 3, 0}}, {"trials", 200}};
    ASSERT_EQ(exec("simulate", sim, "a"), 0);
    ASSERT_EQ(exec("simulate", sim, "b"), 0);
    EXPECT_EQ(read("a/summary.json"), read("b/summary.json"));
    EXPECT_EQ(read("a/repetitions.csv"), read("b/repetitions.csv"));
    ASSERT_EQ(exec("allocate", alloc, "c"), 0);
    ASSERT_EQ(exec("allocate", alloc, "d"), 0);
    EXPECT_EQ(read("c/allocation.json"), read("d/allocation.json"));
}

TEST_F(CliTest, ThreadCountDoesNotChangeOutput) {
    const json sim{{"version", 1}, {"model", "phase"}, {"params", {{"N", 1e4}}}, {"repetitions", 777}};
    Invocation one{.command = "simulate", .config = "x", .out = dir_ / "one", .threads = 1u};
    Invocation four{.command = "simulate", .config = "x", .out = dir_ / "four", .threads = 4u};
    ASSERT_EQ(execute(one, sim, out_, err_), 0);
    ASSERT_EQ(execute(four, sim, out_, err_), 0);
    EXPECT_EQ(read("one/repetitions.csv"), read("four/repetitions.csv"));
    EXPECT_EQ(read("one/summary.json"), read("four/summary.json"));
}

TEST_F(CliTest, SeedFlagOverridesConfig) {
    const json sim{{"version", 1}, {"model", "phase"}, {"params", {{"N", 1e4}}}, {"repetitions", 50}, {"seed", 1}};
    Invocation inv{.command = "simulate", .config = "x", .out = dir_ / "a", .seed = 99u};
    ASSERT_EQ(execute(inv, sim, out_, err_), 0);
    EXPECT_EQ(read_json("a/summary.json")["seed"].get<int>(), 99);
}

TEST(ResolveThreads, ExplicitWins) { EXPECT_EQ(resolve_threads(3u), 3u); }

TEST(ResolveThreads, EnvironmentFallback) {
    ::setenv("GQCR_THREADS", "5", 1);
    EXPECT_EQ(resolve_threads(std::nullopt), 5u);
    ::setenv("GQCR_THREADS", "junk", 1);
    EXPECT_GE(resolve_threads(std::nullopt), 1u);
    ::unsetenv("GQCR_THREADS");
}

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(exit_code_for(gqcr::ErrorCode::ConfigError), kExitConfig);
    EXPECT_EQ(exit_code_for(gqcr::ErrorCode::DomainError), kExitConfig);
    EXPECT_EQ(exit_code_for(gqcr::ErrorCode::ZeroMeanField), kExitDegenerate);
    EXPECT_EQ(exit_code_for(gqcr::ErrorCode::PurityError), kExitDegenerate);
}

// The installed binary, end to end.
int run_binary(const std::string &args) {
    const int status = std::system((std::string(GQCR_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, BinaryExitCodes) {
    const fs::path good = dir_ / "good.json";
    const fs::path bad = dir_ / "bad.json";
    const fs::path vac = dir_ / "vac.json";
    gqcr::write_text_file(good, R"({"version": 1, "model": "phase", "params": {"N": 100}})");
    gqcr::write_text_file(bad, R"({"version": 1, "model": "phase", "extra": true})");
    gqcr::write_text_file(vac, R"({"version": 1, "model": "vacuum"})");
    const std::string out = " --out " + (dir_ / "bin").string();
    EXPECT_EQ(run_binary("bound --config " + good.string() + out), 0);
    EXPECT_TRUE(fs::exists(dir_ / "bin/bound.json"));
    EXPECT_EQ(run_binary("bound --config " + bad.string() + out), 2);
    EXPECT_EQ(run_binary("bound --config " + vac.string() + out), 3);
    EXPECT_EQ(run_binary("bound --config " + (dir_ / "missing.json").string() + out), 2);
    EXPECT_EQ(run_binary("teleport --config " + good.string()), 2);
    EXPECT_EQ(run_binary("bound"), 2);
    EXPECT_EQ(run_binary("--help"), 0);
}

}  // namespace
