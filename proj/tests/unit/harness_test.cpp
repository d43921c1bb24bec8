#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "vtl/cli.hpp"
#include "vtl/harness.hpp"

using namespace vtl;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("vtlsim_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int call(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return cli::cli_run(args, out_, err_);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

}  // namespace

TEST(Harness, benefit_formula_matches_table_one) {
    EXPECT_NEAR(std::round(harness::benefit_pct(513, 398) * 10) / 10, 22.4, 1e-9);
    EXPECT_NEAR(std::round(harness::benefit_pct(545, 418) * 10) / 10, 23.3, 1e-9);
    EXPECT_THROW(harness::benefit_pct(0, 1), std::invalid_argument);
}

TEST(Harness, ipg_csv_round_trip) {
    harness::IpgOptions opts;
    opts.distances.push_back(275.0);
    const auto rows = harness::ipg_table(opts);
    ASSERT_EQ(rows.size(), 7u);
    std::stringstream buf;
    harness::write_ipg_csv(buf, rows);
    EXPECT_EQ(harness::read_ipg_csv(buf), rows);

    std::istringstream bad("distance_ft,mean_ipg_ms,n_received\n1,2\n");
    EXPECT_THROW(harness::read_ipg_csv(bad), std::invalid_argument);
}

TEST(Harness, comparison_is_independent_of_parallelism) {
    const Scenario s = test::bundled("fieldtest");
    const auto serial = harness::compare(s, {3, 1, 2}, 1);
    const auto parallel = harness::compare(s, {1, 2, 3}, 3);
    EXPECT_EQ(serial, parallel);
    EXPECT_EQ(serial.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
    ASSERT_EQ(serial.rows.size(), 6u);
    for (const auto& r : serial.rows) {
        EXPECT_DOUBLE_EQ(r.benefit_pct, 100.0 * (r.stop4_time_s - r.vtl_time_s) / r.stop4_time_s);
    }
    EXPECT_EQ(harness::comparison_from_json(harness::to_json(serial)), serial);
}

TEST_F(Cli, no_subcommand_is_usage_error) {
    EXPECT_EQ(call({}), cli::kUsage);
    EXPECT_EQ(call({"fly"}), cli::kUsage);
    EXPECT_EQ(call({"run", "--scenario", "x"}), cli::kUsage);
    EXPECT_EQ(call({"run", "--scenario", "x", "--controller", "yield"}), cli::kUsage);
    EXPECT_EQ(call({"ipg", "--packets", "10", "--out", path("x.csv")}), cli::kUsage);
    EXPECT_FALSE(err_.str().empty());
}

TEST_F(Cli, scenario_errors_exit_2) {
    EXPECT_EQ(call({"run", "--scenario", path("missing.scenario"), "--controller", "vtl"}), cli::kScenarioError);
    std::string text = dump_scenario(test::bundled("lone"));
    text.insert(1, R"("weather": 1,)");
    std::ofstream(path("bad.scenario")) << text;
    EXPECT_EQ(call({"run", "--scenario", path("bad.scenario"), "--controller", "vtl"}), cli::kScenarioError);
    EXPECT_NE(err_.str().find("weather"), std::string::npos);
}

TEST_F(Cli, timeout_exits_3_with_partial_report) {
    Scenario s = test::bundled("fieldtest");
    s.max_time_s = 20;
    std::ofstream(path("short.scenario")) << dump_scenario(s);
    EXPECT_EQ(call({"run", "--scenario", path("short.scenario"), "--controller", "stop4", "--out", path("r.json")}),
              cli::kTimeout);
    EXPECT_TRUE(report_from_json(slurp(path("r.json"))).timed_out);
}

TEST_F(Cli, run_twice_is_byte_identical) {
    const std::string scen = test::scenario_path("fieldtest").string();
    for (const char* out : {"a.json", "b.json"}) {
        ASSERT_EQ(call({"run", "--scenario", scen, "--controller", "vtl", "--seed", "7", "--out", path(out),
                        "--trace", path(std::string(out) + ".csv")}),
                  cli::kOk);
    }
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
    EXPECT_EQ(slurp(path("a.json.csv")), slurp(path("b.json.csv")));
    EXPECT_EQ(report_from_json(slurp(path("a.json"))).seed, 7u);
}

TEST_F(Cli, ipg_writes_six_rows) {
    ASSERT_EQ(call({"ipg", "--packets", "2000", "--seed", "1", "--out", path("ipg.csv")}), cli::kOk);
    std::ifstream in(path("ipg.csv"));
    const auto rows = harness::read_ipg_csv(in);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_DOUBLE_EQ(rows.back().distance_ft, 300.0);
    EXPECT_NEAR(rows.back().mean_ipg_ms, 1000.0, 150.0);
}

TEST_F(Cli, compare_writes_report) {
    const std::string scen = test::scenario_path("fieldtest").string();
    ASSERT_EQ(call({"compare", "--scenario", scen, "--seeds", "2", "--out", path("cmp.json")}), cli::kOk);
    const auto r = harness::comparison_from_json(slurp(path("cmp.json")));
    EXPECT_EQ(r.seeds, (std::vector<std::uint64_t>{1, 2}));
    EXPECT_EQ(r.rows.size(), 4u);
}

TEST_F(Cli, help_is_success) {
    EXPECT_EQ(call({"--help"}), cli::kOk);
    EXPECT_NE(out_.str().find("compare"), std::string::npos);
}
