#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bootgrid/cli.hpp"

using namespace bootgrid;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "bootgrid");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> body_lines(const std::string& csv) {
    std::vector<std::string> lines;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override { setenv("SOURCE_DATE_EPOCH", "1700000000", 1); }
    void TearDown() override { unsetenv("SOURCE_DATE_EPOCH"); }
};

}  // namespace

TEST_F(CliTest, HelpAndVersionExitZero) {
    EXPECT_EQ(run_cli({"--help"}).code, 0);
    const auto v = run_cli({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find(cli::kVersion), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(run_cli({}).code, 2);
    const auto unknown = run_cli({"fill", "--bogus"});
    EXPECT_EQ(unknown.code, 2);
    EXPECT_FALSE(unknown.err.empty());
    EXPECT_EQ(run_cli({"fill", "--rule", "nosuch", "--L", "8", "--p", "0.1"}).code, 2);
    EXPECT_EQ(run_cli({"fill", "--rule", "12", "--p", "0.1"}).code, 2);
    EXPECT_EQ(run_cli({"fill", "--rule", "12", "--dims", "4,4,4", "--p", "0.1"}).code, 2);
    EXPECT_EQ(run_cli({"fill", "--L", "8", "--p", "0.1", "--format", "xml"}).code, 2);
}

TEST_F(CliTest, RuntimeErrorsExitOne) {
    EXPECT_EQ(run_cli({"fill", "--L", "8", "--p", "1.5"}).code, 1);
    EXPECT_EQ(run_cli({"close", "--in", "/nonexistent/cfg.txt"}).code, 1);
    EXPECT_EQ(run_cli({"scaling", "--family", "duarte", "--lnv", "1e6"}).code, 1);
}

TEST_F(CliTest, PcIsByteIdenticalAcrossRuns) {
    const std::vector<std::string> args{"pc", "--rule", "standard2", "--L", "16", "--trials", "2000", "--seed", "7"};
    const auto a = run_cli(args), b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto lines = body_lines(a.out);
    ASSERT_EQ(lines.size(), 2U);
    EXPECT_EQ(lines[0], "family,dims,target,mean,stderr,trials,seed");
    EXPECT_EQ(split(lines[1])[1], "16x16");
    EXPECT_NE(a.out.find("# seed: 7"), std::string::npos);
    EXPECT_NE(a.out.find("# timestamp: 2023-11-14T22:13:20Z"), std::string::npos);
}

TEST_F(CliTest, SweepBodyIgnoresThreadCount) {
    std::vector<std::string> args{"sweep", "--rule", "12", "--L", "12,20", "--p", "0.05,0.1", "--trials", "500", "--seed", "3"};
    auto base = args;
    base.insert(base.end(), {"--threads", "1"});
    const auto one = run_cli(base);
    ASSERT_EQ(one.code, 0) << one.err;
    EXPECT_EQ(body_lines(one.out).size(), 5U);
    for (const char* t : {"4", "8"}) {
        auto more = args;
        more.insert(more.end(), {"--threads", t});
        EXPECT_EQ(body_lines(run_cli(more).out), body_lines(one.out));
    }
}

TEST_F(CliTest, InvertGivesOneNumericRow) {
    const auto r = run_cli({"invert", "--family", "12", "--lnv", "1e6"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = body_lines(r.out);
    ASSERT_EQ(lines.size(), 2U);
    const auto fields = split(lines[1]);
    ASSERT_EQ(fields.size(), 7U);
    for (const auto& f : fields) {
        std::size_t used = 0;
        EXPECT_TRUE(std::isfinite(std::stod(f, &used))) << f;
        EXPECT_EQ(used, f.size());
    }
    const auto m = ScalingModel::for_family(RuleFamily::one_two());
    EXPECT_EQ(std::stod(fields[1]), invert_numeric(1e6, m));
}

TEST_F(CliTest, JsonOutputCarriesManifest) {
    const auto r = run_cli({"fill", "--rule", "standard2", "--dims", "6,4", "--p", "0.3,0.6", "--trials", "100",
                            "--seed", "9", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["manifest"]["subcommand"], "fill");
    EXPECT_EQ(j["manifest"]["seed"], 9);
    EXPECT_EQ(j["manifest"]["version"], cli::kVersion);
    EXPECT_EQ(j["rows"].size(), 2U);
    EXPECT_EQ(j["rows"][1]["dims"], "6x4");
    EXPECT_EQ(j["rows"][1]["p"], 0.6);
    const Estimate e = fill_probability(make_rule(RuleFamily::standard(2)), GridSpec({6, 4}), 0.6, 100, 9);
    EXPECT_EQ(j["rows"][1]["mean"], e.mean);
}

TEST_F(CliTest, CloseRoundTripsThroughFiles) {
    Configuration cfg(GridSpec({5, 5}));
    cfg.set({0, 2, 0});
    cfg.set({1, 2, 0});
    cfg.set({2, 3, 0});
    const std::string in = ::testing::TempDir() + "bootgrid_close_in.txt";
    const std::string out = ::testing::TempDir() + "bootgrid_close_out.txt";
    {
        std::ofstream f(in);
        write_text(f, cfg);
    }
    const Rule rule = make_rule(RuleFamily::one_two());
    for (const char* method : {"fast", "naive"}) {
        const auto r = run_cli({"close", "--rule", "12", "--in", in, "--out", out, "--method", method});
        ASSERT_EQ(r.code, 0) << r.err;
        std::ifstream f(out);
        EXPECT_EQ(read_text(f), closure_naive(cfg, rule)) << method;
    }
}

TEST_F(CliTest, GrowthAndNucleationTables) {
    const auto g = run_cli({"growth", "--event", "east_column", "--size", "4,25", "--p", "0.2", "--trials", "2000"});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto lines = body_lines(g.out);
    ASSERT_EQ(lines.size(), 3U);
    EXPECT_NEAR(std::stod(split(lines[1])[3]), 1 - std::pow(0.8, 4), 1e-12);
    EXPECT_EQ(split(lines[2])[3], "");

    const auto n = run_cli({"nucleation", "--p", "1e-6,3e-8"});
    ASSERT_EQ(n.code, 0) << n.err;
    const auto rows = body_lines(n.out);
    ASSERT_EQ(rows.size(), 3U);
    EXPECT_EQ(split(rows[1]).back(), "");
    EXPECT_EQ(std::stod(split(rows[2]).back()), nucleation_log_prob_sum(3e-8));
}

TEST_F(CliTest, ScalingReportsWindowRatio) {
    const auto r = run_cli({"scaling", "--family", "standard2", "--lnv", "1e6", "--C", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto f = split(body_lines(r.out)[1]);
    ASSERT_EQ(f.size(), 6U);
    EXPECT_DOUBLE_EQ(std::stod(f[3]), 1e-6);
    EXPECT_NEAR(std::stod(f[4]), std::log(1e6) / 1e12, 1e-25);
}
