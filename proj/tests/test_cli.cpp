#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "capnorm/cli.hpp"

using namespace capnorm;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args)
{
    args.insert(args.begin(), "capnorm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

/// Runs the installed binary; returns its exit status and stdout.
Result spawn(const std::string& args)
{
    Result r;
    const std::string cmd = std::string(CAPNORM_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("capnorm_test_" + name)).string();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

const std::string two_cells = std::string(CAPNORM_DATA_DIR) + "/two_cells.json";

} // namespace

TEST(Cli, ContentExample)
{
    const auto r = call({"content", "--set", two_cells, "--delta", "0.7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_NEAR(j["value"].get<double>(), 0.757858283255199, 1e-15);
    EXPECT_EQ(j["cover"].size(), 2u);
    EXPECT_LE(j["bracket"]["lower"].get<double>(), j["bracket"]["upper"].get<double>());
}

TEST(Cli, BinaryExitCodes)
{
    EXPECT_EQ(spawn("content --set " + two_cells + " --delta 0.7").code, 0);
    EXPECT_EQ(spawn("verify poincare --config missing.toml").code, 2);
    EXPECT_EQ(spawn("no_such_command").code, 2);
    EXPECT_EQ(spawn("").code, 2);
    EXPECT_EQ(spawn("--help").code, 0);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(call({"content", "--set", two_cells}).code, 2);
    EXPECT_EQ(call({"content", "--set", two_cells, "--delta", "abc"}).code, 2);
    EXPECT_EQ(call({"content", "--set", two_cells, "--delta", "1.5"}).code, 2);
    EXPECT_EQ(call({"verify", "no_such_experiment"}).code, 2);
    EXPECT_EQ(call({"verify", "poincare", "--param", "bogus=1"}).code, 2);
    EXPECT_EQ(call({"verify", "poincare", "--param", "p=0.5"}).code, 2);
    const auto r = call({"verify", "poincare", "--param", "p=0.5"});
    EXPECT_NE(r.err.find("p in (delta/dim, inf)"), std::string::npos) << r.err;
}

TEST(Cli, UnknownConfigKeyIsError)
{
    const auto path = temp_path("bad.json");
    write(path, R"({"p": 1.5, "colour": "red"})");
    const auto r = call({"verify", "poincare", "--config", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("unknown key 'colour'"), std::string::npos);
    write(path, "{not json");
    EXPECT_EQ(call({"verify", "poincare", "--config", path}).code, 2);
}

TEST(Cli, Precedence)
{
    const auto path = temp_path("prec.json");
    write(path, R"({"p": 1.8, "q": 1.8, "depths": [3, 4, 5]})");
    auto r = call({"verify", "poincare", "--config", path});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["config"]["p"], 1.8);
    EXPECT_EQ(j["config"]["delta"], 2.0);
    r = call({"verify", "poincare", "--config", path, "--param", "p=1.6"});
    j = Json::parse(r.out);
    EXPECT_EQ(j["config"]["p"], 1.6);
    EXPECT_EQ(j["config"]["q"], 1.8);
    EXPECT_EQ(j["params"]["p"], 1.6);
}

TEST(Cli, EndpointFilledIntoConfig)
{
    const auto r = call({"verify", "poincare_weak", "--param", "depths=[3,4,5]"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["config"]["p"], 1.0);
}

TEST(Cli, VerdictFailExitsOne)
{
    // eta at the window's closed end, q_tilde small: gradient norm varies > 10%.
    const auto r = call({"verify", "sharpness_poincare", "--param", "q_tilde=4", "--param", "depth=6"});
    EXPECT_EQ(r.code, 1) << r.err;
    EXPECT_EQ(Json::parse(r.out)["verdict"], "fail");
}

TEST(Cli, ReportRoundTripAndCsv)
{
    const auto out = temp_path("report.json"), csv = temp_path("report.csv");
    const auto r = call({"verify", "riesz", "--out", out, "--csv", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(out);
    const auto j = Json::parse(in);
    for (const char* key : {"experiment", "params", "series", "verdict", "provenance", "config", "detail"})
        EXPECT_TRUE(j.contains(key)) << key;
    // Re-running the embedded config reproduces the report.
    const auto again = cli::run_experiment(j["experiment"], j["config"]);
    EXPECT_EQ(again.dump(), j.dump());
    std::ifstream c(csv);
    std::string header, line;
    std::getline(c, header);
    EXPECT_EQ(header, "label,value");
    std::size_t rows = 0;
    while (std::getline(c, line)) ++rows;
    EXPECT_EQ(rows, j["series"].size());
}

TEST(Cli, DeterministicBytes)
{
    const auto a = call({"verify", "hedberg", "--param", "depths=[4,5,6]"});
    const auto b = call({"verify", "hedberg", "--param", "depths=[4,5,6]"});
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, OperatorSubcommands)
{
    const auto fn = temp_path("fn.json");
    const auto g = centered_grid(2, 3, 2.0);
    write(fn, function_to_json(sample(Sampler(BallIndicator{{}, 0.5}), g)).dump());

    auto r = call({"norm", "--fn", fn, "--p", "1.5", "--q", "inf", "--delta", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = Json::parse(r.out);
    EXPECT_GT(j["norm"].get<double>(), 0.0);

    r = call({"maximal", "--fn", fn, "--mu", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    j = Json::parse(r.out);
    const auto m = function_from_json(j["function"]);
    EXPECT_EQ(m.size(), g.cell_count());

    r = call({"riesz", "--fn", fn, "--alpha", "1", "--method", "direct"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto direct = function_from_json(Json::parse(r.out)["function"]);
    r = call({"riesz", "--fn", fn, "--alpha", "1", "--method", "fft"});
    const auto fft = function_from_json(Json::parse(r.out)["function"]);
    for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_NEAR(direct[i], fft[i], 1e-10 * direct[i] + 1e-14);

    r = call({"interp", "--fn", fn, "--p0", "1", "--p1", "3", "--eta", "0.4", "--q", "2.5", "--delta", "1.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    j = Json::parse(r.out);
    EXPECT_EQ(j["k_values"].size(), 64u);
    EXPECT_DOUBLE_EQ(j["ratio"].get<double>(), j["interp_norm"].get<double>() / j["direct_norm"].get<double>());
    EXPECT_EQ(call({"maximal", "--fn", fn, "--mu", "2"}).code, 2);
}

TEST(Cli, SelftestPasses)
{
    const auto r = call({"selftest", "--seed", "7"});
    EXPECT_EQ(r.code, 0) << r.out;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["suites"].size(), 5u);
}

TEST(Cli, ListsExperiments)
{
    const auto r = call({"verify", "--list"});
    ASSERT_EQ(r.code, 0);
    const auto j = Json::parse(r.out);
    for (const char* e : {"poincare", "poincare_weak", "poincare_sobolev", "compact_support", "riesz", "maximal",
                          "hedberg", "sharpness_poincare", "sharpness_riesz", "interp"})
        EXPECT_TRUE(j.contains(e)) << e;
}
