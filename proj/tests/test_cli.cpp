// Drives the ugi executable as a subprocess from inside the test data directory.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ugi/cli.hpp"

namespace {

using Json = ugi::cli::Json;

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        "cd '" UGI_TEST_DATA "' && " + env + (env.empty() ? "" : " ") + "'" UGI_CLI_PATH "' " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json value_of(const Run& r) { return Json::parse(r.out)["value"]; }

TEST(CliEval, ZeroBGivesOne) {
    const auto r = run("eval i1 --a a2.json --b zero2.json");
    ASSERT_EQ(r.code, 0);
    const Json rec = Json::parse(r.out);
    EXPECT_EQ(rec["value"], Json::array({1.0, 0.0}));
    EXPECT_EQ(rec["status"], "ok");
    EXPECT_TRUE(rec["diagnostics"]["confluent_path"].get<bool>());
}

TEST(CliEval, HermitianI3IsReal) {
    const auto r = run("eval i3 --a herm2.json --b diag2.json");
    ASSERT_EQ(r.code, 0);
    const Json rec = Json::parse(r.out);
    EXPECT_LT(std::abs(rec["value"][1].get<double>()), 1e-10);
    EXPECT_EQ(rec["status"], "ok");
}

TEST(CliEval, MatchesGoldenRecord) {
    const auto r = run("eval i1 --a a2.json --b b2.json --nu 1");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, read_file(UGI_TEST_DATA "/golden_eval_i1.json"));
}

TEST(CliEval, RecordKeyOrder) {
    const Json rec = Json::parse(run("eval i1 --a a2.json --b b2.json").out);
    std::vector<std::string> keys;
    for (const auto& [k, v] : rec.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"command", "kind", "args", "inputs", "value", "diagnostics", "status"}));
}

TEST(CliEval, RectangularCarriesConjectureMarker) {
    const auto r = run("eval i2rect --a col.json --b row.json --c col.json --d row.json");
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(Json::parse(r.out)["conjecture"].get<bool>());
}

TEST(CliExitCodes, UsageErrors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("eval i9 --a a2.json --b b2.json").code, 1);
    EXPECT_EQ(run("eval i1 --a a2.json").code, 1);
    EXPECT_EQ(run("eval i1 --a a2.json --b b2.json --bogus").code, 1);
    EXPECT_EQ(run("oracle series i3 --a a2.json --b b2.json").code, 1);
    EXPECT_EQ(run("oracle mc i1 --a a2.json --b b2.json --samples 10").code, 1);
    EXPECT_EQ(run("eval i1 --a a2.json --b b2.json", "UGI_SEED=abc").code, 1);
}

TEST(CliExitCodes, InputErrors) {
    EXPECT_EQ(run("eval i1 --a a2.json --b rect23.json").code, 2);
    EXPECT_EQ(run("verify i1 --a a2.json --b rect23.json --samples 1000").code, 2);
    EXPECT_EQ(run("eval i1 --a malformed.json --b b2.json").code, 2);
    EXPECT_EQ(run("eval i1 --a notjson.json --b b2.json").code, 2);
    EXPECT_EQ(run("eval i1 --a missing.json --b b2.json").code, 2);
}

TEST(CliExitCodes, NumericalFailure) { EXPECT_EQ(run("eval i1 --a big2.json --b big2.json").code, 3); }

TEST(CliOracle, MonteCarloOfConstantIntegrand) {
    const auto r = run("oracle mc i1 --a zero2.json --b zero2.json --samples 1000 --seed 3");
    ASSERT_EQ(r.code, 0);
    const Json rec = Json::parse(r.out);
    EXPECT_EQ(rec["value"], Json::array({1.0, 0.0}));
    EXPECT_EQ(rec["diagnostics"]["stderr"], Json::array({0.0, 0.0}));
    EXPECT_EQ(rec["args"]["seed"], 3);
    EXPECT_EQ(rec["mode"], "mc");
}

TEST(CliOracle, SeriesAtWeightZero) {
    const auto r = run("oracle series i1 --a a2.json --b b2.json --max-weight 0");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(value_of(r), Json::array({1.0, 0.0}));
}

TEST(CliOracle, SameSeedSameRecord) {
    const std::string args = "oracle mc i2 --a a2.json --b b2.json --c b2.json --d a2.json --samples 5000 --seed 11";
    const auto first = run(args), second = run(args);
    ASSERT_EQ(first.code, 0);
    EXPECT_EQ(first.out, second.out);
    EXPECT_NE(first.out, run(args + "1").out);
}

TEST(CliOracle, SeedDefaultsToEnvironment) {
    const std::string args = "oracle mc i1 --a a2.json --b b2.json --samples 2000";
    const auto env = run(args, "UGI_SEED=77");
    ASSERT_EQ(env.code, 0);
    EXPECT_EQ(Json::parse(env.out)["args"]["seed"], 77);
    EXPECT_EQ(env.out, run(args + " --seed 77").out);
    EXPECT_EQ(Json::parse(run(args, "env -u UGI_SEED").out)["args"]["seed"], 0);
}

TEST(CliVerify, RandomI1IsConcordant) {
    const auto r = run("verify i1 --random --n 2 --nu 1 --seed 7 --samples 50000");
    ASSERT_EQ(r.code, 0);
    const Json rec = Json::parse(r.out);
    EXPECT_EQ(rec["status"], "ok");
    EXPECT_LT(rec["diagnostics"]["series"]["relative_error"].get<double>(), 1e-6);
    EXPECT_TRUE(rec["inputs"]["a"]["random"].get<bool>());
}

TEST(CliVerify, RandomRectangularIsConcordantAndMarked) {
    const auto r = run("verify i2rect --random --n 3 --m 2 --seed 7 --samples 50000");
    ASSERT_EQ(r.code, 0);
    const Json rec = Json::parse(r.out);
    EXPECT_EQ(rec["status"], "ok");
    EXPECT_TRUE(rec["conjecture"].get<bool>());
    EXPECT_TRUE(rec["diagnostics"]["series"].is_null());
}

TEST(CliVerify, RepeatableAcrossThreadCounts) {
    const std::string args = "verify i2 --random --n 2 --seed 5 --samples 20000";
    const auto one = run(args + " --threads 1");
    ASSERT_EQ(one.code, 0);
    EXPECT_EQ(one.out, run(args + " --threads 1").out);
    EXPECT_EQ(one.out, run(args + " --threads 4").out);
}

TEST(CliRecords, RoundTripIsByteIdentical) {
    for (const std::string args : {"eval i1 --a a2.json --b b2.json --nu 2", "eval i3 --a a2.json --b b2.json",
                                   "oracle series i2 --a a2.json --b b2.json --c a2.json --d b2.json",
                                   "verify i3 --random --n 3 --seed 2 --samples 2000"}) {
        const auto r = run(args);
        ASSERT_EQ(r.code, 0) << args;
        EXPECT_EQ(ugi::cli::render(Json::parse(r.out)), r.out) << args;
    }
}

TEST(CliRecords, OutFileMatchesStdout) {
    const auto path = std::filesystem::temp_directory_path() / "ugi_cli_out_test.json";
    std::filesystem::remove(path);
    const auto r = run("eval i1 --a a2.json --b b2.json --out '" + path.string() + "'");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(read_file(path.string()), r.out);
    std::filesystem::remove(path);
}

TEST(MatrixFile, ParsesAndRoundTrips) {
    const Json j = Json::parse(R"({"rows": 1, "cols": 2, "data": [[[1.5, -2], [0, 0.25]]]})");
    const auto m = ugi::cli::matrix_from_json(j);
    EXPECT_EQ(m(0, 0), ugi::cplx(1.5, -2.0));
    EXPECT_EQ(m(0, 1), ugi::cplx(0.0, 0.25));
    EXPECT_EQ(ugi::cli::matrix_from_json(ugi::cli::matrix_to_json(m)), m);
}

TEST(MatrixFile, RejectsMalformed) {
    for (const char* text : {R"({"rows": 1, "cols": 1})", R"({"rows": 0, "cols": 1, "data": []})",
                             R"({"rows": 1, "cols": 1, "data": [[[1]]]})", R"({"rows": 1, "cols": 1, "data": [[["a", 0]]]})",
                             R"({"rows": 1, "cols": 2, "data": [[[1, 0]]]})", R"({"rows": -1, "cols": 1, "data": []})"})
        EXPECT_THROW(ugi::cli::matrix_from_json(Json::parse(text)), ugi::InputError) << text;
}

TEST(MatrixFile, DigestDependsOnContent) {
    const ugi::ComplexMatrix a{{1.0, 2.0}}, b{{1.0, 2.5}};
    EXPECT_EQ(ugi::cli::matrix_digest(a), ugi::cli::matrix_digest(ugi::ComplexMatrix{{1.0, 2.0}}));
    EXPECT_NE(ugi::cli::matrix_digest(a), ugi::cli::matrix_digest(b));
    EXPECT_EQ(ugi::cli::matrix_digest(a).rfind("fnv1a64:", 0), 0u);
}

} // namespace
