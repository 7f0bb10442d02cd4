#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(LCG_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / "lcg_cli_test";
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        write("g.json", R"({"variant": "gaussian", "dim": 2})");
        write("sq.json", R"({"variant": "pla", "dim": 2, "constraints": [1, 0, -1, 0, 0, 1, 0, -1], "bounds": [1, 1, 1, 1]})");
        write("big.json", R"({"builtin": "cube", "dim": 2, "affine": {"linear": [2, 0, 0, 2]}})");
        write("ok.json", R"({"seed": 42, "budget": {"samples": 2000, "frames": 8},
            "functions": {"g": {"variant": "gaussian", "dim": 2}},
            "tasks": [{"check": "sobolev", "f1": "g"}, {"compute": "norm", "f": "g", "p": 2}]})");
        write("t9.json", R"({"seed": 42, "tasks": [{"check": "t9"}]})");
        write("broken.json", "{\"seed\": 42,");
    }
    void TearDown() override { fs::remove_all(dir_); }

    void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, Validate) {
    EXPECT_EQ(cli("validate " + path("ok.json")).code, 0);
    EXPECT_EQ(cli("validate " + path("t9.json")).code, 2);
    EXPECT_EQ(cli("validate " + path("broken.json")).code, 2);
    EXPECT_EQ(cli("validate " + path("missing.json")).code, 2);
}

TEST_F(Cli, RunWritesReports) {
    const Result r = cli("run " + path("ok.json") + " --jobs 2 --out " + path("runs"));
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(dir_ / "runs" / "run-001" / "summary.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "runs" / "run-001" / "report.json"));
    EXPECT_TRUE(fs::exists(dir_ / "runs" / "run-001" / "values.csv"));
    EXPECT_EQ(cli("run " + path("t9.json") + " --out " + path("runs")).code, 2);
    EXPECT_FALSE(fs::exists(dir_ / "runs" / "run-002"));
}

TEST_F(Cli, Compute) {
    const Result r = cli("compute quermassintegral --fn " + path("g.json") + " --j 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("quermassintegral,f,2,j=1,3.937"), std::string::npos) << r.out;
    EXPECT_EQ(cli("compute norm --fn " + path("g.json") + " --p inf").code, 0);
    EXPECT_EQ(cli("compute volume --fn " + path("g.json")).code, 2);
    EXPECT_EQ(cli("compute quermassintegral --fn " + path("g.json") + " --j 5").code, 2);
    EXPECT_EQ(cli("compute norm --fn " + path("broken.json")).code, 2);
}

TEST_F(Cli, Check) {
    const Result ok = cli("check t3 --f1 " + path("g.json") + " --f2 " + path("g.json") + " --k 1");
    EXPECT_EQ(ok.code, 0);
    EXPECT_NE(ok.out.find("t3,2,1,1.77245385"), std::string::npos) << ok.out;
    EXPECT_NE(ok.out.find(",pass,42,"), std::string::npos);
    // hypothesis not satisfied: the row cannot be checked
    const Result bad = cli("check t2 --f1 " + path("big.json") + " --f2 " + path("sq.json") + " --k 1 --frames 8");
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("t2,2,1,nan,nan,nan,nan,error"), std::string::npos);
    EXPECT_EQ(cli("check b_bound --n 6 --k 2").code, 0);
    EXPECT_EQ(cli("check t9").code, 2);
    EXPECT_EQ(cli("check sobolev").code, 2);
    EXPECT_NE(cli("check omega_ratio --n 4 --k 1 --json").out.find("\"verdict\": \"pass\""), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("run").code, 2);
    EXPECT_EQ(cli("--help").code, 0);
}
