#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

namespace fs = std::filesystem;
using pwcli::Json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

// Runs the CLI through the shell with stderr discarded.
RunResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(PWDUAL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {};
    RunResult r;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("pwdual_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small configurations that keep every command fast.
const std::vector<std::pair<std::string, std::string>> kSmoke = {
    {"build", "--set system.M=2 --set system.spinful=true"},
    {"diagonalize", "--set system.M=4"},
    {"trotter-sweep", "--set system.M=2 --set system.spinful=true"},
    {"ffft-check", "--set system.M=4"},
    {"swapnet", "--set system.d=2 --set system.M=4"},
    {"lcu-check", "--set system.M=2 --set system.spinful=true"},
    {"measure", "--set system.M=4"},
    {"vqe-jellium", "--set system.M=4"},
};

}  // namespace

TEST(ApplyOverride, NestedPathsAndTypes) {
    Json cfg = Json::object();
    pwcli::apply_override(cfg, "system.M=8");
    pwcli::apply_override(cfg, "system.spinful=true");
    pwcli::apply_override(cfg, "task.strategy=split");
    pwcli::apply_override(cfg, "task.r=[1,2,4]");
    EXPECT_EQ(cfg["system"]["M"], 8);
    EXPECT_EQ(cfg["system"]["spinful"], true);
    EXPECT_EQ(cfg["task"]["strategy"], "split");
    EXPECT_EQ(cfg["task"]["r"].size(), 3u);
    pwcli::apply_override(cfg, "system.M=2");
    EXPECT_EQ(cfg["system"]["M"], 2);
}

TEST(ApplyOverride, RejectsMalformed) {
    Json cfg = Json::object();
    EXPECT_THROW(pwcli::apply_override(cfg, "noequals"), pwcli::ValidationError);
    EXPECT_THROW(pwcli::apply_override(cfg, "=3"), pwcli::ValidationError);
    EXPECT_THROW(pwcli::apply_override(cfg, "a..b=3"), pwcli::ValidationError);
    pwcli::apply_override(cfg, "a=3");
    EXPECT_THROW(pwcli::apply_override(cfg, "a.b=3"), pwcli::ValidationError);
}

TEST(Section, DefaultsResolveAndUnknownKeysFail) {
    pwcli::Section s(Json{{"M", 4}, {"typo", 1}}, "system");
    EXPECT_EQ(s.integer("M", 2), 4);
    EXPECT_EQ(s.number("omega", 5.0), 5.0);
    s.put("M", 4);
    EXPECT_EQ(s.resolved()["M"], 4);
    EXPECT_THROW(s.finish(), pwcli::ValidationError);
}

TEST(Section, TypeMismatchFails) {
    pwcli::Section s(Json{{"M", "four"}, {"flag", 3}}, "system");
    EXPECT_THROW(s.integer("M"), pwcli::ValidationError);
    EXPECT_THROW(s.boolean("flag"), pwcli::ValidationError);
    EXPECT_THROW(pwcli::Section(Json::array(), "x"), pwcli::ValidationError);
}

TEST(Section, MissingRequiredKeyFails) {
    pwcli::Section s(Json::object(), "task");
    EXPECT_THROW(s.integer("r"), pwcli::ValidationError);
}

TEST(RunCommand, UnknownCommandRejected) {
    EXPECT_THROW(pwcli::run_command("nope", Json::object()), pwcli::ValidationError);
}

TEST(Cli, EveryCommandPassesAndWritesItsReport) {
    for (const auto& [command, args] : kSmoke) {
        TempDir dir;
        const RunResult r = run_cli(command + " " + args + " --out " + dir.str());
        ASSERT_EQ(r.code, 0) << command << "\n" << r.out;
        const Json report = Json::parse(r.out);
        for (const char* key : {"command", "status", "config", "assertions", "results", "files"})
            EXPECT_TRUE(report.contains(key)) << command << " missing " << key;
        EXPECT_EQ(report["command"], command);
        EXPECT_EQ(report["status"], "pass");
        EXPECT_FALSE(report["assertions"].empty()) << command;
        for (const auto& a : report["assertions"]) EXPECT_TRUE(a["passed"].get<bool>()) << command << " " << a["name"];
        EXPECT_EQ(report["config"]["output"]["dir"], dir.str());
        const fs::path written = dir.path() / (command + ".json");
        ASSERT_TRUE(fs::exists(written)) << command;
        EXPECT_EQ(slurp(written), r.out);
        for (const auto& f : report["files"]) EXPECT_TRUE(fs::exists(dir.path() / f.get<std::string>())) << f;
    }
}

TEST(Cli, ConfigFileAndPrecedence) {
    TempDir dir;
    const fs::path cfg = dir.path() / "cfg.json";
    std::ofstream(cfg) << R"({"system": {"M": 4, "omega": 7.5}, "seed": 3, "output": {"dir": "ignored"}})";
    const RunResult r = run_cli("build -c " + cfg.string() + " --set system.omega=6 --seed 9 --out " + dir.str());
    ASSERT_EQ(r.code, 0) << r.out;
    const Json report = Json::parse(r.out);
    EXPECT_EQ(report["config"]["system"]["M"], 4);
    EXPECT_EQ(report["config"]["system"]["omega"], 6.0);
    EXPECT_EQ(report["config"]["seed"], 9);
    EXPECT_EQ(report["config"]["output"]["dir"], dir.str());
    // Resolved defaults are recorded.
    EXPECT_EQ(report["config"]["system"]["d"], 1);
    EXPECT_EQ(report["config"]["system"]["spinful"], false);
}

TEST(Cli, ValidationErrorsExitTwo) {
    TempDir dir;
    for (const std::string& args :
         {std::string("build --set system.M=3"), std::string("build --set system.typo=1"),
          std::string("build --set bogus.key=1"), std::string("measure --set system.eta=99"),
          std::string("build -c /nonexistent/config.json"), std::string("build --set system.d=4"),
          std::string("not-a-command"), std::string("build --no-such-flag")}) {
        const RunResult r = run_cli(args + " --out " + dir.str());
        EXPECT_EQ(r.code, 2) << args;
        if (!r.out.empty() && r.out.front() == '{') {
            const Json rec = Json::parse(r.out);
            EXPECT_EQ(rec["status"], "validation_error") << args;
            EXPECT_EQ(rec["exit_code"], 2);
        }
    }
    const fs::path bad = dir.path() / "bad.json";
    std::ofstream(bad) << "{not json";
    EXPECT_EQ(run_cli("build -c " + bad.string()).code, 2);
}

TEST(Cli, DeterministicAcrossThreadCounts) {
    TempDir dir;
    for (const std::string& command : {std::string("measure"), std::string("vqe-jellium")}) {
        const std::string args = command + " --set system.M=4 --seed 11 --out " + dir.str();
        const RunResult one = run_cli(args, "OMP_NUM_THREADS=1");
        const RunResult many = run_cli(args, "OMP_NUM_THREADS=4");
        ASSERT_EQ(one.code, 0) << command;
        EXPECT_EQ(one.out, many.out) << command;
    }
}

TEST(Cli, SeedChangesSampledResults) {
    TempDir dir;
    const RunResult a = run_cli("measure --set system.M=4 --seed 1 --out " + dir.str());
    const RunResult b = run_cli("measure --set system.M=4 --seed 2 --out " + dir.str());
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_NE(Json::parse(a.out)["results"], Json::parse(b.out)["results"]);
}
