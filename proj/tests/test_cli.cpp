#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(WEAKNET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmall =
    "--deterministic --ratios 0.3,0.6 --repeats 2 --doc-epochs 3 --infer-epochs 5 --score-epochs 3 "
    "--walks-per-node 3 --walk-length 10 --dim 8 --line-samples 20000";

}  // namespace

TEST(Cli, HelpExitsZero) {
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run("score --help"), 0);
}

TEST(Cli, MissingInputExitsTwo) {
    const auto dir = fresh_dir("weaknet_cli_missing");
    EXPECT_EQ(run("--out " + dir.string() + " score"), 2);
    EXPECT_EQ(run("--out " + dir.string() + " --config " + (dir / "absent.ini").string() + " stats"), 2);
    ASSERT_EQ(run("--out " + dir.string() + " --users 30 synth"), 0);
    fs::remove(dir / "context.txt");
    EXPECT_EQ(run("--out " + dir.string() + " pipeline"), 2);
    EXPECT_FALSE(fs::exists(dir / "scores.tsv"));
}

TEST(Cli, BadConfigExitsThree) {
    const auto dir = fresh_dir("weaknet_cli_badcfg");
    std::ofstream(dir / "bad.ini") << "no_such_key = 3\n";
    EXPECT_EQ(run("--out " + dir.string() + " --config " + (dir / "bad.ini").string() + " synth"), 3);
    EXPECT_FALSE(fs::exists(dir / "posts.jsonl"));
}

TEST(Cli, FlagsOverrideConfig) {
    const auto dir = fresh_dir("weaknet_cli_override");
    std::ofstream(dir / "run.ini") << "users = 40\nseed = 2\n";
    const auto cfg = " --config " + (dir / "run.ini").string();
    ASSERT_EQ(run("--out " + (dir / "a").string() + cfg + " synth"), 0);
    ASSERT_EQ(run("--out " + (dir / "b").string() + cfg + " --users 60 synth"), 0);
    const auto users = [](const fs::path& planted) {
        std::ifstream in(planted);
        std::string line;
        int n = 0;
        while (std::getline(in, line)) n += !line.empty() && line[0] != '#' && line.rfind("user", 0) != 0;
        return n;
    };
    EXPECT_EQ(users(dir / "a" / "planted.tsv"), 40);
    EXPECT_EQ(users(dir / "b" / "planted.tsv"), 60);
}

TEST(Cli, SynthThenPipelineFillsTheReport) {
    const auto dir = fresh_dir("weaknet_cli_pipeline");
    ASSERT_EQ(run("--out " + dir.string() + " --seed 4 --users 120 synth"), 0);
    ASSERT_EQ(run("--out " + dir.string() + " " + kSmall + " pipeline"), 0);
    for (const char* f : {"scores.tsv", "labels.tsv", "walks.txt", "embeddings.bin", "classify.csv", "report.csv",
                          "report.json", "graph/manifest.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const auto report = slurp(dir / "report.csv");
    EXPECT_NE(report.find("method_type,algorithm,merge_type,0.3,0.6"), std::string::npos);
    EXPECT_EQ(report.find(",,"), std::string::npos);
    EXPECT_EQ(report.rfind("# weaknet", 0), 0U);
}

TEST(Cli, InduceOnLabeledDropsSilentUsers) {
    const auto dir = fresh_dir("weaknet_cli_induce");
    const auto d = "--out " + dir.string();
    ASSERT_EQ(run(d + " --users 60 synth"), 0);
    std::string kept;
    {
        std::ifstream in(dir / "posts.jsonl");
        for (std::string line; std::getline(in, line);) {
            if (line.find("\"author\":\"u0003\"") == std::string::npos) kept += line + "\n";
        }
    }
    std::ofstream(dir / "posts.jsonl") << kept;
    ASSERT_EQ(run(d + " --doc-epochs 2 --infer-epochs 3 --score-epochs 2 score"), 0);
    ASSERT_EQ(run(d + " graph"), 0);
    EXPECT_NE(slurp(dir / "graph" / "nodes.txt").find("u0003"), std::string::npos);
    ASSERT_EQ(run(d + " --induce-on-labeled graph"), 0);
    EXPECT_EQ(slurp(dir / "graph" / "nodes.txt").find("u0003"), std::string::npos);
    EXPECT_EQ(slurp(dir / "labels.tsv").find("u0003"), std::string::npos);
}
