// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>

#include "diffsense/io.hpp"
#include "unit/test_util.hpp"

using namespace diffsense;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
  std::string cmd = std::string(DIFFSENSE_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (std::string(DIFFSENSE_CLI).empty()) GTEST_SKIP() << "CLI not built";
    corpus_ = dir_.path() / "corpus";
    ASSERT_EQ(run("gen-corpus -o " + corpus_.string() + " --projects 1 --versions 2").code, 0);
    config_ = dir_.path() / "mock.toml";
    write_text_file(config_, "[backend]\nkind = \"mock\"\n");
  }

  std::string artifact(const std::string& variant) const {
    return (corpus_ / ("tinyhttpd-1.0.0-1.1.0-" + variant + ".json")).string();
  }

  test::TempDir dir_{"cli"};
  fs::path corpus_, config_;
};

}  // namespace

TEST_F(Cli, ScoreCommand) {
  auto r = run("score B:M/C:L");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("FSS: 3.2"), std::string::npos);
  EXPECT_NE(r.output.find("S: 0.350000"), std::string::npos);
  EXPECT_NE(run("score FSS:1/B:H/R:H/C:H/I:H/A:H").output.find("FSS: 10.0"), std::string::npos);
  EXPECT_NE(run("score B:N/R:N/C:N/I:N/A:N").output.find("FSS: 0.0"), std::string::npos);
  EXPECT_EQ(run("score B:Q").code, 1);
}

TEST_F(Cli, AnalyzeExitCodes) {
  auto out = dir_.path() / "run-mal";
  auto mal = run("analyze " + artifact("injected") + " -c " + config_.string() + " -o " +
                 out.string());
  EXPECT_EQ(mal.code, 2) << mal.output;
  for (const char* f : {"report.json", "report.md", "run.json", "verdict.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_TRUE(fs::is_directory(out / "analyses"));
  EXPECT_TRUE(fs::is_directory(out / "prompts"));

  auto clean = run("analyze " + artifact("clean") + " -c " + config_.string() + " -o " +
                   (dir_.path() / "run-clean").string());
  EXPECT_EQ(clean.code, 0) << clean.output;
}

TEST_F(Cli, UnknownVerdictExitCode) {
  auto cfg = dir_.path() / "undecided.toml";
  write_text_file(cfg, "[backend]\nverdict_reply = \"cannot decide\"\n");
  auto r = run("analyze " + artifact("injected") + " -c " + cfg.string() + " -o " +
               (dir_.path() / "run-u").string());
  EXPECT_EQ(r.code, 3) << r.output;
}

TEST_F(Cli, MissingConfigPrintsUsage) {
  auto r = run("analyze " + artifact("clean"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("Usage"), std::string::npos);
  auto absent = run("analyze " + artifact("clean") + " -c " + (dir_.path() / "nope.toml").string());
  EXPECT_EQ(absent.code, 1);
  EXPECT_NE(absent.output.find("Usage"), std::string::npos);
}

TEST_F(Cli, ErrorsExitOne) {
  EXPECT_EQ(run("analyze " + (dir_.path() / "missing.json").string() + " -c " + config_.string())
                .code,
            1);
  auto bad = dir_.path() / "bad.toml";
  write_text_file(bad, "[predictor]\nk = 0\n");
  auto r = run("evaluate " + (corpus_ / "manifest.json").string() + " -c " + bad.string() +
               " -o " + (dir_.path() / "ev").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("k must be at least 1"), std::string::npos);
  EXPECT_EQ(run("no-such-command").code, 1);
}

TEST_F(Cli, FlagsOverrideConfig) {
  auto out = dir_.path() / "run-k";
  EXPECT_EQ(run("analyze " + artifact("injected") + " -c " + config_.string() + " -o " +
                out.string() + " -k 2 --changelog")
                .code,
            2);
  auto report = read_text_file(out / "report.json");
  EXPECT_NE(report.find("\"k\": 2"), std::string::npos);
  EXPECT_NE(report.find("\"changelog\": true"), std::string::npos);
}

TEST_F(Cli, EvaluateWritesReports) {
  auto out = dir_.path() / "ev";
  auto r = run("evaluate " + (corpus_ / "manifest.json").string() + " -c " + config_.string() +
               " -o " + out.string());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out / "evaluation.json"));
  EXPECT_TRUE(fs::exists(out / "evaluation.md"));
  EXPECT_NE(r.output.find("| Program | k=5 | k=5, changelog | k=10 | k=10, changelog |"),
            std::string::npos);
}

TEST_F(Cli, GraphDump) {
  auto r = run("graph-dump " + artifact("injected"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.output.rfind("digraph", 0), 0u);
  EXPECT_NE(r.output.find("mod_"), std::string::npos);
}
