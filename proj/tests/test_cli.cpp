#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "aag/cli.hpp"
#include "support.hpp"

using namespace aag;
using namespace aag::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "aag");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string example() { return fixture("two_factor_example.json").string(); }

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("aag-cli-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, ScoreAccessibilityPrintsBareValue) {
  auto r = run({"score", example(), "--account", "acct", "--accessibility"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2\n");
  EXPECT_EQ(run({"score", example(), "--legacy"}).out, "3/2 (1.5)\n");
  EXPECT_EQ(run({"score", example(), "--security"}).out, "medium\n");
}

TEST(Cli, ScoreJsonIncludesReducedTerm) {
  auto r = run({"--json", "score", example(), "--account", "acct", "--accessibility"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["accessibility"]["score"], "2");
  EXPECT_EQ(j["accessibility"]["reduced_term"], Json::parse(R"([["memory", "tablet"], ["phone"]])"));
  EXPECT_FALSE(j.contains("legacy"));
  // Options are accepted after the subcommand too.
  EXPECT_EQ(run({"score", example(), "--accessibility", "--json"}).out, r.out);
}

TEST(Cli, JsonIsByteDeterministic) {
  for (auto cmd : {"score", "explain"}) {
    auto a = run({"--json", cmd, example()});
    auto b = run({"--json", cmd, example()});
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
  }
}

TEST(Cli, HumanAndJsonNumbersAgree) {
  auto human = run({"score", example()});
  auto json = Json::parse(run({"--json", "score", example()}).out);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(human.out, m, std::regex("accessibility: ([0-9/]+)")));
  EXPECT_EQ(m[1].str(), json["accessibility"]["score"]);
  ASSERT_TRUE(std::regex_search(human.out, m, std::regex(R"(legacy \(reconstructed\): ([0-9/]+))")));
  EXPECT_EQ(m[1].str(), json["legacy"]["score"]);
  ASSERT_TRUE(std::regex_search(human.out, m, std::regex("security: ([a-z]+)")));
  EXPECT_EQ(m[1].str(), json["security"]);
}

TEST(Cli, Explain) {
  auto r = run({"explain", example(), "--account", "acct"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "term: (Memory ∧ Tablet) ∨ Phone\n"
            "accessibility: 2 [yellow]\n"
            "lockout sets:\n"
            "  {Phone, Tablet}\n"
            "  {Phone, Memory}\n"
            "Access to Account might be lost when losing both Phone and Tablet, or losing your Phone and "
            "forgetting your password\n");
}

TEST(Cli, WhatIf) {
  auto r = run({"what-if", example(), "--account", "acct", "--lose", "phone,tablet"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "inaccessible\n");
  r = run({"what-if", example(), "--lose", "phone"});
  EXPECT_EQ(r.out, "accessible\naccessibility: 1 [red]\n");
  r = run({"what-if", example(), "--lose", "toaster"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("UnknownAccessMethod"), std::string::npos);
}

TEST(Cli, ValidateReportsErrors) {
  auto dir = temp_dir("validate");
  auto bad = dir / "dup.json";
  std::ofstream(bad) << R"({"nodes": [{"id": "a", "kind": "account"}, {"id": "a", "kind": "account"}],
                           "edges": [], "roots": ["a"]})";
  auto r = run({"validate", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("DuplicateNodeId"), std::string::npos);
  auto j = Json::parse(run({"--json", "validate", bad.string()}).out);
  EXPECT_EQ(j["valid"], false);
  EXPECT_EQ(j["error"]["code"], "DuplicateNodeId");

  r = run({"validate", example()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "valid: 9 nodes, 9 edges, 1 root\n");

  r = run({"validate", (dir / "missing.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.json"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"score"}).code, 2);
  EXPECT_EQ(run({"what-if", example()}).code, 2);
  EXPECT_EQ(run({"--unmapped", "maybe", "score", example()}).code, 2);
  EXPECT_EQ(run({"validate", example(), example()}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, PolicyFileAndEnvironment) {
  auto dir = temp_dir("policy");
  auto policy = dir / "policy.json";
  std::ofstream(policy) << R"({"overrides": {"sms": "low"}})";
  EXPECT_EQ(run({"--policy", policy.string(), "score", example(), "--security"}).out, "low\n");
  ::setenv("AAG_SCORING_POLICY", policy.string().c_str(), 1);
  EXPECT_EQ(run({"score", example(), "--security"}).out, "low\n");
  ::unsetenv("AAG_SCORING_POLICY");
  EXPECT_EQ(run({"score", example(), "--security"}).out, "medium\n");

  std::ofstream(policy) << R"({"overrides": {"phone": "high"}})";
  auto r = run({"--policy", policy.string(), "score", example()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("InvalidPolicy"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ConvertAndBatch) {
  auto dir = temp_dir("survey");
  auto r = run({"convert", "--survey", fixture("cohort_small.csv").string(), "--out", (dir / "graphs").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto id : {"alice", "bob", "carol"}) {
    auto path = dir / "graphs" / (std::string(id) + ".json");
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(run({"validate", path.string()}).code, 0);
  }
  EXPECT_EQ(run({"score", (dir / "graphs" / "alice.json").string(), "--accessibility"}).out, "1\n");

  auto report = dir / "report.json";
  r = run({"batch", "--survey", fixture("cohort_small.csv").string(), "--report", report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(read_file(report));
  EXPECT_EQ(j["users"].size(), 3u);
  EXPECT_EQ(j["aggregates"]["google"]["accessibility_histogram"], Json::parse(R"({"1": 1, "2": 1})"));
  EXPECT_EQ(j["aggregates"]["apple"]["security_histogram"], Json::parse(R"({"low": 0, "medium": 1, "high": 0})"));

  auto stdout_report = run({"--json", "--threads", "3", "batch", "--survey", fixture("cohort_small.csv").string()});
  EXPECT_EQ(stdout_report.out, read_file(report));
  std::filesystem::remove_all(dir);
}

TEST(Cli, BatchReportsRowErrorsWithFileRows) {
  auto dir = temp_dir("rows");
  auto csv = dir / "s.csv";
  std::ofstream(csv) << "provider,device_1_category,pw_memory,mfa_enabled,prompts_devices\n"
                        "google,phone,1,1,1\n"
                        "google,phone,0,0,\n"
                        "google,phone,1,0,\n";
  auto r = run({"--json", "batch", "--survey", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["users"].size(), 2u);
  ASSERT_EQ(j["errors"].size(), 1u);
  EXPECT_EQ(j["errors"][0]["row"], 2);
  EXPECT_EQ(j["errors"][0]["code"], "InvalidRecord");
  std::filesystem::remove_all(dir);
}
