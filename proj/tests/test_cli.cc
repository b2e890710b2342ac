#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded; returns its exit status and stdout.
CliResult run(const std::string& args) {
  std::string cmd = std::string(MILDKIT_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mildkit_cli_" + std::to_string(getpid()) + "_" + name);
}

TEST(Cli, CertifyPassesWithEnvelope) {
  CliResult r = run("certify --function p_alpha --alpha 1 --nmax 8 --grid 128 --deterministic");
  ASSERT_EQ(r.code, 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["tool"], "mildkit");
  EXPECT_EQ(j["command"], "certify");
  EXPECT_EQ(j["pass"], true);
  EXPECT_FALSE(j.contains("timestamp"));
  EXPECT_EQ(j["result"]["cert"]["A_exact"], "6");
  EXPECT_EQ(j["result"]["cert"]["B_exact"], "e");
  EXPECT_EQ(j["result"]["orders"].size(), 9u);
}

TEST(Cli, FalseCertificateExitsOne) {
  CliResult r = run("certify --function p_alpha --alpha 1 --nmax 4 --grid 128 --cert A=1,B=1,C=0");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.out)["pass"], false);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("certify --alpha 1.5").code, 2);
  EXPECT_EQ(run("certify --no-such-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("fit --function nope").code, 2);
  EXPECT_EQ(run("certify --prec 32").code, 2);
  EXPECT_EQ(run("check-lemmas --kmax 3 --format csv").code, 2);
}

TEST(Cli, DeterministicOutputIsByteIdentical) {
  const std::string args = "fit --function p_alpha --alpha 2 --nmax 6 --grid 64 --deterministic";
  CliResult a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  CliResult t = run("fit --function p_alpha --alpha 2 --nmax 6 --grid 64");
  EXPECT_TRUE(nlohmann::json::parse(t.out).contains("timestamp"));
}

TEST(Cli, CsvMarginRows) {
  CliResult r = run("certify --function p_alpha --alpha 1 --nmax 3 --grid 64 --csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("alpha,epsilon,chart_id,component,nu,sup,bound,margin\n", 0), 0u);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 5u);
}

TEST(Cli, DeriveFaaSchema) {
  CliResult r = run("derive --faa --nu 2,0 --lambda 1 --deterministic");
  ASSERT_EQ(r.code, 0);
  nlohmann::json res = nlohmann::json::parse(r.out)["result"];
  EXPECT_EQ(res["nu"], nlohmann::json::array({2, 0}));
  ASSERT_EQ(res["tuples"].size(), 1u);
  for (const char* key : {"s", "ks", "ls", "coeff"}) EXPECT_TRUE(res["tuples"][0].contains(key)) << key;
}

TEST(Cli, DeriveEvaluates) {
  CliResult r = run("derive --function p_alpha --alpha 1 --nu 1 --at 1/2 --deterministic");
  ASSERT_EQ(r.code, 0);
  nlohmann::json res = nlohmann::json::parse(r.out)["result"];
  EXPECT_NEAR(std::stod(res["value"].get<std::string>()), 4.0 / std::exp(1.0), 1e-15);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  auto cfg = temp_file("cfg.ini");
  {
    std::ofstream f(cfg);
    f << "alpha=2\nnmax=3\ngrid=64\ndeterministic=true\n";
  }
  CliResult from_file = run("--config " + cfg.string() + " fit --function p_alpha");
  ASSERT_EQ(from_file.code, 0);
  nlohmann::json j = nlohmann::json::parse(from_file.out);
  EXPECT_EQ(j["params"]["alpha"], "2/1");
  CliResult overridden = run("--config " + cfg.string() + " fit --function p_alpha --alpha 1");
  ASSERT_EQ(overridden.code, 0);
  EXPECT_EQ(nlohmann::json::parse(overridden.out)["params"]["alpha"], "1/1");
  std::filesystem::remove(cfg);
}

TEST(Cli, OutputFile) {
  auto out = temp_file("out.json");
  CliResult r = run("gf-check --nmax 4 --deterministic --output " + out.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(out);
  nlohmann::json j = nlohmann::json::parse(f);
  EXPECT_EQ(j["pass"], true);
  std::filesystem::remove(out);
}

}  // namespace
