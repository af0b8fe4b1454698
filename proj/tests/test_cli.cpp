#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "pucci_forge/cli.hpp"

using namespace pucci;

namespace {

RunConfig parse_ok(const std::vector<std::string>& args) {
  const auto r = parse_command_line(args);
  EXPECT_TRUE(r.config.has_value()) << r.message;
  return r.config.value_or(RunConfig{});
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pucci_forge_cli_" + name)).string();
}

}  // namespace

TEST(ParseCommandLine, DefaultsAndFlags) {
  const auto cfg = parse_ok({"ratio-campaign", "--candidate", "cand3", "--starts", "4", "--seed", "0x10"});
  EXPECT_EQ(cfg.command, "ratio-campaign");
  EXPECT_EQ(cfg.candidate.value(), "cand3");
  EXPECT_EQ(cfg.campaign.starts, 4);
  EXPECT_EQ(cfg.campaign.iters_per_start, 20000);
  EXPECT_EQ(cfg.campaign.rng_seed, 16u);
  EXPECT_EQ(parse_ok({"fd-check"}).campaign.rng_seed, 0x5EED5EEDu);
}

TEST(ParseCommandLine, UsageErrors) {
  EXPECT_EQ(parse_command_line({"frobnicate"}).exit_code, kExitUsage);
  EXPECT_EQ(parse_command_line({"fd-check", "--bogus", "1"}).exit_code, kExitUsage);
  EXPECT_EQ(parse_command_line({"fd-check", "--starts", "many"}).exit_code, kExitUsage);
  const auto help = parse_command_line({"--help"});
  EXPECT_FALSE(help.config.has_value());
  EXPECT_EQ(help.exit_code, kExitPass);
  EXPECT_NE(help.message.find("0x5EED5EED"), std::string::npos);
}

TEST(ParseCommandLine, ConfigFilePrecedence) {
  const auto path = temp_path("config.json");
  {
    std::ofstream out(path);
    out << R"({"command": "ratio-campaign", "candidate": "cand2", "starts": 7, "iters": 50, "seed": "0x2A"})";
  }
  const auto cfg = parse_ok({"--config", path, "--starts", "3"});
  EXPECT_EQ(cfg.command, "ratio-campaign");
  EXPECT_EQ(cfg.candidate.value(), "cand2");
  EXPECT_EQ(cfg.campaign.starts, 3);
  EXPECT_EQ(cfg.campaign.iters_per_start, 50);
  EXPECT_EQ(cfg.campaign.rng_seed, 42u);
  {
    std::ofstream out(path);
    out << R"({"command": "fd-check", "strats": 7})";
  }
  const auto bad = parse_command_line({"--config", path});
  EXPECT_EQ(bad.exit_code, kExitUsage);
  EXPECT_NE(bad.message.find("strats"), std::string::npos);
  {
    std::ofstream out(path);
    out << R"({"command": "fd-check", "iters": "lots"})";
  }
  const auto typed = parse_command_line({"--config", path});
  EXPECT_EQ(typed.exit_code, kExitUsage);
  EXPECT_NE(typed.message.find("iters"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(ConfigJson, RoundTrip) {
  auto cfg = parse_ok({"reconstruct-f", "--candidate", "cand3", "--samples", "500", "--lambda", "0.1", "--Lambda",
                       "10", "--trials", "5"});
  const auto back = config_from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
}

TEST(RunExitCodes, VerifyMeasurable) {
  auto cfg = parse_ok({"verify-measurable", "--alpha", "1", "--auto-window"});
  auto r = run(cfg);
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_TRUE(r.report["results"]["window"].is_object());
  EXPECT_EQ(r.report["exit_code"], 0);
  EXPECT_EQ(run(parse_ok({"verify-measurable", "--alpha", "2", "--lambda", "0.5", "--Lambda", "1"})).exit_code,
            kExitViolation);
  EXPECT_EQ(run(parse_ok({"verify-measurable", "--alpha", "2"})).exit_code, kExitUsage);
  EXPECT_EQ(run(parse_ok({"verify-measurable", "--alpha", "5", "--auto-window"})).exit_code, kExitUsage);
}

TEST(RunExitCodes, ScanSurface) {
  const auto r = run(parse_ok({"scan-surface", "--alpha", "3", "--grid-n", "1000"}));
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_TRUE(r.report["results"]["admissible_window"].is_object());
}

TEST(RunExitCodes, Campaigns) {
  EXPECT_EQ(run(parse_ok({"ratio-campaign", "--candidate", "cand3", "--starts", "2", "--iters", "300"})).exit_code,
            kExitPass);
  const auto seeded = run(parse_ok({"seeded-campaign", "--candidate", "cand1", "--starts", "2", "--iters", "10000"}));
  EXPECT_EQ(seeded.exit_code, kExitViolation);
  EXPECT_GT(seeded.report["results"]["diverged_starts"].get<int>(), 0);
  EXPECT_EQ(run(parse_ok({"ratio-campaign", "--candidate", "cand1", "--seeded", "--starts", "2", "--iters", "10000"}))
                .exit_code,
            kExitViolation);
  EXPECT_EQ(run(parse_ok({"ratio-campaign"})).exit_code, kExitUsage);
  EXPECT_EQ(run(parse_ok({"seeded-campaign", "--candidate", "cand3", "--starts", "1"})).exit_code, kExitUsage);
  EXPECT_EQ(run(parse_ok({"ratio-campaign", "--candidate", "measurable2d", "--starts", "1"})).exit_code, kExitUsage);
  EXPECT_EQ(run(parse_ok({"ratio-campaign", "--candidate", "cand3", "--starts", "0"})).exit_code, kExitUsage);
}

TEST(RunExitCodes, TraceCsv) {
  const auto path = temp_path("trace.csv");
  const auto r = run(parse_ok({"ratio-campaign", "--candidate", "nvt", "--starts", "2", "--iters", "25", "--trace", path}));
  EXPECT_EQ(r.exit_code, kExitPass);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "start,iter,ratio,objective,coords");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 50);
  std::filesystem::remove(path);
}

TEST(RunExitCodes, FdCheck) {
  const auto r = run(parse_ok({"fd-check", "--candidate", "cand3", "--points", "1000"}));
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_LE(r.report["results"]["max_relative_error"].get<double>(), 1e-6);
  EXPECT_EQ(run(parse_ok({"fd-check", "--candidate", "cand3", "--h", "0.01"})).exit_code, kExitViolation);
  EXPECT_EQ(run(parse_ok({"fd-check"})).exit_code, kExitUsage);
}

TEST(RunExitCodes, ReconstructF) {
  const auto r = run(parse_ok({"reconstruct-f", "--candidate", "cand3", "--samples", "2000", "--trials", "50"}));
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_LE(json_real(r.report["results"]["equation_residual"]["max"]), kResidualTolerance);
  EXPECT_TRUE(r.report["results"]["time_boundary_included"].get<bool>());
  EXPECT_EQ(run(parse_ok({"reconstruct-f", "--candidate", "cand3", "--samples", "1"})).exit_code, kExitUsage);
}

TEST(Report, RegeneratingFromEmbeddedConfigReproducesResults) {
  const auto path = temp_path("report.json");
  ASSERT_EQ(main_entry({"ratio-campaign", "--candidate", "cand2", "--starts", "3", "--iters", "200", "--out", path}),
            kExitPass);
  Json first;
  {
    std::ifstream in(path);
    first = Json::parse(in);
  }
  const auto again = run(config_from_json(first["config"]));
  EXPECT_EQ(again.report["results"], first["results"]);
  EXPECT_EQ(again.report["config"], first["config"]);
  EXPECT_EQ(first["tool_version"], kToolVersion);
  std::filesystem::remove(path);
}
