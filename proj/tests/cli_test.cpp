#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "weylcheck/report.hpp"

namespace {

struct Outcome {
  int exit_code = -1;
  std::string out;
};

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(WEYLCHECK_CLI) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 4096> buf{};
  while (const std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) o.out.append(buf.data(), got);
  const int status = pclose(pipe);
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("weylcheck_cli_test_" + name);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json dump_json(const std::string& args) {
  const Outcome o = run_cli("tensor-dump --format structured " + args);
  EXPECT_EQ(o.exit_code, 0) << args;
  return nlohmann::json::parse(o.out);
}

}  // namespace

TEST(Cli, ModelsListShowsCatalogWithClasses) {
  const Outcome o = run_cli("models-list");
  EXPECT_EQ(o.exit_code, 0);
  for (const char* name :
       {"minkowski", "rw_flat", "grw_product_spheres", "twisted_generic", "twisted_n4", "non_twisted_perturbed"})
    EXPECT_NE(o.out.find(name), std::string::npos) << name;
  EXPECT_NE(o.out.find("[non_twisted]"), std::string::npos);
  EXPECT_NE(o.out.find("[grw]"), std::string::npos);
}

TEST(Cli, UnknownOrMissingSubcommandIsUsageError) {
  EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
  EXPECT_EQ(run_cli("").exit_code, 2);
  EXPECT_EQ(run_cli("verify --no-such-flag").exit_code, 2);
}

TEST(Cli, HelpExitsCleanly) { EXPECT_EQ(run_cli("--help").exit_code, 0); }

TEST(Cli, ExpansionOfFlatRobertsonWalker) {
  const Outcome o = run_cli("tensor-dump --model rw_flat --param H=0.3 --point 1,0,0,0 --field phi");
  ASSERT_EQ(o.exit_code, 0);
  const std::string last = o.out.substr(o.out.rfind('\n', o.out.size() - 2) + 1);
  EXPECT_NEAR(std::stod(last), 0.3, 1e-15);
}

TEST(Cli, DumpedWeylContractsToElectricPart) {
  // C_jklm u^m = u_k E_jl - u_j E_kl, with u^m = (1, 0, 0, 0).
  const std::string common = "--model twisted_n4 --point 0.5,0.3,0.7,0.2 --field ";
  const auto c = dump_json(common + "weyl").at("components").get<std::vector<double>>();
  const auto e = dump_json(common + "electric").at("components").get<std::vector<double>>();
  const auto u = dump_json(common + "u_down").at("components").get<std::vector<double>>();
  ASSERT_EQ(c.size(), 256u);
  double worst = 0.0, size = 0.0;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) {
        const double cu = c[static_cast<std::size_t>(((j * 4 + k) * 4 + l) * 4 + 0)];
        const double rhs = u[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(j * 4 + l)] -
                           u[static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(k * 4 + l)];
        worst = std::max(worst, std::abs(cu - rhs));
        size = std::max(size, std::abs(cu));
      }
  EXPECT_GT(size, 1e-3);
  EXPECT_LT(worst, 1e-12);
}

TEST(Cli, TensorDumpRejectsBadInput) {
  EXPECT_EQ(run_cli("tensor-dump --model twisted_n4 --point 0.5,0.3 --field weyl").exit_code, 2);
  EXPECT_EQ(run_cli("tensor-dump --model twisted_n4 --point 0.5,0.3,0.7,0.2 --field torsion").exit_code, 2);
  EXPECT_EQ(run_cli("tensor-dump --model kerr --point 0.5,0.3,0.7,0.2").exit_code, 2);
  EXPECT_EQ(run_cli("tensor-dump --model rw_flat --param H --point 1,0,0,0").exit_code, 2);
}

TEST(Cli, VerifyIsDeterministicAndRoundTrips) {
  const auto a = temp_file("a.json");
  const auto b = temp_file("b.json");
  ASSERT_EQ(run_cli("verify --points 5 --seed 42 --format structured --output " + a.string()).exit_code, 0);
  ASSERT_EQ(run_cli("verify --points 5 --seed 42 --format structured --output " + b.string()).exit_code, 0);
  const std::string text = read_file(a);
  EXPECT_EQ(text, read_file(b));
  EXPECT_EQ(weylcheck::to_structured(weylcheck::parse_structured(text)), text);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, ModelFilterAndToleranceOverride) {
  const Outcome o = run_cli("verify --points 3 --model twisted_generic --format structured");
  ASSERT_EQ(o.exit_code, 0);
  const auto result = weylcheck::parse_structured(o.out);
  for (const auto& r : result.reports) EXPECT_EQ(r.model, "twisted_generic");
  EXPECT_EQ(run_cli("verify --points 3 --model twisted_generic --tolerance weyl.divergence_formula=1e-17").exit_code, 1);
  EXPECT_EQ(run_cli("verify --points 3 --tolerance no.such.identity=1e-3").exit_code, 2);
  EXPECT_EQ(run_cli("verify --points 3 --tolerance weyl.adati").exit_code, 2);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto bad = temp_file("bad.json");
  std::ofstream(bad) << "{\"points\": 3, \"mystery\": true}";
  EXPECT_EQ(run_cli("verify --config " + bad.string()).exit_code, 2);
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(run_cli("verify --config " + bad.string()).exit_code, 2);
  std::filesystem::remove(bad);
  EXPECT_EQ(run_cli("verify --config /nonexistent/config.json").exit_code, 2);
  EXPECT_EQ(run_cli("verify --points 0").exit_code, 2);
  EXPECT_EQ(run_cli("verify --format yaml").exit_code, 2);
}

TEST(Cli, ConfigFileDrivesRun) {
  const auto cfg = temp_file("cfg.json");
  std::ofstream(cfg) << R"({"points": 4, "seed": 3, "format": "structured",
                            "models": [{"name": "grw_product_spheres"}, {"name": "rw_flat", "n": 7}]})";
  const Outcome o = run_cli("verify --config " + cfg.string());
  std::filesystem::remove(cfg);
  ASSERT_EQ(o.exit_code, 0);
  const auto result = weylcheck::parse_structured(o.out);
  EXPECT_EQ(result.points, 4);
  EXPECT_EQ(result.seed, 3u);
}
