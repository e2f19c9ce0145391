#include "weylcheck/runner.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <tuple>

#include "weylcheck/error.hpp"

using namespace weylcheck;

namespace {

RunConfig small_config(int points = 6) {
  RunConfig c = default_config();
  c.points = points;
  return c;
}

}  // namespace

TEST(Run, DefaultConfigMeetsEveryExpectation) {
  const RunResult r = run(small_config());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.skipped_points.empty());
  EXPECT_EQ(r.reports.size(), default_config().models.size() * identity_registry().size());
  for (const auto& rep : r.reports) EXPECT_TRUE(rep.meets_expectation()) << rep.model << " " << rep.identity_id;
}

TEST(Run, ReportsAreSortedByModelDimensionAndIdentity) {
  const RunResult r = run(small_config(2));
  EXPECT_TRUE(std::ranges::is_sorted(r.reports, [](const auto& a, const auto& b) {
    return std::tie(a.model, a.n, a.identity_id) < std::tie(b.model, b.n, b.identity_id);
  }));
}

TEST(Run, FixedSeedIsDeterministic) {
  EXPECT_EQ(run(small_config(4)), run(small_config(4)));
  RunConfig other = small_config(4);
  other.seed = 7;
  EXPECT_NE(run(other).reports, run(small_config(4)).reports);
}

TEST(Run, UnachievableToleranceGivesExitOne) {
  RunConfig c = small_config(3);
  c.tolerances["weyl.divergence_formula"] = 1e-15;
  EXPECT_EQ(run(c).exit_code, 1);
}

TEST(Run, NegativeControlWithoutPerturbationMeetsNoFailureExpectation) {
  RunConfig c;
  c.points = 3;
  ModelSpec spec;
  spec.name = "non_twisted_perturbed";
  spec.parameters = {{"delta", 0.0}};
  c.models = {spec};
  // delta = 0 is twisted_generic with the wrong declared class: twisted
  // checks are skipped and nothing is expected to fail.
  EXPECT_EQ(run(c).exit_code, 0);
}

TEST(Run, ModelErrorsAreConfigErrors) {
  RunConfig c;
  ModelSpec spec;
  spec.name = "kerr";
  c.models = {spec};
  EXPECT_THROW((void)run(c), ConfigError);
  c.models = default_config().models;
  c.points = 0;
  EXPECT_THROW((void)run(c), ConfigError);
}

TEST(Run, DiagonalModelWithDeclaredClass) {
  RunConfig c;
  c.points = 5;
  ModelSpec spec;
  spec.name = "diagonal";
  spec.n = 5;
  spec.diagonal = {"-1", "exp(0.6*t)", "exp(0.6*t)", "exp(0.6*t)", "exp(0.6*t)"};
  spec.expected_class = "rw";
  spec.label = "de_sitter_like";
  c.models = {spec};
  const RunResult r = run(c);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.reports.front().model, "de_sitter_like");
}

TEST(ExitCode, PureFunctionOfReportsAndSkips) {
  RunResult r;
  r.points = 40;
  IdentityReport ok;
  ok.identity_id = "weyl.adati";
  ok.points_tested = 40;
  ok.verdict = Verdict::pass;
  r.reports = {ok};
  EXPECT_EQ(exit_code_for(r), 0);

  r.skipped_points.push_back({"m", 5, {}, "singular metric"});
  EXPECT_EQ(exit_code_for(r), 0);  // 1 of 40 is below 5 %
  r.skipped_points.push_back({"m", 5, {}, "singular metric"});
  EXPECT_EQ(exit_code_for(r), 1);  // 2 of 40 reaches 5 %

  r.skipped_points.clear();
  r.reports.front().expected = Verdict::fail;
  EXPECT_EQ(exit_code_for(r), 1);
}
