#include <gtest/gtest.h>

#include "hermitefc/config.hpp"
#include "hermitefc/run.hpp"

using namespace hermitefc;

TEST(Config, MinimalSodUsesDefaults) {
  const auto c = parse_config("[problem]\nproblem = sod\n");
  EXPECT_EQ(c.problem, "sod");
  EXPECT_TRUE(c.overrides.empty());
  const auto s = resolve(c);
  EXPECT_EQ(s.nx, 100);
  EXPECT_DOUBLE_EQ(s.t_final, 0.1644);
  EXPECT_EQ(c.output_dir, ".");
}

TEST(Config, SectionsAndComments) {
  const auto c = parse_config(
      "# demo\n[problem]\nproblem = lax\nnx = 50 ; coarse\n[solver]\ncfl = 0.1\nseed = 4\n"
      "[ev]\nalpha_max = 0.1\n[output]\ndir = \"out dir\"\nsnapshot_times = 0.05, 0.1\n"
      "[converge]\nm = 1,3\nnx = 20,40\nreference = self\nreference_nx = 160\n");
  const auto s = resolve(c);
  EXPECT_EQ(s.nx, 50);
  EXPECT_DOUBLE_EQ(s.cfl, 0.1);
  EXPECT_DOUBLE_EQ(s.ev.alpha_max, 0.1);
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(c.output_dir, "out dir");
  EXPECT_EQ(c.snapshot_times, (std::vector<double>{0.05, 0.1}));
  EXPECT_EQ(c.converge.m, (std::vector<int>{1, 3}));
  EXPECT_EQ(c.converge.nx, (std::vector<int>{20, 40}));
  EXPECT_EQ(c.converge.reference, "self");
}

TEST(Config, InvalidValueNamesKey) {
  try {
    parse_config("[problem]\nproblem = sod\n[ev]\nalpha_ev = -1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha_ev"), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    parse_config("[problem]\nproblem = sod\n\nwidget = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("widget"), std::string::npos);
  }
  EXPECT_THROW(parse_config("[problem]\nproblem = sod\n[solver]\nalpha_ev = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem]\nproblem = sod\nm = 2\n"), ConfigError);
}

TEST(Config, UnknownSectionAndSyntax) {
  try {
    parse_config("[problem]\nproblem = sod\n[extras]\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_config("problem = sod\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem\nproblem = sod\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem]\nproblem sod\n"), ConfigError);
  EXPECT_THROW(parse_config("[output]\ndir = x\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem]\nproblem = nope\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem]\nproblem = sod\n[converge]\nnorm = l2\n"), ConfigError);
}

TEST(Config, SerializeRoundTrip) {
  for (const auto& name : problem_names()) {
    RunConfig c;
    c.problem = name;
    c.overrides = {{"cfl", "0.05"}};
    c.snapshot_count = 3;
    c.seed = 11;
    c.converge.nx = {10, 20};
    const auto text = serialize(c);
    const auto back = parse_config(text);
    EXPECT_TRUE(equivalent(c, back)) << name << "\n" << text;
    EXPECT_EQ(serialize(back), text);
  }
}

TEST(Config, EquivalenceDetectsDifferences) {
  const auto a = parse_config("[problem]\nproblem = sod\n");
  auto b = parse_config("[problem]\nproblem = sod\nnx = 100\n");
  EXPECT_TRUE(equivalent(a, b));
  b.overrides["nx"] = "101";
  EXPECT_FALSE(equivalent(a, b));
}

TEST(Config, SnapshotSchedule) {
  auto c = parse_config("[problem]\nproblem = sod\n[output]\nsnapshot_count = 2\n");
  const auto spec = resolve(c);
  EXPECT_EQ(snapshot_schedule(c, spec), (std::vector<double>{0.0822, 0.1644}));
  c.snapshot_count = 0;
  EXPECT_EQ(snapshot_schedule(c, spec), (std::vector<double>{0.1644}));
  EXPECT_EQ(snapshot_file_name("sod", 0.1644), "sod_t0.1644.csv");
}

TEST(Run, AbortIsReported) {
  auto s = make_problem("sod", {{"max_steps", "3"}});
  const auto out = run_problem(s);
  EXPECT_EQ(out.status, RunStatus::aborted);
  EXPECT_FALSE(out.error.empty());
}

TEST(Run, ConvergeSingleLevelHasNoRates) {
  auto s = make_problem("burgers-smooth");
  ConvergeOptions o;
  o.m = {2};
  o.nx = {16};
  o.variable = "u";
  o.norm = "linf";
  const auto r = converge(s, o);
  ASSERT_EQ(r.levels.size(), 1u);
  EXPECT_GT(r.levels[0].error.linf, 0.0);
  EXPECT_LT(r.levels[0].error.linf, 1e-3);
  std::ostringstream os;
  write_table_text(os, r.table);
  EXPECT_NE(os.str().find("linf-err m=2"), std::string::npos);
}
