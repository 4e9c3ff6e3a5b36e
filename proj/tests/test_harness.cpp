#include <gtest/gtest.h>

#include "qtorus/qtorus.hpp"

using namespace qtorus;

namespace {

std::string fixture(const char* name) { return std::string(QTORUS_FIXTURES) + "/" + name; }

Fixture load(const char* name, Overrides o = {}) {
  Fixture f = load_fixture(fixture(name));
  apply(f, o);
  return f;
}

std::string field_of(const Json& j) {
  try {
    fixture_from_json(j);
  } catch (const FieldError& e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST(Schedule, ThreeStepsEndingAtRadius) {
  EXPECT_EQ(schedule_for(12), (std::vector<int>{4, 8, 12}));
  EXPECT_EQ(schedule_for(1), (std::vector<int>{1}));
  EXPECT_EQ(schedule_for(2), (std::vector<int>{1, 2}));
  for (int r = 1; r <= 30; ++r) {
    const auto s = schedule_for(r);
    EXPECT_EQ(s.back(), r);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
  }
}

TEST(Fixture, ParsesEveryShippedFixture) {
  for (const char* name : {"identity_n2.json", "cos_n2.json", "one_plus_u_n1.json", "two_plus_cos_n1.json",
                           "conformal_n2.json", "rotated_n2.json", "torus_n3.json", "weak_inverse_n1.json"})
    EXPECT_NO_THROW(load_fixture(fixture(name))) << name;
}

TEST(Fixture, ParseErrorCarriesLocation) {
  try {
    load_fixture(fixture("malformed.json"));
    FAIL() << "expected a parse error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4, column"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_fixture(fixture("no_such_file.json")), InputError);
}

TEST(Fixture, FieldErrorsNameThePath) {
  try {
    load_fixture(fixture("bad_field.json"));
    FAIL() << "expected a field error";
  } catch (const FieldError& e) {
    EXPECT_EQ(e.path(), "$.element[0].k");
  }
  const Json theta = {{"n", 2}, {"entries", {{0.0, 0.3}, {-0.3, 0.0}}}};
  EXPECT_EQ(field_of(Json{{"norm", "l2"}}), "$.theta");
  EXPECT_EQ(field_of(Json{{"theta", theta}, {"samples", 0}}), "$.samples");
  EXPECT_EQ(field_of(Json{{"theta", theta}, {"norm", "l3"}}), "$.norm");
  EXPECT_EQ(field_of(Json{{"theta", {{"n", 2}, {"entries", {{0.0, 0.3}, {0.3, 0.0}}}}}}), "$.theta.entries");
  EXPECT_EQ(field_of(Json::array()), "$");
}

TEST(Fixture, FlagsOverrideFixtureFields) {
  Overrides o;
  o.radius = 9;
  o.tol = 1e-4;
  o.norm = "linf";
  o.seed = 5;
  o.samples = 3;
  o.r = 3.0;
  o.s = 7.0;
  o.anchors = 4;
  const Fixture f = load("conformal_n2.json", o);
  EXPECT_EQ(f.cfg.gns.radii, (std::vector<int>{3, 6, 9}));
  EXPECT_EQ(f.cfg.tol, 1e-4);
  EXPECT_EQ(f.cfg.norm.kind, NormKind::linf);
  EXPECT_EQ(f.cfg.gns.seed, 5u);
  EXPECT_EQ(f.samples, 3);
  EXPECT_EQ(f.bridge.r, 3.0);
  EXPECT_EQ(f.bridge.s, 7.0);
  EXPECT_EQ(f.bridge.anchors, 4);
  const Fixture plain = load("conformal_n2.json");
  EXPECT_EQ(plain.cfg.gns.radii, (std::vector<int>{4, 8}));
  EXPECT_EQ(plain.bridge.anchors, 32);
  Fixture bad = plain;
  Overrides neg;
  neg.radius = 0;
  EXPECT_THROW(apply(bad, neg), InputError);
  neg = {};
  neg.norm = "l3";
  EXPECT_THROW(apply(bad, neg), InputError);
}

TEST(RunTask, UnknownCommandThrows) {
  EXPECT_THROW(run_task("connection frobnicate", load("identity_n2.json")), InputError);
  EXPECT_EQ(known_tasks().size(), 14u);
}

TEST(RunTask, ReportLayoutIsFixed) {
  const RunResult r = run_task("connection check", load("identity_n2.json"));
  EXPECT_EQ(r.exit_code, 0);
  std::vector<std::string> keys;
  for (auto it = r.report.begin(); it != r.report.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"task", "fixture", "inputs", "results", "checks", "provenance", "passed"}));
  EXPECT_TRUE(r.report["passed"].get<bool>());
  EXPECT_EQ(r.report["provenance"]["seed"].get<std::uint64_t>(), 11u);
  EXPECT_NE(r.text.find("all checks passed"), std::string::npos);
}

TEST(RunTask, AlgebraCheckPasses) {
  Overrides o;
  o.samples = 10;
  const RunResult r = run_task("algebra check", load("cos_n2.json", o));
  EXPECT_EQ(r.exit_code, 0) << r.text;
  EXPECT_GE(r.report["checks"].size(), 8u);
}

TEST(RunTask, NormOfOnePlusGenerator) {
  const RunResult r = run_task("norm", load("one_plus_u_n1.json"));
  EXPECT_EQ(r.exit_code, 0) << r.text;
}

TEST(RunTask, MetricCommandsNeedAMetric) {
  EXPECT_THROW(run_task("metric validate", load("cos_n2.json")), FieldError);
  EXPECT_EQ(run_task("metric validate", load("conformal_n2.json")).exit_code, 0);
}

TEST(RunTask, WeakInverseFailsItsCheck) {
  const RunResult r = run_task("connection compute", load("weak_inverse_n1.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_FALSE(r.report["passed"].get<bool>());
  EXPECT_EQ(run_task("connection compute", load("two_plus_cos_n1.json")).exit_code, 0);
}

TEST(RunTask, SeminormLOnCosine) {
  const RunResult r = run_task("seminorm L", load("cos_n2.json"));
  EXPECT_EQ(r.exit_code, 0) << r.text;
}

TEST(RunTask, StructuredReportsAreDeterministic) {
  Overrides o;
  o.samples = 2;
  const Fixture f = load("rotated_n2.json", o);
  const RunResult a = run_task("connection check", f);
  const RunResult b = run_task("connection check", f);
  EXPECT_EQ(a.report.dump(), b.report.dump());
  o.seed = 12345;
  const RunResult c = run_task("connection check", load("rotated_n2.json", o));
  EXPECT_NE(a.report.dump(), c.report.dump());
}

TEST(Diff, RawDiffSeesSubThresholdDefects) {
  const Theta th = make_theta2(0.3);
  const TorusElement a = one(th);
  const TorusElement b = TorusElement::scalar(th, 1.0 + 1e-16 * 4);
  EXPECT_GT(harness::raw_diff(a, b), 0.0);
  EXPECT_EQ(harness::raw_diff(a, a), 0.0);
}
