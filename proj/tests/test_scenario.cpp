#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "leafcausal/parallel.hpp"
#include "leafcausal/scenario.hpp"
#include "support.hpp"

using namespace leafcausal;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  throw std::runtime_error("parse succeeded");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ParseScenario, Valid) {
  auto sc = parse_scenario("example = cos_warp\ntask = diameter-shoot\nC = 1.0\nseed = 0");
  EXPECT_EQ(sc.example, "cos_warp");
  EXPECT_EQ(sc.task, "diameter-shoot");
  EXPECT_EQ(sc.get("C", 0.0), 1.0);
  EXPECT_EQ(sc.seed, 0u);
}

TEST(ParseScenario, CommentsBlankLinesAndParams) {
  auto sc = parse_scenario("# header\n\nexample = cos_warp   # trailing\n task = focal-scan\nparam.eps = 0.005\n");
  EXPECT_EQ(sc.example, "cos_warp");
  EXPECT_EQ(sc.example_params.at("eps"), 0.005);
  EXPECT_EQ(sc.seed, 0u);
}

TEST(ParseScenario, Errors) {
  EXPECT_EQ(code_of("example = cos_warp\nseed = 0"), ErrorCode::MissingKey);
  try {
    parse_scenario("example = cos_warp\nseed = 0");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("task"), std::string::npos);
  }
  EXPECT_EQ(code_of("example = cos_warp\ntask = diameter-graph\nresolution = -3"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("example = cos_warp\ntask = diameter-graph\nflavour = 2"), ErrorCode::UnknownKey);
  EXPECT_EQ(code_of("example = cos_warp\ntask = teleport"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("example = cos_warp\nexample = flat_slab\ntask = diameter-graph"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("example cos_warp"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("example = cos_warp\ntask = reach\nresolutions = 20, x"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("example = cos_warp\ntask = reach\nseed = -1"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("example = cos_warp\ntask = reach\nreport = ../x.report"), ErrorCode::ParseError);
}

TEST(ParseScenario, ParseErrorNamesTheLine) {
  try {
    parse_scenario("example = cos_warp\n\ntask = diameter-graph\nresolution = -3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(ShippedScenarios, AllParse) {
  std::size_t n = 0;
  for (const auto& f : std::filesystem::directory_iterator(LEAFCAUSAL_SCENARIO_DIR)) {
    EXPECT_NO_THROW(load_scenario(f.path())) << f.path();
    ++n;
  }
  EXPECT_GE(n, 10u);
}

TEST(Run, UnknownExampleIsWrapped) {
  try {
    run(parse_scenario("example = nowhere\ntask = diameter-shoot\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownExample);
    EXPECT_NE(std::string(e.what()).find("nowhere/diameter-shoot"), std::string::npos) << e.what();
  }
}

TEST(Run, TaskTheExampleCannotServe) {
  EXPECT_THROW(run(parse_scenario("example = kronecker_T2\ntask = diameter-graph\n")), Error);
}

TEST(Run, TorusLadderReportsCycleWitness) {
  auto rep = run(parse_scenario("example = torus3_dense\ntask = ladder-probe\nsamples = 100\n"));
  EXPECT_EQ(rep.metrics.at("cycle"), 1.0);
  EXPECT_GE(rep.metrics.at("cycle_length"), 2.0);
  bool table = false;
  for (const auto& t : rep.tables) table |= t.name == "cycle" && !t.rows.empty();
  EXPECT_TRUE(table);
  EXPECT_TRUE(rep.all_passed());
}

TEST(Run, OnlyClaimsOfTheTaskAreChecked) {
  auto rep = run(parse_scenario("example = cos_warp\ntask = diameter-shoot\n"));
  ASSERT_FALSE(rep.claims.empty());
  for (const auto& c : rep.claims) {
    EXPECT_EQ(c.claim.task, "diameter-shoot");
    EXPECT_TRUE(c.value.has_value());
  }
  EXPECT_EQ(rep.evaluated(), rep.claims.size());
  EXPECT_TRUE(rep.all_passed());
}

TEST(Run, FailedClaimIsCounted) {
  auto rep = run(parse_scenario("example = cos_warp\ntask = diameter-shoot\nparam.C = 4\n"));
  EXPECT_TRUE(rep.all_passed());
  // the log-warp transverse Ricci claim as printed cannot hold for a flat quotient
  auto bad = run(parse_scenario("example = logt_warp\ntask = ricci-scan\ntime_points = 4\nspatial_points = 2\n"));
  EXPECT_EQ(bad.failed(), 1u);
  EXPECT_FALSE(bad.all_passed());
}

TEST(Report, RenderFormat) {
  auto rep = run(parse_scenario("example = mink3_vertical\ntask = focal-scan\n"));
  std::string text = rep.render();
  EXPECT_EQ(text.rfind("leafcausal-report v1\n", 0), 0u);
  std::size_t last = 0;
  for (const char* sec : {"\nscenario {", "\nexample {", "\nresults {", "\nclaims {", "\nsummary {", "\nmeta {"}) {
    auto at = text.find(sec);
    ASSERT_NE(at, std::string::npos) << sec;
    EXPECT_GT(at, last) << sec;
    last = at;
  }
  EXPECT_EQ(std::count(text.begin(), text.end(), '{'), std::count(text.begin(), text.end(), '}'));
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Report, NumbersUseTwelveSignificantDigits) {
  EXPECT_EQ(format_number(std::numbers::pi), "3.14159265359");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(1e-20), "1e-20");
}

TEST(Report, DeterministicAcrossThreadCounts) {
  auto sc = parse_scenario("example = cos_warp\ntask = ricci-scan\ntime_points = 5\nspatial_points = 4\n");
  set_thread_count(1);
  std::string one = run(sc).render();
  set_thread_count(4);
  std::string four = run(sc).render();
  set_thread_count(0);
  EXPECT_EQ(one, four);
  EXPECT_EQ(run(sc).render(), one);
}

TEST(Emit, WritesReportAndTables) {
  auto dir = std::filesystem::temp_directory_path() / "leafcausal-emit-test";
  std::filesystem::remove_all(dir);
  auto rep = run(parse_scenario("example = desitter_warp\ntask = focal-scan\n"));
  auto files = emit(rep, dir, "focal");
  ASSERT_FALSE(files.empty());
  EXPECT_EQ(slurp(dir / "focal.report"), rep.render());
  for (const auto& t : rep.tables) {
    std::string csv = slurp(dir / ("focal-" + t.name + ".csv"));
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    EXPECT_EQ(lines, t.rows.size() + 1) << t.name;  // header row plus one line per row
    EXPECT_EQ(csv.find('\r'), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST(Emit, UnwritableDirectory) {
  auto rep = run(parse_scenario("example = mink3_vertical\ntask = focal-scan\n"));
  auto blocker = std::filesystem::temp_directory_path() / "leafcausal-emit-blocker";
  std::ofstream(blocker) << "x";
  try {
    emit(rep, blocker / "sub", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
  std::filesystem::remove(blocker);
}
