#include <gtest/gtest.h>

#include <set>

#include "leafcausal/catalog.hpp"
#include "leafcausal/scenario.hpp"
#include "support.hpp"

using namespace leafcausal;

TEST(Catalog, ListsAtLeastTenUniqueIds) {
  auto ids = list_examples();
  EXPECT_GE(ids.size(), 10u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
}

TEST(Catalog, GetRoundTrips) {
  for (const auto& id : list_examples()) EXPECT_EQ(get_example(id).id, id);
}

TEST(Catalog, UnknownIdAndKey) {
  try {
    get_example("anti_de_sitter");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownExample);
  }
  try {
    get_example("cos_warp", {{"omega", 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownKey);
  }
}

TEST(Catalog, CachedPerParameterSet) {
  const auto& a = get_example("cos_warp");
  const auto& b = get_example("cos_warp", {{"C", 1.0}});
  const auto& c = get_example("cos_warp", {{"C", 4.0}});
  EXPECT_EQ(&a, &b);
  EXPECT_NE(&a, &c);
  EXPECT_EQ(c.params.at("C"), 4.0);
}

TEST(Catalog, ClaimsAreSourcedAndProducedByKnownTasks) {
  const auto& tasks = scenario_tasks();
  for (const auto& id : list_examples()) {
    const auto& ex = get_example(id);
    for (const auto& c : ex.expected) {
      EXPECT_NE(c.source, ClaimSource::Unset) << id << "/" << c.id;
      EXPECT_NE(std::find(tasks.begin(), tasks.end(), c.task), tasks.end()) << id << "/" << c.id;
    }
  }
}

TEST(Catalog, ClaimComparisons) {
  ExpectedClaim c;
  c.cmp = Comparison::Within;
  c.lo = 1;
  c.hi = 2;
  EXPECT_TRUE(c.check(1.5));
  EXPECT_FALSE(c.check(2.5));
  EXPECT_FALSE(c.check(std::nan("")));
  c.cmp = Comparison::AtLeast;
  EXPECT_TRUE(c.check(7));
  c.cmp = Comparison::AtMost;
  EXPECT_FALSE(c.check(7));
  c.cmp = Comparison::Equals;
  c.lo = c.hi = 0;
  EXPECT_TRUE(c.check(0));
  EXPECT_FALSE(c.check(1e-300));
}

TEST(Catalog, DeclaredMetadataMatchesStructure) {
  for (const auto& id : list_examples()) {
    const auto& ex = get_example(id);
    EXPECT_EQ(ex.fol.p + ex.fol.q, ex.fol.dim()) << id;
    if (ex.gt) {
      EXPECT_EQ(ex.gt->h.size(), static_cast<std::size_t>(ex.fol.base.chart_count())) << id;
      EXPECT_EQ(ex.gt->index, 1) << id;
    }
    if (ex.graph) EXPECT_EQ(ex.graph->axes.size(), static_cast<std::size_t>(ex.fol.dim())) << id;
    if (ex.time_axis >= 0) EXPECT_GE(ex.time_axis, ex.fol.p) << id;
  }
}
